"""Builds the extension module and exercises it from Python."""

import importlib.util
import math
import os
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build():
    subprocess.run(
        ["cargo", "build", "-p", "lfpoly-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    suffix = {"darwin": "dylib", "win32": "dll"}.get(sys.platform, "so")
    prefix = "" if sys.platform == "win32" else "lib"
    return os.path.join(ROOT, "target", "debug", f"{prefix}lfpoly_py.{suffix}")


def load(path):
    tmp = tempfile.mkdtemp()
    target = os.path.join(tmp, "lfpoly.pyd" if sys.platform == "win32" else "lfpoly.so")
    shutil.copy(path, target)
    spec = importlib.util.spec_from_file_location("lfpoly", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    lf = load(build())
    chsh = lf.Scenario.chsh()
    assert chsh.dim == 16

    ld = lf.ld_vertices(chsh)
    ns = lf.ns_vertices(chsh)
    assert len(ld) == 16, len(ld)
    assert len(ns) == 24, len(ns)
    assert lf.lf_vertices(chsh).equals(ld)
    assert ld.num_facets() == 24

    q = lf.phi_plus_behaviour([0.0, math.pi / 4], [math.pi / 8, -math.pi / 8])
    value = lf.ch_value(q)
    assert isinstance(value, Fraction)
    assert abs(float(value) - (math.sqrt(2) - 1) / 2) < 1e-9, value

    with open(os.path.join(ROOT, "data", "pr_box.behaviour")) as f:
        pr = lf.Behaviour.from_text(f.read())
    inside, separator = ld.membership(pr)
    assert not inside
    assert len(separator) == chsh.dim + 1
    inside, weights = ns.membership(pr)
    assert inside and sum(weights) == 1

    passed, report = lf.verify_claim("theorem5", rounds=2)
    assert passed, report

    scenario, sw = lf.sw_vertices(2, [2, 2])
    assert len(sw) == 32, len(sw)

    _, gap = lf.sequential_phi_plus([0.0], math.pi / 4, [math.pi / 8, -math.pi / 8])
    assert gap < 1e-9

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
