use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lfpoly::polytope::{parse_representation, polytope_equal, Representation};
use lfpoly::VPolytope;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lfpoly"));
    c.env_remove("LFPOLY_MAX_DIM");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn as_vertices(text: &str) -> VPolytope {
    match parse_representation(text).unwrap() {
        Representation::V(v) => v,
        Representation::H(_) => panic!("expected a V-representation"),
    }
}

#[test]
fn ld_vertices_of_chsh() {
    let o = run(&["vertices", "--scenario", "2,2,2,2", "--family", "ld"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("16 17 rational"));
    assert_eq!(as_vertices(&text).len(), 16);
}

#[test]
fn families_by_name() {
    let count = |args: &[&str]| as_vertices(&stdout(&run(args))).len();
    assert_eq!(count(&["vertices", "--scenario", "2,2,2,2", "--family", "ns"]), 24);
    assert_eq!(count(&["vertices", "--scenario", "2,2,2,2", "--family", "lf"]), 16);
    assert_eq!(count(&["vertices", "--scenario", "2,2,2,2", "--family", "pd:;"]), 24);
    assert_eq!(count(&["vertices", "--scenario", "2,2,2,2", "--family", "pd:1,2;1,2"]), 16);
    assert_eq!(count(&["vertices", "--family", "sw:1"]), 16);
    assert_eq!(
        count(&["vertices", "--family", "ld", "--alice-outcomes", "2,3", "--bob-outcomes", "2"]),
        12
    );
}

#[test]
fn theorem5_claim_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "theorem5", "--R", "2", "--bob", "2,2", "--witness-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(line.starts_with("CLAIM theorem5 PASS "), "{line}");
    let witness = dir.path().join("theorem5.witness.txt");
    assert!(std::fs::read_to_string(witness).unwrap().contains("outcome PASS"));
}

#[test]
fn other_claims() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["verify", "woodhead", "--k", "2", "--iy", "1", "--witness-dir", d],
        vec!["verify", "lf-gap", "--M", "2", "--witness-dir", d],
        vec!["verify", "quantum", "--witness-dir", d],
    ] {
        let o = run(&args);
        assert!(o.status.success(), "{args:?}");
        assert!(stdout(&o).contains(" PASS "));
    }
}

#[test]
fn ch_demo_value() {
    let o = run(&["quantum", "ch-demo"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("CH value 0.2071067811"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["vertices", "--scenario", "2,x", "--family", "ld"]).status.code(), Some(3));
    assert_eq!(run(&["vertices", "--scenario", "2,2,2", "--family", "ld"]).status.code(), Some(3));
    assert_eq!(run(&["vertices", "--scenario", "2,2,2,2", "--family", "pd:0;"]).status.code(), Some(3));
    assert_eq!(run(&["vertices", "--scenario", "2,2,2,2", "--family", "xx"]).status.code(), Some(3));
    let o = bin()
        .args(["vertices", "--scenario", "2,2,2,2", "--family", "ld"])
        .env("LFPOLY_MAX_DIM", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(run(&["vertices", "--scenario", "9,2,9,2", "--family", "ns"]).status.code(), Some(4));
}

#[test]
fn membership_certificates() {
    let pr = data("pr_box.behaviour");
    let o = run(&["member", "--scenario", "2,2,2,2", "--family", "ld", "--point", pr.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("OUTSIDE"));
    let o = run(&["member", "--scenario", "2,2,2,2", "--family", "ns", "--point", pr.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("INSIDE"));
    let u = data("uniform.behaviour");
    let o = run(&["member", "--scenario", "2,2,2,2", "--family", "ld", "--point", u.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("INSIDE"));
}

#[test]
fn eval_defaults_to_ch_row() {
    let o = run(&["eval", "--point", data("pr_box.behaviour").to_str().unwrap()]);
    assert!(stdout(&o).starts_with("row 0 -1/2"), "{}", stdout(&o));
    let o = run(&[
        "eval",
        "--point",
        data("uniform.behaviour").to_str().unwrap(),
        "--hrep",
        data("chsh_ld.ine").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o).lines().count(), 24);
}

#[test]
fn quantum_and_sequential_files() {
    let born = run(&["quantum", "born", "--setup", data("ch_demo.setup").to_str().unwrap()]);
    assert!(born.status.success());
    let seq = run(&["sequential", "--setup", data("sequential.setup").to_str().unwrap()]);
    assert!(seq.status.success());
    let b = lfpoly::Behaviour::from_text(&stdout(&born)).unwrap();
    let s = lfpoly::Behaviour::from_text(&stdout(&seq)).unwrap();
    // The first two sequential inputs are the CH settings.
    for y in 0..2 {
        for x in 0..2 {
            for a in 0..2 {
                for bb in 0..2 {
                    assert_eq!(b.get(x, y, a, bb).unwrap(), s.get(x, y, a, bb).unwrap());
                }
            }
        }
    }
}

#[test]
fn convert_round_trips_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["chsh_ld.ext", "chsh_ns.ext", "chsh_ld.ine"] {
        let original = std::fs::read_to_string(data(name)).unwrap();
        let mid = dir.path().join("mid");
        let back = dir.path().join("back");
        assert!(run(&["convert", "--input", data(name).to_str().unwrap(), "-o", mid.to_str().unwrap()]).status.success());
        assert!(run(&["convert", "--input", mid.to_str().unwrap(), "-o", back.to_str().unwrap()]).status.success());
        let back = std::fs::read_to_string(back).unwrap();
        let (a, b) = match parse_representation(&original).unwrap() {
            Representation::V(v) => (v, as_vertices(&back)),
            Representation::H(_) => (
                as_vertices(&std::fs::read_to_string(&mid).unwrap()),
                as_vertices(&stdout(&run(&["convert", "--input", dir.path().join("back").to_str().unwrap()]))),
            ),
        };
        assert!(polytope_equal(&a, &b), "{name}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["facets", "--scenario", "2,2,2,2", "--family", "ns"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = {
        run(&["verify", "woodhead", "--witness-dir", d]);
        std::fs::read(dir.path().join("woodhead.witness.txt")).unwrap()
    };
    run(&["verify", "woodhead", "--witness-dir", d]);
    assert_eq!(first, std::fs::read(dir.path().join("woodhead.witness.txt")).unwrap());
}

#[test]
fn summary_goes_to_stderr() {
    let o = run(&["vertices", "--scenario", "2,2,2,2", "--family", "ns", "--summary"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("vertices: 24"));
    assert!(err.contains("max CH value over vertices: 1/2"));
}

#[test]
fn jobs_flag_is_accepted() {
    let o = run(&["--jobs", "2", "vertices", "--scenario", "2,2,2,2", "--family", "ld"]);
    assert!(o.status.success());
}
