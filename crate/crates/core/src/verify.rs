//! Claim harnesses. Each builds the relevant polytopes, decides the claim,
//! re-checks every certificate it emits and returns a deterministic report.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::affine_dimension;
use crate::models::{
    ch_inequalities, ch_row, ch_row_lifted, evaluate_inequality, ld_vertices, lf_vertices, pd_vertices,
    sw_vertices, PdSpec,
};
use crate::polytope::{
    canonicalize_inequality, certify_inside, certify_outside, compare_polytopes, facet_enum, HPolytope,
    Inequality, MembershipOracle, MembershipResult, SymmetryGroup, VPolytope,
};
use crate::quantum::{born_behaviour, ch_demo_setup, polarization_projectors, sequential_behaviour, SequentialProtocol};
use crate::rational::{format_rational, to_f64, Rational};
use crate::scenario::{Behaviour, Scenario};

/// Upper limits checked before any enumeration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleGuard {
    pub max_dim: usize,
    pub max_vertices: usize,
}

impl Default for ScaleGuard {
    fn default() -> Self {
        ScaleGuard {
            max_dim: 64,
            max_vertices: 100_000,
        }
    }
}

impl ScaleGuard {
    /// Defaults, with `max_dim` overridden by `LFPOLY_MAX_DIM` when set.
    pub fn from_env() -> Self {
        let mut g = Self::default();
        if let Some(d) = std::env::var("LFPOLY_MAX_DIM").ok().and_then(|v| v.trim().parse().ok()) {
            g.max_dim = d;
        }
        g
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::ScaleGuard(format!(
                "dimension {dim} exceeds the limit {} (set LFPOLY_MAX_DIM to raise it)",
                self.max_dim
            )));
        }
        Ok(())
    }

    pub fn check_vertices(&self, what: &str, count: u128) -> Result<()> {
        if count > self.max_vertices as u128 {
            return Err(Error::ScaleGuard(format!(
                "{what} would have up to {count} vertices, above the limit {}",
                self.max_vertices
            )));
        }
        Ok(())
    }

    /// Dimension plus the deterministic-strategy count of `s`.
    pub fn check_scenario(&self, s: &Scenario) -> Result<()> {
        self.check_dim(s.dim())?;
        let count = s
            .alice_outcomes()
            .iter()
            .chain(s.bob_outcomes())
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        self.check_vertices("the local polytope", count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
        })
    }
}

/// Evidence attached to a report. `label` names the polytope pair or check.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Vertex `point` of one polytope as a convex combination of another's
    /// vertices; only nonzero weights are kept.
    Inside {
        label: String,
        point: usize,
        weights: Vec<(usize, Rational)>,
    },
    /// Vertex `point` (coordinates included) strictly violates `separator`,
    /// which every vertex of the other polytope satisfies.
    Outside {
        label: String,
        point: usize,
        coords: Vec<Rational>,
        separator: Inequality,
    },
    Row {
        label: String,
        row: Inequality,
        note: String,
    },
    Value {
        label: String,
        value: String,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &Inequality| {
            let mut s = format_rational(&r.offset);
            for c in &r.coeffs {
                s.push(' ');
                s.push_str(&format_rational(c));
            }
            s
        };
        match self {
            Witness::Inside { label, point, weights } => {
                write!(f, "inside {label} {point}:")?;
                for (j, w) in weights {
                    write!(f, " {j}={}", format_rational(w))?;
                }
                Ok(())
            }
            Witness::Outside {
                label,
                point,
                coords,
                separator,
            } => {
                write!(f, "outside {label} {point}: point")?;
                for c in coords {
                    write!(f, " {}", format_rational(c))?;
                }
                write!(f, " | row {}", row(separator))
            }
            Witness::Row { label, row: r, note } => write!(f, "row {label} ({note}): {}", row(r)),
            Witness::Value { label, value } => write!(f, "value {label} = {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claim: String,
    pub parameters: Vec<(String, String)>,
    pub outcome: Outcome,
    pub witnesses: Vec<Witness>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// `CLAIM <id> PASS|FAIL <witness-file>`.
    pub fn summary_line(&self, witness_file: &str) -> String {
        format!("CLAIM {} {} {}", self.claim, self.outcome, witness_file)
    }

    /// Full report. Wall time is left out so identical runs produce
    /// identical text.
    pub fn to_text(&self) -> String {
        let mut out = format!("claim {}\noutcome {}\n", self.claim, self.outcome);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "param {k} = {v}");
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "{w}");
        }
        out
    }
}

struct Builder {
    claim: &'static str,
    parameters: Vec<(String, String)>,
    witnesses: Vec<Witness>,
    ok: bool,
    start: Instant,
}

impl Builder {
    fn new(claim: &'static str) -> Self {
        Builder {
            claim,
            parameters: Vec::new(),
            witnesses: Vec::new(),
            ok: true,
            start: Instant::now(),
        }
    }

    fn param(&mut self, k: &str, v: impl fmt::Display) {
        self.parameters.push((k.to_string(), v.to_string()));
    }

    fn value(&mut self, label: &str, v: impl fmt::Display) {
        self.witnesses.push(Witness::Value {
            label: label.to_string(),
            value: v.to_string(),
        });
    }

    fn require(&mut self, label: &str, cond: bool) {
        self.value(label, cond);
        self.ok &= cond;
    }

    fn finish(self) -> VerificationReport {
        VerificationReport {
            claim: self.claim.to_string(),
            parameters: self.parameters,
            outcome: if self.ok { Outcome::Pass } else { Outcome::Fail },
            witnesses: self.witnesses,
            elapsed: self.start.elapsed(),
        }
    }
}

fn membership_witness(label: &str, point: usize, coords: &[Rational], target: &VPolytope, r: MembershipResult) -> (bool, Witness) {
    match r {
        MembershipResult::Inside { weights } => {
            let valid = certify_inside(coords, target, &weights);
            let weights = weights
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect();
            (
                valid,
                Witness::Inside {
                    label: label.to_string(),
                    point,
                    weights,
                },
            )
        }
        MembershipResult::Outside { separator } => {
            (
                false,
                Witness::Outside {
                    label: label.to_string(),
                    point,
                    coords: coords.to_vec(),
                    separator,
                },
            )
        }
    }
}

/// Decides `conv(a) = conv(b)`, attaching a re-checked certificate for
/// every vertex in both directions. On failure the first Outside vertex is
/// kept with its separator.
fn certified_equality(rep: &mut Builder, name_a: &str, a: &VPolytope, name_b: &str, b: &VPolytope) -> Result<bool> {
    let cmp = compare_polytopes(a, b)?;
    let mut equal = true;
    let mut failures = 0usize;
    let directions = [
        (format!("{name_a}->{name_b}"), a, b, cmp.forward),
        (format!("{name_b}->{name_a}"), b, a, cmp.backward),
    ];
    for (label, from, to, results) in directions {
        for (i, r) in results.into_iter().enumerate() {
            let coords = &from.vertices()[i];
            if let MembershipResult::Outside { separator } = &r {
                if !certify_outside(coords, to, separator) {
                    return Err(Error::Invalid(format!("separator for {label} {i} failed re-validation")));
                }
            }
            let (ok, w) = membership_witness(&label, i, coords, to, r);
            if !ok {
                equal = false;
                failures += 1;
                if failures > 1 {
                    continue;
                }
            }
            rep.witnesses.push(w);
        }
    }
    if failures > 0 {
        rep.value("vertices outside", failures);
    }
    Ok(equal)
}

/// Evaluates every row on every point; returns the number of violations.
fn violations(rows: &[Inequality], points: &VPolytope) -> usize {
    rows.iter()
        .map(|r| points.vertices().iter().filter(|p| r.eval(p).is_negative()).count())
        .sum()
}

/// Sequential LF polytope with `rounds` friend rounds equals the local
/// polytope of its effective scenario.
pub fn verify_theorem5(
    rounds: usize,
    bob_outcomes: &[usize],
    friend_alphabet: usize,
    final_alphabet: usize,
    guard: &ScaleGuard,
) -> Result<VerificationReport> {
    if rounds == 0 {
        return Err(Error::InvalidScenario("at least one round is required".into()));
    }
    let friends = vec![friend_alphabet; rounds];
    let scenario = crate::models::sw_scenario(&friends, final_alphabet, bob_outcomes)?;
    guard.check_scenario(&scenario)?;
    let mut rep = Builder::new("theorem5");
    rep.param("rounds", rounds);
    rep.param("scenario", scenario.spec_line());
    let sw = sw_vertices(&friends, final_alphabet, bob_outcomes)?;
    let ld = ld_vertices(&scenario);
    rep.value("sw vertices", sw.polytope.len());
    rep.value("ld vertices", ld.len());
    let equal = certified_equality(&mut rep, "sw", &sw.polytope, "ld", &ld)?;
    rep.require("polytopes equal", equal);
    let h = facet_enum(&ld)?;
    rep.value("ld facets", h.inequalities.len());
    rep.require("ld facets hold on sw vertices", violations(&h.inequalities, &sw.polytope) == 0);
    let determinism = sw.polytope.vertices().iter().all(|v| {
        let p = Behaviour::new(scenario.clone(), v.clone()).expect("dim");
        (0..rounds).all(|i| {
            (0..scenario.bob_inputs()).all(|y| {
                (0..friend_alphabet).all(|a| {
                    let m = p.alice_marginal(a, i, y).expect("in range");
                    m.is_zero() || m == Rational::from_integer(1.into())
                })
            })
        })
    });
    rep.require("friend rounds deterministic", determinism);
    Ok(rep.finish())
}

/// `PD_{X∖{k}, I_Y}` equals the local polytope.
pub fn verify_woodhead(scenario: &Scenario, k: usize, det_bob: &[usize], guard: &ScaleGuard) -> Result<VerificationReport> {
    guard.check_scenario(scenario)?;
    if k >= scenario.alice_inputs() {
        return Err(Error::Bounds(format!("input {k} out of range")));
    }
    let det_alice: Vec<usize> = (0..scenario.alice_inputs()).filter(|&x| x != k).collect();
    let spec = PdSpec::new(scenario.clone(), det_alice, det_bob.to_vec())?;
    let mut rep = Builder::new("woodhead");
    rep.param("scenario", scenario.spec_line());
    rep.param("k", k);
    rep.param("det_bob", format!("{:?}", spec.det_bob));
    let pd = pd_vertices(&spec)?;
    let ld = ld_vertices(scenario);
    rep.value("pd vertices", pd.len());
    rep.value("ld vertices", ld.len());
    let equal = certified_equality(&mut rep, "pd", &pd, "ld", &ld)?;
    rep.require("polytopes equal", equal);
    Ok(rep.finish())
}

/// Whether `row` is valid on `v` and tight on a set of dimension
/// `dim(v) - 1`.
pub fn is_facet(row: &Inequality, v: &VPolytope) -> bool {
    if v.vertices().iter().any(|p| row.eval(p).is_negative()) {
        return false;
    }
    let tight: Vec<Vec<Rational>> = v.vertices().iter().filter(|p| row.eval(p).is_zero()).cloned().collect();
    match (affine_dimension(&tight), affine_dimension(v.vertices())) {
        (Some(t), Some(d)) => d > 0 && t + 1 == d,
        _ => false,
    }
}

fn canonical_signatures(h: &HPolytope, group: &SymmetryGroup) -> Result<HashSet<Vec<BigInt>>> {
    h.inequalities
        .iter()
        .map(|r| Ok(canonicalize_inequality(r, group)?.signature))
        .collect()
}

/// LF versus LD for `M` binary inputs per party: equal for `M = 2`, and
/// for `M = 3` a certified LF vertex outside LD, an LF facet outside every
/// LD facet class, and the facet status of every lifted CH row.
pub fn verify_lf_gap(m: usize, guard: &ScaleGuard) -> Result<VerificationReport> {
    if !(2..=3).contains(&m) {
        return Err(Error::InvalidScenario("the LF gap claim covers M = 2 and M = 3".into()));
    }
    let s = Scenario::homogeneous(m, 2, m, 2)?;
    guard.check_scenario(&s)?;
    let mut rep = Builder::new("lf-gap");
    rep.param("M", m);
    let lf = lf_vertices(&s)?;
    let ld = ld_vertices(&s);
    rep.value("lf vertices", lf.len());
    rep.value("ld vertices", ld.len());
    if m == 2 {
        let equal = certified_equality(&mut rep, "lf", &lf, "ld", &ld)?;
        rep.require("polytopes equal", equal);
        return Ok(rep.finish());
    }

    let oracle = MembershipOracle::new(&ld)?;
    let mut found = false;
    for (i, p) in lf.vertices().iter().enumerate() {
        if let MembershipResult::Outside { separator } = oracle.query(p)? {
            if certify_outside(p, &ld, &separator) {
                rep.witnesses.push(Witness::Outside {
                    label: "lf->ld".into(),
                    point: i,
                    coords: p.clone(),
                    separator,
                });
                found = true;
                break;
            }
        }
    }
    rep.require("lf vertex outside ld", found);

    let group = SymmetryGroup::for_scenario(&s)?;
    let lf_h = facet_enum(&lf)?;
    let ld_h = facet_enum(&ld)?;
    rep.value("lf facets", lf_h.inequalities.len());
    rep.value("ld facets", ld_h.inequalities.len());
    let ld_classes = canonical_signatures(&ld_h, &group)?;
    rep.value("ld facet classes", ld_classes.len());
    let mut lf_classes = HashSet::new();
    let mut novel = None;
    for r in &lf_h.inequalities {
        let sig = canonicalize_inequality(r, &group)?.signature;
        if novel.is_none() && !ld_classes.contains(&sig) {
            novel = Some(r.clone());
        }
        lf_classes.insert(sig);
    }
    rep.value("lf facet classes", lf_classes.len());
    if let Some(row) = &novel {
        rep.witnesses.push(Witness::Row {
            label: "lf facet".into(),
            row: row.clone(),
            note: "no ld facet in its class".into(),
        });
    }
    rep.require("lf facet outside ld classes", novel.is_some());

    // Lifted CH rows: facets of LF iff they use input 0 on some side.
    let mut as_expected = true;
    let pairs: Vec<[usize; 2]> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| [i, j]))
        .collect();
    let (mut with0, mut with0_total, mut without0) = (0usize, 0usize, 0usize);
    for xs in &pairs {
        for ys in &pairs {
            let row = ch_row_lifted(&s, *xs, *ys)?;
            let facet = is_facet(&row, &lf);
            let uses0 = xs.contains(&0) || ys.contains(&0);
            if uses0 {
                with0_total += 1;
                with0 += facet as usize;
            } else {
                without0 += facet as usize;
            }
            as_expected &= facet == uses0;
        }
    }
    rep.value("lifted ch rows using input 0 that are lf facets", format!("{with0}/{with0_total}"));
    rep.value("lifted ch rows without input 0 that are lf facets", without0);
    rep.require("ch facet pattern", as_expected);
    Ok(rep.finish())
}

/// `-(row)` on a raw floating-point behaviour.
fn raw_value(row: &Inequality, raw: &[f64]) -> f64 {
    -(to_f64(&row.offset) + row.coeffs.iter().zip(raw).map(|(c, p)| to_f64(c) * p).sum::<f64>())
}

/// The CH value of the polarization setup, its certified exclusion from
/// LD with a CH-class separator, and the same value via the sequential
/// protocol.
pub fn verify_quantum_violation() -> Result<VerificationReport> {
    let target = (2f64.sqrt() - 1.0) / 2.0;
    let mut rep = Builder::new("quantum-violation");
    let s = Scenario::chsh();
    let (psi, alice, bob) = ch_demo_setup();
    let q = born_behaviour(&psi, &alice, &bob)?;
    let row = ch_row(&s)?;
    let exact = -evaluate_inequality(&row, &q.exact)?;
    let raw = raw_value(&row, &q.raw);
    rep.value("ch value (raw)", format!("{raw:.15}"));
    rep.value("ch value (rational)", format_rational(&exact));
    rep.require("raw value within 1e-10", (raw - target).abs() < 1e-10);
    rep.require("rational value within 1e-10", (to_f64(&exact) - target).abs() < 1e-10);

    let ld = ld_vertices(&s);
    let ch = ch_inequalities(&s)?;
    let group = SymmetryGroup::for_scenario(&s)?;
    match crate::polytope::membership(q.exact.coords(), &ld)? {
        MembershipResult::Outside { separator } => {
            rep.require("separator certified", certify_outside(q.exact.coords(), &ld, &separator));
            rep.require("separator in ch class", ch.iter().any(|r| group.same_row_class(r, &separator)));
            rep.witnesses.push(Witness::Row {
                label: "separator".into(),
                row: separator,
                note: "ld facet violated by the quantum point".into(),
            });
        }
        MembershipResult::Inside { .. } => rep.require("quantum point outside ld", false),
    }

    let proto = SequentialProtocol::new(psi, alice, polarization_projectors(0.0), bob)?;
    let seq = sequential_behaviour(&proto)?;
    let lifted = ch_row_lifted(&seq.exact.scenario().clone(), [0, 1], [0, 1])?;
    let seq_raw = raw_value(&lifted, &seq.raw);
    rep.value("sequential ch value (raw)", format!("{seq_raw:.15}"));
    rep.require("sequential value within 1e-10", (seq_raw - target).abs() < 1e-10);
    Ok(rep.finish())
}
