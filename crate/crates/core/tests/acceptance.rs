//! Acceptance criteria, one PASS/FAIL line each with wall time.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use lfpoly::models::{ch_inequalities, ch_row, ch_row_lifted, evaluate_inequality, ld_vertices, ns_vertices, pd_vertices, PdSpec};
use lfpoly::polytope::{
    canonicalize_inequality, certify_inside, facet_enum, membership, vertex_enum, MembershipResult, SymmetryGroup,
    VPolytope,
};
use lfpoly::quantum::{
    born_behaviour, ch_demo_setup, polarization_projectors, reversal_error, sequential_behaviour, SequentialProtocol,
    StateVector,
};
use lfpoly::rational::{int, to_f64};
use lfpoly::verify::{is_facet, verify_lf_gap, verify_quantum_violation, verify_theorem5, verify_woodhead, ScaleGuard};
use lfpoly::{Behaviour, Rational, Scenario};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    ok: bool,
    detail: String,
    /// Time spent in test-side oracles, not counted against the limit.
    oracle: Duration,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
        oracle: Duration::ZERO,
    }
}

fn target() -> f64 {
    (2f64.sqrt() - 1.0) / 2.0
}

fn criterion_1() -> Check {
    let (psi, a, b) = ch_demo_setup();
    let q = born_behaviour(&psi, &a, &b).unwrap();
    let v = -to_f64(&evaluate_inequality(&ch_row(&Scenario::chsh()).unwrap(), &q.exact).unwrap());
    let report = verify_quantum_violation().unwrap();
    check(
        (v - target()).abs() < 1e-10 && report.passed(),
        format!("CH value {v:.12}, |error| {:.1e}", (v - target()).abs()),
    )
}

/// Vertices of `{p >= 0, E p = e}` by brute force over bases: set each
/// `zeros`-subset of coordinates to zero and keep unique nonnegative
/// solutions. Subsets that zero every coordinate of some `blocks` entry are skipped
/// (they contradict normalisation).
fn basic_solutions(
    eqs: &[(Vec<Rational>, Rational)],
    blocks: &[Vec<usize>],
    n: usize,
    zeros: usize,
) -> BTreeSet<Vec<Rational>> {
    fn solve(mut m: Vec<Vec<Rational>>, n: usize) -> Option<Vec<Rational>> {
        let mut row = 0;
        let mut pivots = Vec::new();
        for col in 0..n {
            let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = Rational::one() / &m[row][col];
            for v in m[row].iter_mut() {
                *v *= &inv;
            }
            for r in 0..m.len() {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..=n {
                        let d = &f * &m[row][c];
                        m[r][c] -= d;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if pivots.len() < n || m[row..].iter().any(|r| !r[n].is_zero()) {
            return None;
        }
        Some((0..n).map(|i| m[i][n].clone()).collect())
    }
    let mut out = BTreeSet::new();
    let mut subset: Vec<usize> = (0..zeros).collect();
    loop {
        let kills_block = blocks.iter().any(|b| b.iter().all(|i| subset.contains(i)));
        if !kills_block {
            let mut m: Vec<Vec<Rational>> = eqs
                .iter()
                .map(|(c, rhs)| {
                    let mut r = c.clone();
                    r.push(rhs.clone());
                    r
                })
                .collect();
            for &i in &subset {
                let mut r = vec![Rational::zero(); n + 1];
                r[i] = Rational::one();
                m.push(r);
            }
            if let Some(x) = solve(m, n) {
                if x.iter().all(|v| !v.is_negative()) {
                    out.insert(x);
                }
            }
        }
        // Next combination in lexicographic order.
        let mut i = zeros;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] < n - zeros + i {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..zeros {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn criterion_2() -> Check {
    let s = Scenario::chsh();
    let ld = ld_vertices(&s);
    let ns = ns_vertices(&s).unwrap();

    // Independent oracle: normalisation and marginal equalities written out
    // here, vertices as nonnegative basic solutions with 8 zero coordinates.
    let at = |x, y, a, b| s.coord_index(x, y, a, b).unwrap();
    let mut eqs = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            let mut c = vec![int(0); 16];
            for a in 0..2 {
                for b in 0..2 {
                    c[at(x, y, a, b)] = int(1);
                }
            }
            eqs.push((c, int(1)));
        }
    }
    for x in 0..2 {
        for a in 0..2 {
            let mut c = vec![int(0); 16];
            for b in 0..2 {
                c[at(x, 0, a, b)] += int(1);
                c[at(x, 1, a, b)] -= int(1);
            }
            eqs.push((c, int(0)));
        }
    }
    for y in 0..2 {
        for b in 0..2 {
            let mut c = vec![int(0); 16];
            for a in 0..2 {
                c[at(0, y, a, b)] += int(1);
                c[at(1, y, a, b)] -= int(1);
            }
            eqs.push((c, int(0)));
        }
    }
    let blocks: Vec<Vec<usize>> = (0..4).map(|b| s.block(b / 2, b % 2).collect()).collect();
    let t = Instant::now();
    let oracle = basic_solutions(&eqs, &blocks, 16, 8);
    let oracle_time = t.elapsed();
    let ns_set: BTreeSet<Vec<Rational>> = ns.vertices().iter().cloned().collect();
    let half = Rational::new(1.into(), 2.into());
    let nonlocal = ns
        .vertices()
        .iter()
        .filter(|v| !ld.contains_vertex(v))
        .filter(|v| {
            let p = Behaviour::new(s.clone(), (*v).clone()).unwrap();
            (0..2).all(|x| p.alice_marginal(0, x, 0).unwrap() == half)
        })
        .count();

    let h = facet_enum(&ld).unwrap();
    let back = vertex_enum(&h).unwrap();
    let group = SymmetryGroup::for_scenario(&s).unwrap();
    let ch_sig = canonicalize_inequality(&ch_row(&s).unwrap(), &group).unwrap().signature;
    let mut unit = vec![int(0); 16];
    unit[0] = int(1);
    let pos_sig = canonicalize_inequality(&lfpoly::Inequality::new(int(0), unit), &group).unwrap().signature;
    let (mut n_ch, mut n_pos, mut other) = (0, 0, 0);
    for r in &h.inequalities {
        let sig = canonicalize_inequality(r, &group).unwrap().signature;
        if sig == ch_sig {
            n_ch += 1;
        } else if sig == pos_sig {
            n_pos += 1;
        } else {
            other += 1;
        }
    }
    let all_facets = h.inequalities.iter().all(|r| is_facet(r, &ld));
    let ok = ld.len() == 16
        && ns.len() == 24
        && oracle == ns_set
        && nonlocal == 8
        && back.sorted().vertices() == ld.sorted().vertices()
        && n_ch == 8
        && n_pos == 16
        && other == 0
        && all_facets;
    let mut c = check(
        ok,
        format!(
            "LD {} vertices, NS {} (oracle {}, {nonlocal} with uniform marginals), LD facets: {n_ch} CH + {n_pos} positivity + {other} other",
            ld.len(),
            ns.len(),
            oracle.len()
        ),
    );
    c.oracle = oracle_time;
    c
}

fn criterion_3() -> Check {
    let guard = ScaleGuard::default();
    let mut runs = Vec::new();
    let chsh = Scenario::chsh();
    for k in 0..2 {
        for iy in [vec![], vec![0], vec![1], vec![0, 1]] {
            runs.push(verify_woodhead(&chsh, k, &iy, &guard).unwrap());
        }
    }
    let s3 = Scenario::homogeneous(3, 2, 3, 2).unwrap();
    for k in 0..3 {
        runs.push(verify_woodhead(&s3, k, &[], &guard).unwrap());
    }
    let passed = runs.iter().filter(|r| r.passed()).count();
    check(passed == runs.len(), format!("{passed}/{} collapse claims certified", runs.len()))
}

fn criterion_4() -> Check {
    let guard = ScaleGuard::default();
    let m2 = verify_lf_gap(2, &guard).unwrap();
    let m3 = verify_lf_gap(3, &guard).unwrap();
    let has_outside = m3
        .witnesses
        .iter()
        .any(|w| matches!(w, lfpoly::Witness::Outside { .. }));
    check(
        m2.passed() && m3.passed() && has_outside,
        format!("M=2 {}, M=3 {}", m2.outcome, m3.outcome),
    )
}

fn criterion_5() -> Check {
    let guard = ScaleGuard::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for r in 1..=3 {
        let t = Instant::now();
        let rep = verify_theorem5(r, &[2, 2], 2, 2, &guard).unwrap();
        let dt = t.elapsed();
        ok &= rep.passed() && dt < Duration::from_secs(300);
        parts.push(format!("R={r} {} in {:.1?}", rep.outcome, dt));
    }
    check(ok, parts.join(", "))
}

fn random_protocol(rng: &mut ChaCha8Rng) -> SequentialProtocol {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let amps = vec![c(), c(), c(), c()];
    let psi = StateVector::normalized(amps, vec![2, 2]).unwrap();
    let rounds = rng.gen_range(1..=3);
    let mut angle = || polarization_projectors(rng.gen_range(-PI..PI));
    let friends = (0..rounds).map(|_| angle()).collect();
    let fin = angle();
    let bob = vec![angle(), angle()];
    SequentialProtocol::new(psi, friends, fin, bob).unwrap()
}

fn criterion_6() -> Check {
    let mut worst = 0.0f64;
    let mut reversal = 0.0f64;
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let proto = random_protocol(&mut rng);
        let seq = sequential_behaviour(&proto).unwrap();
        let born = born_behaviour(&proto.initial_state, &proto.alice_settings(), &proto.bob_measurements).unwrap();
        worst = worst.max(seq.max_raw_distance(&born));
        reversal = reversal.max(reversal_error(&proto).unwrap());
    }
    let (psi, _, bob) = ch_demo_setup();
    let proto = SequentialProtocol::new(
        psi,
        vec![polarization_projectors(0.0), polarization_projectors(PI / 4.0)],
        polarization_projectors(0.0),
        bob,
    )
    .unwrap();
    let seq = sequential_behaviour(&proto).unwrap();
    let row = ch_row_lifted(seq.exact.scenario(), [0, 1], [0, 1]).unwrap();
    let v = -to_f64(&evaluate_inequality(&row, &seq.exact).unwrap());
    check(
        worst < 1e-10 && reversal < 1e-12 && (v - target()).abs() < 1e-10,
        format!("8 protocols, max deviation {worst:.1e}, reversal error {reversal:.1e}, sequential CH value {v:.12}"),
    )
}

/// Cross-module invariants at acceptance scale.
fn criterion_7() -> Check {
    let s = Scenario::chsh();
    let ld = ld_vertices(&s);
    let ns = ns_vertices(&s).unwrap();
    let subsets: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1], vec![0, 1]];
    let mut failures = Vec::new();

    // Inclusion chain LD ⊆ PD ⊆ NS and monotonicity in I_X.
    for ix in &subsets {
        for iy in &subsets {
            let pd = pd_vertices(&PdSpec::new(s.clone(), ix.clone(), iy.clone()).unwrap()).unwrap();
            for (name, inner, outer) in [("ld in pd", &ld, &pd), ("pd in ns", &pd, &ns)] {
                for p in inner.vertices() {
                    match membership(p, outer).unwrap() {
                        MembershipResult::Inside { weights } if certify_inside(p, outer, &weights) => {}
                        _ => failures.push(format!("{name} {ix:?} {iy:?}")),
                    }
                }
            }
            for extra in 0..2 {
                if ix.contains(&extra) {
                    continue;
                }
                let mut bigger = ix.clone();
                bigger.push(extra);
                let smaller = pd_vertices(&PdSpec::new(s.clone(), bigger, iy.clone()).unwrap()).unwrap();
                if !smaller.vertices().iter().all(|p| membership(p, &pd).unwrap().is_inside()) {
                    failures.push(format!("monotonicity {ix:?}+{extra} {iy:?}"));
                }
            }
        }
    }

    // Normalisation and no-signalling of every constructed vertex.
    for v in ns.vertices() {
        let p = Behaviour::new(s.clone(), v.clone()).unwrap();
        if !(p.is_valid() && p.is_no_signalling()) {
            failures.push("ns vertex invalid".into());
        }
    }

    // DD round trips.
    for (name, v) in [("ld", &ld), ("ns", &ns)] {
        let back = vertex_enum(&facet_enum(v).unwrap()).unwrap();
        if back.sorted().vertices() != v.sorted().vertices() {
            failures.push(format!("{name} round trip"));
        }
    }
    let h = lfpoly::models::ns_hrep(&s);
    let again = facet_enum(&vertex_enum(&h).unwrap()).unwrap();
    if vertex_enum(&again).unwrap().sorted().vertices() != ns.sorted().vertices() {
        failures.push("ns H round trip".into());
    }

    // CH orbit values on LD vertices lie in [-2, 0] with 0 attained.
    for r in ch_inequalities(&s).unwrap() {
        let vals: Vec<Rational> = ld.vertices().iter().map(|p| -r.eval(p)).collect();
        if !(vals.iter().all(|v| *v <= int(0) && *v >= int(-2)) && vals.iter().any(Zero::is_zero)) {
            failures.push("ch range".into());
        }
    }
    let max_pr = ns
        .vertices()
        .iter()
        .map(|p| -ch_row(&s).unwrap().eval(p))
        .max()
        .unwrap();
    if max_pr != Rational::new(1.into(), 2.into()) {
        failures.push("pr value".into());
    }

    // Empty V-polytope handling.
    if facet_enum(&VPolytope::from_extreme_points(2, vec![]).unwrap()).is_ok() {
        failures.push("empty polytope".into());
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "inclusion chain, monotonicity, NS validity, DD round trips, CH ranges".to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("1 quantum CH value", criterion_1, Duration::from_secs(1)),
        ("2 CHSH polytope structure", criterion_2, Duration::from_secs(10)),
        ("3 one-free-input collapse", criterion_3, Duration::from_secs(120)),
        ("4 LF gap", criterion_4, Duration::from_secs(600)),
        ("5 sequential LF equals LD", criterion_5, Duration::from_secs(900)),
        ("6 sequential-quantum consistency", criterion_6, Duration::from_secs(30)),
        ("7 property suites", criterion_7, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let t = Instant::now();
        let c = run();
        let dt = t.elapsed().saturating_sub(c.oracle);
        let ok = c.ok && dt < limit;
        if !ok {
            failed += 1;
        }
        let oracle = if c.oracle.is_zero() {
            String::new()
        } else {
            format!(", oracle {:.2?}", c.oracle)
        };
        println!(
            "criterion {name}: {} [{dt:.2?} / limit {limit:?}{oracle}] {}",
            if ok { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
