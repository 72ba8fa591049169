//! Vertex constructions for the correlation polytopes of Bell and
//! sequential Wigner's-friend scenarios, and the CH inequality family.

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polytope::{vertex_enum, HPolytope, Inequality, SymmetryGroup, VPolytope};
use crate::rational::{int, Rational};
use crate::scenario::{Behaviour, Scenario};

/// A local deterministic strategy: one outcome per input for each party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    /// `p(ab|xy) = [a = alice(x)]·[b = bob(y)]`.
    pub fn behaviour(&self, s: &Scenario) -> Behaviour {
        let coords = s
            .tuples()
            .map(|(x, y, a, b)| {
                if self.alice[x] == a && self.bob[y] == b {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Behaviour::new(s.clone(), coords).expect("dimension matches")
    }
}

/// Mixed-radix enumeration of all assignments, last position fastest.
pub(crate) fn assignments(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut k| {
        let mut out = vec![0; radices.len()];
        for (slot, &r) in out.iter_mut().zip(radices).rev() {
            *slot = k % r;
            k /= r;
        }
        out
    })
}

/// All deterministic strategies, Alice's assignment varying slowest.
pub fn strategies(s: &Scenario) -> impl Iterator<Item = DeterministicStrategy> + '_ {
    assignments(s.alice_outcomes()).flat_map(move |alice| {
        assignments(s.bob_outcomes()).map(move |bob| DeterministicStrategy {
            alice: alice.clone(),
            bob,
        })
    })
}

/// Local deterministic polytope: one vertex per deterministic strategy.
pub fn ld_vertices(s: &Scenario) -> VPolytope {
    let pts = strategies(s).map(|st| st.behaviour(s).into_coords()).collect();
    VPolytope::from_extreme_points(s.dim(), pts).expect("dimension matches")
}

/// Positivity, normalisation and no-signalling constraints.
///
/// No-signalling rows compare each marginal against the one at the first
/// input of the other party, so scenarios with a single input per party
/// emit none.
pub fn ns_hrep(s: &Scenario) -> HPolytope {
    let dim = s.dim();
    let unit = |i: usize| {
        let mut c = vec![Rational::zero(); dim];
        c[i] = Rational::one();
        Inequality::new(Rational::zero(), c)
    };
    let inequalities = (0..dim).map(unit).collect();
    let mut equalities = Vec::new();
    for x in 0..s.alice_inputs() {
        for y in 0..s.bob_inputs() {
            let mut c = vec![Rational::zero(); dim];
            for i in s.block(x, y) {
                c[i] = Rational::one();
            }
            equalities.push(Inequality::new(int(-1), c));
        }
    }
    for x in 0..s.alice_inputs() {
        for a in 0..s.alice_outcomes()[x] {
            for y in 1..s.bob_inputs() {
                let mut c = vec![Rational::zero(); dim];
                for b in 0..s.bob_outcomes()[y] {
                    c[s.idx(x, y, a, b)] += int(1);
                }
                for b in 0..s.bob_outcomes()[0] {
                    c[s.idx(x, 0, a, b)] -= int(1);
                }
                equalities.push(Inequality::new(Rational::zero(), c));
            }
        }
    }
    for y in 0..s.bob_inputs() {
        for b in 0..s.bob_outcomes()[y] {
            for x in 1..s.alice_inputs() {
                let mut c = vec![Rational::zero(); dim];
                for a in 0..s.alice_outcomes()[x] {
                    c[s.idx(x, y, a, b)] += int(1);
                }
                for a in 0..s.alice_outcomes()[0] {
                    c[s.idx(0, y, a, b)] -= int(1);
                }
                equalities.push(Inequality::new(Rational::zero(), c));
            }
        }
    }
    HPolytope::new(dim, inequalities, equalities).expect("well formed")
}

/// Extreme points of the no-signalling polytope.
pub fn ns_vertices(s: &Scenario) -> Result<VPolytope> {
    vertex_enum(&ns_hrep(s))
}

/// A partially deterministic polytope: Alice is deterministic on the inputs
/// in `det_alice`, Bob on those in `det_bob`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdSpec {
    pub scenario: Scenario,
    pub det_alice: Vec<usize>,
    pub det_bob: Vec<usize>,
}

impl PdSpec {
    pub fn new(scenario: Scenario, mut det_alice: Vec<usize>, mut det_bob: Vec<usize>) -> Result<Self> {
        det_alice.sort_unstable();
        det_alice.dedup();
        det_bob.sort_unstable();
        det_bob.dedup();
        if det_alice.iter().any(|&x| x >= scenario.alice_inputs()) {
            return Err(Error::Bounds("deterministic Alice input out of range".into()));
        }
        if det_bob.iter().any(|&y| y >= scenario.bob_inputs()) {
            return Err(Error::Bounds("deterministic Bob input out of range".into()));
        }
        Ok(PdSpec {
            scenario,
            det_alice,
            det_bob,
        })
    }
}

/// Extreme point of the no-signalling set restricted to a subset of inputs,
/// addressed with the original input labels. When one side keeps no inputs
/// only that side's marginals are meaningful.
struct ReducedPoint {
    joint: Option<Behaviour>,
    alice_marg: Vec<Vec<Rational>>,
    bob_marg: Vec<Vec<Rational>>,
}

fn reduced_points(s: &Scenario, keep_a: &[usize], keep_b: &[usize]) -> Result<Vec<ReducedPoint>> {
    let ao: Vec<usize> = keep_a.iter().map(|&x| s.alice_outcomes()[x]).collect();
    let bo: Vec<usize> = keep_b.iter().map(|&y| s.bob_outcomes()[y]).collect();
    let det_marg = |radices: &[usize], assign: &[usize]| -> Vec<Vec<Rational>> {
        radices
            .iter()
            .zip(assign)
            .map(|(&n, &o)| (0..n).map(|k| if k == o { int(1) } else { int(0) }).collect())
            .collect()
    };
    match (keep_a.is_empty(), keep_b.is_empty()) {
        (true, true) => Ok(vec![ReducedPoint {
            joint: None,
            alice_marg: vec![],
            bob_marg: vec![],
        }]),
        (true, false) => Ok(assignments(&bo)
            .map(|asg| ReducedPoint {
                joint: None,
                alice_marg: vec![],
                bob_marg: det_marg(&bo, &asg),
            })
            .collect()),
        (false, true) => Ok(assignments(&ao)
            .map(|asg| ReducedPoint {
                joint: None,
                alice_marg: det_marg(&ao, &asg),
                bob_marg: vec![],
            })
            .collect()),
        (false, false) => {
            let sub = Scenario::new(ao.clone(), bo.clone())?;
            let verts = ns_vertices(&sub)?;
            Ok(verts
                .vertices()
                .iter()
                .map(|v| {
                    let q = Behaviour::new(sub.clone(), v.clone()).expect("dim");
                    let alice_marg = (0..ao.len())
                        .map(|x| (0..ao[x]).map(|a| q.alice_marginal(a, x, 0).expect("ok")).collect())
                        .collect();
                    let bob_marg = (0..bo.len())
                        .map(|y| (0..bo[y]).map(|b| q.bob_marginal(b, 0, y).expect("ok")).collect())
                        .collect();
                    ReducedPoint {
                        joint: Some(q),
                        alice_marg,
                        bob_marg,
                    }
                })
                .collect())
        }
    }
}

/// Vertices of `PD_{I_X, I_Y}`.
///
/// Candidates combine an outcome assignment on the deterministic inputs of
/// each party with an extreme point `q` of the no-signalling polytope on the
/// remaining inputs: deterministic on both inputs gives `δ·δ`, on one gives
/// `δ` times `q`'s marginal for the other party, and on neither gives `q`
/// itself. Redundant candidates are removed.
pub fn pd_vertices(spec: &PdSpec) -> Result<VPolytope> {
    let s = &spec.scenario;
    let keep_a: Vec<usize> = (0..s.alice_inputs()).filter(|x| !spec.det_alice.contains(x)).collect();
    let keep_b: Vec<usize> = (0..s.bob_inputs()).filter(|y| !spec.det_bob.contains(y)).collect();
    let pos_a = |x: usize| keep_a.iter().position(|&k| k == x);
    let pos_b = |y: usize| keep_b.iter().position(|&k| k == y);
    let radix_a: Vec<usize> = spec.det_alice.iter().map(|&x| s.alice_outcomes()[x]).collect();
    let radix_b: Vec<usize> = spec.det_bob.iter().map(|&y| s.bob_outcomes()[y]).collect();
    let reduced = reduced_points(s, &keep_a, &keep_b)?;

    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for ca in assignments(&radix_a) {
        let det_a = |x: usize| spec.det_alice.iter().position(|&d| d == x).map(|i| ca[i]);
        for cb in assignments(&radix_b) {
            let det_b = |y: usize| spec.det_bob.iter().position(|&d| d == y).map(|i| cb[i]);
            for q in &reduced {
                let coords: Vec<Rational> = s
                    .tuples()
                    .map(|(x, y, a, b)| match (det_a(x), det_b(y)) {
                        (Some(ax), Some(by)) => int((a == ax && b == by) as i64),
                        (Some(ax), None) => {
                            if a == ax {
                                q.bob_marg[pos_b(y).expect("kept")][b].clone()
                            } else {
                                Rational::zero()
                            }
                        }
                        (None, Some(by)) => {
                            if b == by {
                                q.alice_marg[pos_a(x).expect("kept")][a].clone()
                            } else {
                                Rational::zero()
                            }
                        }
                        (None, None) => {
                            let j = q.joint.as_ref().expect("both sides kept");
                            j.get(pos_a(x).expect("kept"), pos_b(y).expect("kept"), a, b)
                                .expect("in range")
                                .clone()
                        }
                    })
                    .collect();
                if seen.insert(coords.clone()) {
                    points.push(coords);
                }
            }
        }
    }
    VPolytope::new(s.dim(), points)
}

/// Local Friendliness polytope with one friend per side, `PD_{{1},{1}}`
/// (input 0 in 0-based labels).
pub fn lf_vertices(s: &Scenario) -> Result<VPolytope> {
    if s.alice_inputs() < 2 || s.bob_inputs() < 2 {
        return Err(Error::InvalidScenario("LF needs at least two inputs per party".into()));
    }
    pd_vertices(&PdSpec::new(s.clone(), vec![0], vec![0])?)
}

/// Extreme-point label of the sequential polytope: friend outcomes for each
/// round and an index into the no-signalling extreme points of the
/// one-Alice-input reduced scenario.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwVertexLabel {
    pub friend_outcomes: Vec<usize>,
    pub ns_extreme_index: usize,
}

/// The sequential scenario's effective public scenario and its LF vertices.
#[derive(Debug, Clone)]
pub struct SwScenario {
    pub rounds: usize,
    pub scenario: Scenario,
    pub polytope: VPolytope,
    /// Label that first produced each vertex.
    pub labels: Vec<SwVertexLabel>,
    /// Extreme points `q_j` of the reduced scenario.
    pub reduced: Vec<Behaviour>,
}

/// Effective scenario of the sequential protocol: Alice inputs `1..=R` read
/// the friend (alphabet `friend_alphabet[i]`), input `R+1` is the final
/// fixed-basis measurement.
pub fn sw_scenario(friend_alphabet: &[usize], final_alphabet: usize, bob_outcomes: &[usize]) -> Result<Scenario> {
    if friend_alphabet.is_empty() {
        return Err(Error::InvalidScenario("at least one round is required".into()));
    }
    let mut alice = friend_alphabet.to_vec();
    alice.push(final_alphabet);
    Scenario::new(alice, bob_outcomes.to_vec())
}

/// LF vertices of the sequential scenario with `R = friend_alphabet.len()`
/// rounds.
///
/// For label `(c̄, j)`: `p(ã b | x̃=i, y) = δ_{ã,c_i} q_j(b|y)` for `i <= R`
/// and `q_j(ã b | y)` for the final input. Labels yielding the same point
/// are merged.
pub fn sw_vertices(friend_alphabet: &[usize], final_alphabet: usize, bob_outcomes: &[usize]) -> Result<SwScenario> {
    let scenario = sw_scenario(friend_alphabet, final_alphabet, bob_outcomes)?;
    let rounds = friend_alphabet.len();
    let sub = Scenario::new(vec![final_alphabet], bob_outcomes.to_vec())?;
    let reduced: Vec<Behaviour> = ns_vertices(&sub)?
        .vertices()
        .iter()
        .map(|v| Behaviour::new(sub.clone(), v.clone()).expect("dim"))
        .collect();

    let mut seen = HashSet::new();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for c in assignments(friend_alphabet) {
        for (j, q) in reduced.iter().enumerate() {
            let coords: Vec<Rational> = scenario
                .tuples()
                .map(|(x, y, a, b)| {
                    if x < rounds {
                        if a == c[x] {
                            q.bob_marginal(b, 0, y).expect("in range")
                        } else {
                            Rational::zero()
                        }
                    } else {
                        q.get(0, y, a, b).expect("in range").clone()
                    }
                })
                .collect();
            if seen.insert(coords.clone()) {
                points.push(coords);
                labels.push(SwVertexLabel {
                    friend_outcomes: c.clone(),
                    ns_extreme_index: j,
                });
            }
        }
    }
    let polytope = VPolytope::from_extreme_points(scenario.dim(), points)?;
    Ok(SwScenario {
        rounds,
        scenario,
        polytope,
        labels,
        reduced,
    })
}

fn require_chsh_shape(s: &Scenario) -> Result<()> {
    if s.alice_outcomes() != [2, 2] || s.bob_outcomes() != [2, 2] {
        return Err(Error::InvalidScenario(
            "CH inequalities need two binary inputs per party".into(),
        ));
    }
    Ok(())
}

/// The CH row in offset form, `-(LHS) >= 0`, where
/// `LHS = p(00|00) + p(00|01) + p(00|10) - p(00|11) - p_A(0|0) - p_B(0|0)`
/// and outcome `+1` is label 0. Marginals are read from the `y = 0` and
/// `x = 0` blocks.
pub fn ch_row(s: &Scenario) -> Result<Inequality> {
    require_chsh_shape(s)?;
    ch_row_lifted(s, [0, 1], [0, 1])
}

/// The CH row on Alice inputs `xs` and Bob inputs `ys` of a larger
/// scenario, zero elsewhere. `xs[0]` and `ys[0]` play the role of input 0.
pub fn ch_row_lifted(s: &Scenario, xs: [usize; 2], ys: [usize; 2]) -> Result<Inequality> {
    let binary = |outcomes: &[usize], i: [usize; 2]| {
        i[0] != i[1] && i.iter().all(|&k| outcomes.get(k).is_some_and(|&n| n >= 2))
    };
    if !binary(s.alice_outcomes(), xs) || !binary(s.bob_outcomes(), ys) {
        return Err(Error::InvalidScenario("CH needs two distinct inputs per party".into()));
    }
    let mut c = vec![Rational::zero(); s.dim()];
    let mut add = |x: usize, y: usize, a, b, v: i64| c[s.idx(xs[x], ys[y], a, b)] += int(v);
    add(0, 0, 0, 0, 1);
    add(0, 1, 0, 0, 1);
    add(1, 0, 0, 0, 1);
    add(1, 1, 0, 0, -1);
    for b in 0..s.bob_outcomes()[ys[0]] {
        add(0, 0, 0, b, -1);
    }
    for a in 0..s.alice_outcomes()[xs[0]] {
        add(0, 0, a, 0, -1);
    }
    Ok(Inequality::new(Rational::zero(), c).negated())
}

/// The 8 distinct rows in the symmetry orbit of the CH row, starting with
/// the CH row itself.
pub fn ch_inequalities(s: &Scenario) -> Result<Vec<Inequality>> {
    let base = ch_row(s)?;
    let group = SymmetryGroup::for_scenario(s)?;
    let mut rows: Vec<Inequality> = Vec::new();
    for g in group.elements() {
        let img = SymmetryGroup::apply_row(g, &base);
        if !rows.iter().any(|r| group.same_row_class(r, &img)) {
            rows.push(img);
        }
    }
    Ok(rows)
}

/// `offset + coeffs·p`, exactly.
pub fn evaluate_inequality(row: &Inequality, p: &Behaviour) -> Result<Rational> {
    if row.dim() != p.coords().len() {
        return Err(Error::Shape {
            expected: row.dim(),
            actual: p.coords().len(),
        });
    }
    Ok(row.eval(p.coords()))
}
