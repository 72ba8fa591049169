//! Pure-state quantum behaviours.
//!
//! Amplitudes are `f64` complex; behaviours leave this module as exact
//! rationals through [`rationalize_behaviour`], with the unrounded values
//! kept alongside for tolerance checks.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{rationalize, Rational, RATIONALIZE_MAX_DEN, RATIONALIZE_TOL};
use crate::scenario::{Behaviour, Scenario};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for norms, idempotence, orthogonality and unitarity.
pub const QUANTUM_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A normalised pure state on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != amplitudes.len() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes do not match dims {dims:?}",
                amplitudes.len()
            )));
        }
        let amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > QUANTUM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(StateVector { amplitudes, dims })
    }

    /// Scales `amplitudes` to unit norm first.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new((v / c(norm)).iter().copied().collect(), dims)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::Bounds(format!("basis index {index} >= {total}")));
        }
        let mut amps = vec![Complex64::zero(); total];
        amps[index] = c(1.0);
        Self::new(amps, dims)
    }

    /// `(|HH⟩ + |VV⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![c(h), c(0.0), c(0.0), c(h)], vec![2, 2]).expect("normalised")
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        StateVector { amplitudes, dims }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
}

/// Complete set of orthogonal projectors; list order is outcome order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<CMatrix>,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidMeasurement(m));
        let Some(first) = projectors.first() else {
            return bad("no projectors".into());
        };
        let d = first.nrows();
        if d == 0 || projectors.iter().any(|p| p.nrows() != d || p.ncols() != d) {
            return bad("projectors must be square and of equal size".into());
        }
        let mut sum = CMatrix::zeros(d, d);
        for (k, p) in projectors.iter().enumerate() {
            if max_abs(&(p - p.adjoint())) > QUANTUM_TOL {
                return bad(format!("projector {k} is not Hermitian"));
            }
            if max_abs(&(p * p - p)) > QUANTUM_TOL {
                return bad(format!("projector {k} is not idempotent"));
            }
            for (l, q) in projectors.iter().enumerate().skip(k + 1) {
                if max_abs(&(p * q)) > QUANTUM_TOL {
                    return bad(format!("projectors {k} and {l} are not orthogonal"));
                }
            }
            sum += p;
        }
        if max_abs(&(sum - CMatrix::identity(d, d))) > QUANTUM_TOL {
            return bad("projectors do not sum to the identity".into());
        }
        Ok(ProjectiveMeasurement { projectors })
    }

    /// Rank-one projectors onto the given orthonormal vectors.
    pub fn from_basis(vectors: &[CVector]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| v * v.adjoint()).collect())
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }
}

/// Projectors onto `cos φ|H⟩ + sin φ|V⟩` (outcome +1, label 0) and its
/// orthogonal complement (outcome −1, label 1).
pub fn polarization_projectors(phi: f64) -> ProjectiveMeasurement {
    let (s, co) = phi.sin_cos();
    let plus = CVector::from_vec(vec![c(co), c(s)]);
    let minus = CVector::from_vec(vec![c(-s), c(co)]);
    ProjectiveMeasurement::from_basis(&[plus, minus]).expect("orthonormal pair")
}

/// An exact behaviour plus the floating-point values it was rounded from.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBehaviour {
    pub exact: Behaviour,
    pub raw: Vec<f64>,
}

impl QuantumBehaviour {
    /// Largest coordinate-wise distance between two raw behaviours.
    pub fn max_raw_distance(&self, other: &QuantumBehaviour) -> f64 {
        self.raw
            .iter()
            .zip(&other.raw)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Rounds `raw` to an exactly normalised, exactly no-signalling behaviour.
///
/// Only the free parameters are rounded: each party's marginals with the
/// last outcome dropped, and the joint terms with neither last outcome.
/// The remaining coordinates are then fixed by normalisation and
/// no-signalling. Marginals are averaged over the other party's inputs.
pub fn rationalize_behaviour(s: &Scenario, raw: &[f64]) -> Result<Behaviour> {
    if raw.len() != s.dim() {
        return Err(Error::shape(s.dim(), raw.len()));
    }
    let round = |v: f64| rationalize(v, RATIONALIZE_TOL, RATIONALIZE_MAX_DEN);
    let (ma, mb) = (s.alice_inputs(), s.bob_inputs());
    let alice: Vec<Vec<Rational>> = (0..ma)
        .map(|x| {
            (0..s.alice_outcomes()[x])
                .map(|a| {
                    let total: f64 = (0..mb)
                        .map(|y| (0..s.bob_outcomes()[y]).map(|b| raw[s.idx(x, y, a, b)]).sum::<f64>())
                        .sum();
                    round(total / mb as f64)
                })
                .collect()
        })
        .collect();
    let bob: Vec<Vec<Rational>> = (0..mb)
        .map(|y| {
            (0..s.bob_outcomes()[y])
                .map(|b| {
                    let total: f64 = (0..ma)
                        .map(|x| (0..s.alice_outcomes()[x]).map(|a| raw[s.idx(x, y, a, b)]).sum::<f64>())
                        .sum();
                    round(total / ma as f64)
                })
                .collect()
        })
        .collect();
    let mut coords = crate::scenario::zeros(s.dim());
    for x in 0..ma {
        for y in 0..mb {
            let (na, nb) = (s.alice_outcomes()[x], s.bob_outcomes()[y]);
            for a in 0..na - 1 {
                for b in 0..nb - 1 {
                    coords[s.idx(x, y, a, b)] = round(raw[s.idx(x, y, a, b)]);
                }
            }
            for a in 0..na - 1 {
                let rest: Rational = (0..nb - 1).map(|b| &coords[s.idx(x, y, a, b)]).sum();
                coords[s.idx(x, y, a, nb - 1)] = &alice[x][a] - rest;
            }
            for b in 0..nb - 1 {
                let rest: Rational = (0..na - 1).map(|a| &coords[s.idx(x, y, a, b)]).sum();
                coords[s.idx(x, y, na - 1, b)] = &bob[y][b] - rest;
            }
            let joint: Rational = (0..na - 1)
                .flat_map(|a| (0..nb - 1).map(move |b| (a, b)))
                .map(|(a, b)| &coords[s.idx(x, y, a, b)])
                .sum();
            let head: Rational = alice[x][..na - 1].iter().sum();
            let tail: Rational = bob[y][..nb - 1].iter().sum();
            coords[s.idx(x, y, na - 1, nb - 1)] = Rational::from_integer(1.into()) - head - tail + joint;
        }
    }
    let p = Behaviour::new(s.clone(), coords)?;
    p.validate()
        .map_err(|v| Error::InvalidState(format!("rounded behaviour is invalid: {v}")))?;
    Ok(p)
}

fn expectation(state: &CVector, op: &CMatrix) -> f64 {
    (state.adjoint() * (op * state))[(0, 0)].re
}

fn check_bipartite(state: &StateVector, alice: &[ProjectiveMeasurement], bob: &[ProjectiveMeasurement]) -> Result<()> {
    if state.dims.len() != 2 {
        return Err(Error::InvalidState(format!("expected a bipartite state, got dims {:?}", state.dims)));
    }
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::InvalidScenario("each party needs at least one measurement".into()));
    }
    for m in alice {
        if m.dim() != state.dims[0] {
            return Err(Error::shape(state.dims[0], m.dim()));
        }
    }
    for m in bob {
        if m.dim() != state.dims[1] {
            return Err(Error::shape(state.dims[1], m.dim()));
        }
    }
    Ok(())
}

fn scenario_of(alice: &[ProjectiveMeasurement], bob: &[ProjectiveMeasurement]) -> Result<Scenario> {
    Scenario::new(
        alice.iter().map(ProjectiveMeasurement::outcomes).collect(),
        bob.iter().map(ProjectiveMeasurement::outcomes).collect(),
    )
}

/// `p(ab|xy) = ⟨ψ| Π^x_a ⊗ Π^y_b |ψ⟩`.
pub fn born_behaviour(
    state: &StateVector,
    alice: &[ProjectiveMeasurement],
    bob: &[ProjectiveMeasurement],
) -> Result<QuantumBehaviour> {
    check_bipartite(state, alice, bob)?;
    let s = scenario_of(alice, bob)?;
    let raw: Vec<f64> = s
        .tuples()
        .map(|(x, y, a, b)| {
            let op = alice[x].projectors[a].kronecker(&bob[y].projectors[b]);
            expectation(&state.amplitudes, &op)
        })
        .collect();
    let exact = rationalize_behaviour(&s, &raw)?;
    Ok(QuantumBehaviour { exact, raw })
}

/// Cyclic shift `|j⟩ ↦ |j+1 mod d⟩`.
fn shift(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = c(1.0);
    }
    m
}

/// `U = Σ_k Π_k ⊗ S^k` on system ⊗ register, with `S` the cyclic shift.
/// From the ready state `|0⟩` it writes outcome `k` into the register.
pub fn dilate_measurement(m: &ProjectiveMeasurement, register_dim: usize) -> Result<CMatrix> {
    if register_dim < m.outcomes() {
        return Err(Error::RegisterTooSmall {
            register: register_dim,
            outcomes: m.outcomes(),
        });
    }
    let s = shift(register_dim);
    let mut power = CMatrix::identity(register_dim, register_dim);
    let n = m.dim() * register_dim;
    let mut u = CMatrix::zeros(n, n);
    for p in &m.projectors {
        u += p.kronecker(&power);
        power = &s * power;
    }
    Ok(u)
}

/// Sequential friend protocol: Charlie measures `friend_measurements[i]` in
/// round `i`, the superobserver reverses each round before the next, and
/// the final Alice input measures the particle directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialProtocol {
    pub initial_state: StateVector,
    pub friend_measurements: Vec<ProjectiveMeasurement>,
    pub final_alice: ProjectiveMeasurement,
    pub bob_measurements: Vec<ProjectiveMeasurement>,
    pub friend_register_dim: usize,
}

impl SequentialProtocol {
    /// Uses the minimal register, one level per friend outcome.
    pub fn new(
        initial_state: StateVector,
        friend_measurements: Vec<ProjectiveMeasurement>,
        final_alice: ProjectiveMeasurement,
        bob_measurements: Vec<ProjectiveMeasurement>,
    ) -> Result<Self> {
        let register = friend_measurements
            .iter()
            .map(ProjectiveMeasurement::outcomes)
            .max()
            .unwrap_or(1);
        let p = SequentialProtocol {
            initial_state,
            friend_measurements,
            final_alice,
            bob_measurements,
            friend_register_dim: register,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.friend_measurements.is_empty() {
            return Err(Error::InvalidScenario("at least one round is required".into()));
        }
        check_bipartite(&self.initial_state, self.alice_settings().as_slice(), &self.bob_measurements)?;
        let needed = self.friend_measurements.iter().map(ProjectiveMeasurement::outcomes).max().unwrap_or(1);
        if self.friend_register_dim < needed {
            return Err(Error::RegisterTooSmall {
                register: self.friend_register_dim,
                outcomes: needed,
            });
        }
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.friend_measurements.len()
    }

    /// `z_1, …, z_R, final`: the Alice settings of the equivalent Bell test.
    pub fn alice_settings(&self) -> Vec<ProjectiveMeasurement> {
        let mut v = self.friend_measurements.clone();
        v.push(self.final_alice.clone());
        v
    }

    pub fn scenario(&self) -> Result<Scenario> {
        scenario_of(&self.alice_settings(), &self.bob_measurements)
    }
}

/// Joint evolution on particle ⊗ register ⊗ Bob.
struct Lab {
    unitaries: Vec<CMatrix>,
    d_reg: usize,
    d_bob: usize,
}

impl Lab {
    fn new(proto: &SequentialProtocol) -> Result<Self> {
        let d_bob = proto.initial_state.dims[1];
        let id_bob = CMatrix::identity(d_bob, d_bob);
        let unitaries = proto
            .friend_measurements
            .iter()
            .map(|m| Ok(dilate_measurement(m, proto.friend_register_dim)?.kronecker(&id_bob)))
            .collect::<Result<_>>()?;
        Ok(Lab {
            unitaries,
            d_reg: proto.friend_register_dim,
            d_bob,
        })
    }

    /// `ψ_{CB} ↦ ψ_C ⊗ |0⟩_F ⊗ ψ_B` with the register in the ready state.
    fn initial(&self, psi: &StateVector) -> CVector {
        let d_c = psi.dims[0];
        let mut out = CVector::zeros(d_c * self.d_reg * self.d_bob);
        for i in 0..d_c {
            for j in 0..self.d_bob {
                out[(i * self.d_reg) * self.d_bob + j] = psi.amplitudes[i * self.d_bob + j];
            }
        }
        out
    }

    /// Measure, then reverse, each round before `upto`, recording the
    /// largest deviation from the pre-measurement state.
    fn measure_and_reverse(&self, mut state: CVector, upto: usize, worst: &mut f64) -> CVector {
        for u in &self.unitaries[..upto] {
            let before = state.clone();
            state = u * state;
            state = u.adjoint() * state;
            *worst = worst.max((&state - &before).norm());
        }
        state
    }
}

fn sequential_run(proto: &SequentialProtocol) -> Result<(Vec<f64>, f64)> {
    proto.validate()?;
    let s = proto.scenario()?;
    let lab = Lab::new(proto)?;
    let rounds = proto.rounds();
    let d_c = proto.initial_state.dims[0];
    let id_c = CMatrix::identity(d_c, d_c);
    let id_reg = CMatrix::identity(lab.d_reg, lab.d_reg);
    let start = lab.initial(&proto.initial_state);
    let mut worst = 0.0f64;
    let mut raw = vec![0.0; s.dim()];
    for x in 0..=rounds {
        let state = if x < rounds {
            let prior = lab.measure_and_reverse(start.clone(), x, &mut worst);
            &lab.unitaries[x] * prior
        } else {
            lab.measure_and_reverse(start.clone(), rounds, &mut worst)
        };
        for y in 0..s.bob_inputs() {
            for a in 0..s.alice_outcomes()[x] {
                let alice_op = if x < rounds {
                    let mut readout = CMatrix::zeros(lab.d_reg, lab.d_reg);
                    readout[(a, a)] = c(1.0);
                    id_c.kronecker(&readout)
                } else {
                    proto.final_alice.projectors[a].kronecker(&id_reg)
                };
                for b in 0..s.bob_outcomes()[y] {
                    let op = alice_op.kronecker(&proto.bob_measurements[y].projectors[b]);
                    raw[s.idx(x, y, a, b)] = expectation(&state, &op);
                }
            }
        }
    }
    Ok((raw, worst))
}

/// Behaviour over `(ã, b | x̃, y)`: for `x̃ = i < R` rounds `0..i` are
/// measured and reversed, round `i` is measured and its register read; for
/// `x̃ = R` every round is reversed and the particle is measured with
/// `final_alice`.
pub fn sequential_behaviour(proto: &SequentialProtocol) -> Result<QuantumBehaviour> {
    let (raw, _) = sequential_run(proto)?;
    let exact = rationalize_behaviour(&proto.scenario()?, &raw)?;
    Ok(QuantumBehaviour { exact, raw })
}

/// Largest norm distance between a state and its image under one
/// measure-then-reverse round, over the whole protocol.
pub fn reversal_error(proto: &SequentialProtocol) -> Result<f64> {
    Ok(sequential_run(proto)?.1)
}

/// The CH setup: `|Φ+⟩`, Alice at `0, π/4`, Bob at `±π/8`.
pub fn ch_demo_setup() -> (StateVector, Vec<ProjectiveMeasurement>, Vec<ProjectiveMeasurement>) {
    use std::f64::consts::PI;
    (
        StateVector::phi_plus(),
        vec![polarization_projectors(0.0), polarization_projectors(PI / 4.0)],
        vec![polarization_projectors(PI / 8.0), polarization_projectors(-PI / 8.0)],
    )
}

/// Parsed quantum-setup text.
///
/// ```text
/// dims 2 2
/// 0.7071067811865476 0
/// 0 0
/// 0 0
/// 0.7071067811865476 0
/// alice: 0 0.7853981633974483
/// bob: 0.39269908169872414 -0.39269908169872414
/// ```
///
/// Amplitude lines are `re im`. A `<role>: angles...` line appends one
/// polarization measurement per angle. `<role>-projectors k` appends one
/// measurement whose `k` projectors follow as `d` rows of `re im` pairs
/// each. Roles are free-form (`alice`, `bob`, `friend`, `final`, …);
/// `register d` sets a register dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSetup {
    pub state: StateVector,
    pub measurements: BTreeMap<String, Vec<ProjectiveMeasurement>>,
    pub register: Option<usize>,
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("bad number {tok:?}")))
}

fn complex_row(line: usize, text: &str, width: usize) -> Result<Vec<Complex64>> {
    let nums: Vec<f64> = text
        .split_whitespace()
        .map(|t| parse_f64(line, t))
        .collect::<Result<_>>()?;
    if nums.len() != 2 * width {
        return Err(Error::parse(line, format!("expected {width} `re im` pairs")));
    }
    Ok(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

impl QuantumSetup {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .peekable();
        let (n, head) = lines.next().ok_or_else(|| Error::parse(0, "empty setup"))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.first() != Some(&"dims") || toks.len() < 2 {
            return Err(Error::parse(n, "expected `dims d1 d2 ...`"));
        }
        let dims: Vec<usize> = toks[1..]
            .iter()
            .map(|t| t.parse().map_err(|_| Error::parse(n, "bad dimension")))
            .collect::<Result<_>>()?;
        let total: usize = dims.iter().product();
        let mut amps = Vec::with_capacity(total);
        for _ in 0..total {
            let (n, l) = lines.next().ok_or_else(|| Error::parse(n, "missing amplitude lines"))?;
            amps.extend(complex_row(n, l, 1)?);
        }
        let state = StateVector::new(amps, dims.clone()).map_err(|e| Error::parse(n, e.to_string()))?;

        let mut measurements: BTreeMap<String, Vec<ProjectiveMeasurement>> = BTreeMap::new();
        let mut register = None;
        while let Some((n, line)) = lines.next() {
            if let Some((role, rest)) = line.split_once(':') {
                let role = role.trim().to_string();
                let ms = rest
                    .split_whitespace()
                    .map(|t| parse_f64(n, t).map(polarization_projectors))
                    .collect::<Result<Vec<_>>>()?;
                measurements.entry(role).or_default().extend(ms);
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["register", d] => {
                    register = Some(d.parse().map_err(|_| Error::parse(n, "bad register dimension"))?);
                }
                [head, k] if head.ends_with("-projectors") => {
                    let role = head.trim_end_matches("-projectors").to_string();
                    let k: usize = k.parse().map_err(|_| Error::parse(n, "bad projector count"))?;
                    let d = match role.as_str() {
                        "bob" if dims.len() > 1 => dims[1],
                        _ => dims[0],
                    };
                    let mut projectors = Vec::with_capacity(k);
                    for _ in 0..k {
                        let mut entries = Vec::with_capacity(d * d);
                        for _ in 0..d {
                            let (m, l) = lines.next().ok_or_else(|| Error::parse(n, "missing projector rows"))?;
                            entries.extend(complex_row(m, l, d)?);
                        }
                        projectors.push(CMatrix::from_row_slice(d, d, &entries));
                    }
                    let m = ProjectiveMeasurement::new(projectors).map_err(|e| Error::parse(n, e.to_string()))?;
                    measurements.entry(role).or_default().push(m);
                }
                _ => return Err(Error::parse(n, format!("unexpected line {line:?}"))),
            }
        }
        Ok(QuantumSetup {
            state,
            measurements,
            register,
        })
    }

    pub fn role(&self, name: &str) -> Result<&[ProjectiveMeasurement]> {
        self.measurements
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Invalid(format!("setup has no `{name}` measurements")))
    }

    /// Uses roles `alice` and `bob`.
    pub fn born(&self) -> Result<QuantumBehaviour> {
        born_behaviour(&self.state, self.role("alice")?, self.role("bob")?)
    }

    /// Uses roles `friend`, `final` (exactly one) and `bob`.
    pub fn protocol(&self) -> Result<SequentialProtocol> {
        let fin = self.role("final")?;
        if fin.len() != 1 {
            return Err(Error::Invalid("exactly one `final` measurement is required".into()));
        }
        let mut p = SequentialProtocol::new(
            self.state.clone(),
            self.role("friend")?.to_vec(),
            fin[0].clone(),
            self.role("bob")?.to_vec(),
        )?;
        if let Some(d) = self.register {
            p.friend_register_dim = d;
            p.validate()?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ch_row, evaluate_inequality};
    use crate::rational::to_f64;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn polarization_basics() {
        let m = polarization_projectors(0.0);
        assert!(close(m.projectors[0][(0, 0)].re, 1.0, 1e-15));
        assert!(close(m.projectors[1][(1, 1)].re, 1.0, 1e-15));
        let m = polarization_projectors(PI / 4.0);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!(close(m.projectors[0][(i, j)].re, 0.5, 1e-15));
        }
        assert!(close(m.projectors[1][(0, 1)].re, -0.5, 1e-15));
        let m = polarization_projectors(PI / 8.0);
        let sum = &m.projectors[0] + &m.projectors[1];
        assert!(max_abs(&(sum - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn measurement_validation() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(ProjectiveMeasurement::new(vec![h.clone()]).is_err());
        assert!(ProjectiveMeasurement::new(vec![h.clone(), h.clone()]).is_err());
        let half = CMatrix::from_element(2, 2, c(0.5));
        assert!(ProjectiveMeasurement::new(vec![h, half]).is_err());
        assert!(ProjectiveMeasurement::new(vec![]).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(StateVector::new(vec![c(1.0), c(1.0)], vec![2]).is_err());
        assert!(StateVector::new(vec![c(1.0)], vec![2]).is_err());
        assert!(StateVector::normalized(vec![c(1.0), c(1.0)], vec![2]).is_ok());
    }

    #[test]
    fn ch_demo_value_and_hand_born_rule() {
        let (psi, a, b) = ch_demo_setup();
        let q = born_behaviour(&psi, &a, &b).unwrap();
        let s = Scenario::chsh();
        // ⟨Φ+|(|0⟩⟨0| ⊗ |π/8⟩⟨π/8|)|Φ+⟩ = |⟨π/8|0⟩|²/2.
        let hand = (PI / 8.0).cos().powi(2) / 2.0;
        assert!(close(q.raw[s.idx(0, 0, 0, 0)], hand, 1e-14));
        assert!(close(to_f64(q.exact.get(0, 0, 0, 0).unwrap()), hand, 1e-10));
        let value = -to_f64(&evaluate_inequality(&ch_row(&s).unwrap(), &q.exact).unwrap());
        assert!(close(value, (2f64.sqrt() - 1.0) / 2.0, 1e-10), "{value}");
        assert!(q.exact.is_valid() && q.exact.is_no_signalling());
    }

    #[test]
    fn product_state_factorises() {
        let hh = StateVector::basis(vec![2, 2], 0).unwrap();
        let a = vec![polarization_projectors(0.3), polarization_projectors(1.1)];
        let b = vec![polarization_projectors(-0.4), polarization_projectors(0.9)];
        let q = born_behaviour(&hh, &a, &b).unwrap();
        let s = Scenario::chsh();
        for (x, y, ai, bi) in s.tuples() {
            let pa = a[x].projectors[ai][(0, 0)].re;
            let pb = b[y].projectors[bi][(0, 0)].re;
            assert!(close(q.raw[s.idx(x, y, ai, bi)], pa * pb, 1e-14));
        }
    }

    #[test]
    fn born_rejects_mismatched_dims() {
        let psi = StateVector::basis(vec![3, 2], 0).unwrap();
        let (_, a, b) = ch_demo_setup();
        assert!(born_behaviour(&psi, &a, &b).is_err());
        let single = StateVector::basis(vec![4], 0).unwrap();
        assert!(born_behaviour(&single, &a, &b).is_err());
    }

    #[test]
    fn dilation_writes_pointer() {
        let m = polarization_projectors(0.0);
        let u = dilate_measurement(&m, 2).unwrap();
        let (al, be) = (0.6, 0.8);
        // (α|H⟩ + β|V⟩) ⊗ |0⟩ ↦ α|H⟩|0⟩ + β|V⟩|1⟩.
        let input = CVector::from_vec(vec![c(al), c(0.0), c(be), c(0.0)]);
        let out = &u * input;
        let expect = CVector::from_vec(vec![c(al), c(0.0), c(0.0), c(be)]);
        assert!((out - expect).norm() < 1e-15);
        let id = CMatrix::identity(4, 4);
        assert!(max_abs(&(u.adjoint() * &u - id)) < QUANTUM_TOL);
        assert!(matches!(
            dilate_measurement(&m, 1),
            Err(Error::RegisterTooSmall { register: 1, outcomes: 2 })
        ));
    }

    #[test]
    fn dilation_of_phi_plus_pointer_state() {
        let m = polarization_projectors(0.0);
        let u = dilate_measurement(&m, 2).unwrap();
        let input = CVector::from_vec(vec![c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)]);
        let out = u * input;
        assert!(close(out[0].re, FRAC_1_SQRT_2, 1e-15));
        assert!(close(out[3].re, FRAC_1_SQRT_2, 1e-15));
    }

    #[test]
    fn sequential_matches_born_on_ch_setup() {
        let (psi, a, b) = ch_demo_setup();
        let proto = SequentialProtocol::new(psi.clone(), a.clone(), polarization_projectors(0.2), b.clone()).unwrap();
        let seq = sequential_behaviour(&proto).unwrap();
        let born = born_behaviour(&psi, &proto.alice_settings(), &b).unwrap();
        assert!(seq.max_raw_distance(&born) < 1e-10);
        assert!(reversal_error(&proto).unwrap() < QUANTUM_TOL);
        assert!(seq.exact.is_no_signalling());
    }

    #[test]
    fn single_round_matches_direct_measurement() {
        let psi = StateVector::phi_plus();
        let z = polarization_projectors(0.7);
        let b = vec![polarization_projectors(0.1)];
        let proto = SequentialProtocol::new(psi.clone(), vec![z.clone()], z.clone(), b.clone()).unwrap();
        let seq = sequential_behaviour(&proto).unwrap();
        let s = proto.scenario().unwrap();
        for a in 0..2 {
            for bi in 0..2 {
                assert!(close(seq.raw[s.idx(0, 0, a, bi)], seq.raw[s.idx(1, 0, a, bi)], 1e-12));
            }
        }
    }

    #[test]
    fn larger_register_is_allowed() {
        let (psi, a, b) = ch_demo_setup();
        let mut proto = SequentialProtocol::new(psi.clone(), a.clone(), a[0].clone(), b.clone()).unwrap();
        proto.friend_register_dim = 3;
        let wide = sequential_behaviour(&proto).unwrap();
        proto.friend_register_dim = 2;
        let narrow = sequential_behaviour(&proto).unwrap();
        assert!(wide.max_raw_distance(&narrow) < 1e-12);
        proto.friend_register_dim = 1;
        assert!(sequential_behaviour(&proto).is_err());
    }

    #[test]
    fn rationalised_behaviour_is_exactly_consistent() {
        let s = Scenario::new(vec![2, 3], vec![3, 2]).unwrap();
        let raw: Vec<f64> = Behaviour::uniform(&s).coords().iter().map(to_f64).collect();
        let p = rationalize_behaviour(&s, &raw).unwrap();
        assert_eq!(p, Behaviour::uniform(&s));
        assert!(rationalize_behaviour(&s, &raw[1..]).is_err());
    }

    #[test]
    fn setup_text() {
        let text = "dims 2 2\n0.7071067811865476 0\n0 0\n0 0\n0.7071067811865476 0\n\
                    alice: 0 0.7853981633974483\nbob: 0.39269908169872414 -0.39269908169872414\n\
                    friend: 0\nfinal-projectors 2\n1 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 1 0\nregister 3\n";
        let setup = QuantumSetup::parse(text).unwrap();
        assert_eq!(setup.role("alice").unwrap().len(), 2);
        let q = setup.born().unwrap();
        let (psi, a, b) = ch_demo_setup();
        assert!(q.max_raw_distance(&born_behaviour(&psi, &a, &b).unwrap()) < 1e-12);
        let p = setup.protocol().unwrap();
        assert_eq!(p.friend_register_dim, 3);
        assert!(QuantumSetup::parse("dims 2\n1 0\n").is_err());
        assert!(QuantumSetup::parse("dims 2\n1 0\n0 0\nalice: x\n").is_err());
        assert!(QuantumSetup::parse("dims 2\n1 0\n0 0\nwhat\n").is_err());
    }

    fn random_protocol(seed: [f64; 7]) -> SequentialProtocol {
        let (t, ph) = (seed[0], seed[1]);
        let psi = StateVector::normalized(
            vec![
                Complex64::from_polar(t.cos(), 0.0),
                Complex64::from_polar(0.3 * t.sin(), ph),
                Complex64::from_polar(0.2, -ph),
                Complex64::from_polar(t.sin(), 0.5),
            ],
            vec![2, 2],
        )
        .unwrap();
        SequentialProtocol::new(
            psi,
            vec![polarization_projectors(seed[2]), polarization_projectors(seed[3])],
            polarization_projectors(seed[4]),
            vec![polarization_projectors(seed[5]), polarization_projectors(seed[6])],
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sequential_equals_born(seed in proptest::array::uniform7(-3.0f64..3.0)) {
            let proto = random_protocol(seed);
            let seq = sequential_behaviour(&proto).unwrap();
            let born = born_behaviour(&proto.initial_state, &proto.alice_settings(), &proto.bob_measurements).unwrap();
            prop_assert!(seq.max_raw_distance(&born) < 1e-10);
            prop_assert!(reversal_error(&proto).unwrap() < QUANTUM_TOL);
            prop_assert!(seq.exact.is_no_signalling());
        }

        #[test]
        fn born_marginals_are_no_signalling(seed in proptest::array::uniform7(-3.0f64..3.0)) {
            let proto = random_protocol(seed);
            let q = born_behaviour(&proto.initial_state, &proto.alice_settings(), &proto.bob_measurements).unwrap();
            let s = q.exact.scenario().clone();
            for x in 0..s.alice_inputs() {
                for a in 0..2 {
                    let m: Vec<f64> = (0..s.bob_inputs())
                        .map(|y| (0..2).map(|b| q.raw[s.idx(x, y, a, b)]).sum())
                        .collect();
                    prop_assert!((m[0] - m[1]).abs() < 1e-12);
                }
            }
            for y in 0..s.bob_inputs() {
                for b in 0..2 {
                    let m: Vec<f64> = (0..s.alice_inputs())
                        .map(|x| (0..2).map(|a| q.raw[s.idx(x, y, a, b)]).sum())
                        .collect();
                    prop_assert!(m.iter().all(|v| (v - m[0]).abs() < 1e-12));
                }
            }
        }
    }
}
