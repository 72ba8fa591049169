//! Scenario symmetries and canonical forms of inequalities.
//!
//! Two rows are scenario-equivalent when one maps to a positive multiple
//! of the other under relabelling, modulo the equalities of the
//! no-signalling affine hull. To make that syntactic, a row is summarised
//! by its values on the local deterministic points (which affinely span
//! the hull), scaled to a primitive integer vector. The group permutes
//! those points, and the canonical form is the lexicographically least
//! permuted value vector. The canonical row is rebuilt from it in a fixed
//! affine chart.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Inequality;
use crate::error::{Error, Result};
use crate::linalg::{rank, AffineHull};
use crate::models::{strategies, DeterministicStrategy};
use crate::rational::{primitive_integer_row, Rational};
use crate::scenario::{Behaviour, Scenario};

/// Largest group the closure will enumerate.
const MAX_GROUP_ORDER: usize = 500_000;

/// Coordinate permutations generated by input relabellings, per-input
/// outcome relabellings and (when the parties look alike) the party swap.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    scenario: Scenario,
    generators: Vec<Vec<usize>>,
    elements: Vec<Vec<usize>>,
    points: Vec<Vec<Rational>>,
    /// `point_perms[g][i]` is the index of the image of point `i` under `g`.
    point_perms: Vec<Vec<usize>>,
    chart: Vec<usize>,
    /// Affinely independent point indices and the inverse of their chart
    /// matrix `(1, u)`.
    basis: Vec<usize>,
    basis_inverse: Vec<Vec<Rational>>,
}

fn tuple_perm(s: &Scenario, f: impl Fn(usize, usize, usize, usize) -> (usize, usize, usize, usize)) -> Vec<usize> {
    s.tuples()
        .map(|(x, y, a, b)| {
            let (x, y, a, b) = f(x, y, a, b);
            s.idx(x, y, a, b)
        })
        .collect()
}

fn swap(v: usize, i: usize, j: usize) -> usize {
    if v == i {
        j
    } else if v == j {
        i
    } else {
        v
    }
}

impl SymmetryGroup {
    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        let s = scenario;
        let mut generators = Vec::new();
        for x in 0..s.alice_inputs() {
            if let Some(x2) = (x + 1..s.alice_inputs()).find(|&x2| s.alice_outcomes()[x2] == s.alice_outcomes()[x]) {
                generators.push(tuple_perm(s, |xx, y, a, b| (swap(xx, x, x2), y, a, b)));
            }
            for a in 0..s.alice_outcomes()[x].saturating_sub(1) {
                generators.push(tuple_perm(s, |xx, y, aa, b| {
                    (xx, y, if xx == x { swap(aa, a, a + 1) } else { aa }, b)
                }));
            }
        }
        for y in 0..s.bob_inputs() {
            if let Some(y2) = (y + 1..s.bob_inputs()).find(|&y2| s.bob_outcomes()[y2] == s.bob_outcomes()[y]) {
                generators.push(tuple_perm(s, |x, yy, a, b| (x, swap(yy, y, y2), a, b)));
            }
            for b in 0..s.bob_outcomes()[y].saturating_sub(1) {
                generators.push(tuple_perm(s, |x, yy, a, bb| {
                    (x, yy, a, if yy == y { swap(bb, b, b + 1) } else { bb })
                }));
            }
        }
        if s.alice_outcomes() == s.bob_outcomes() {
            generators.push(tuple_perm(s, |x, y, a, b| (y, x, b, a)));
        }

        let identity: Vec<usize> = (0..s.dim()).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
        let mut elements = vec![identity.clone()];
        let mut queue = VecDeque::from([identity]);
        while let Some(h) = queue.pop_front() {
            for g in &generators {
                let gh: Vec<usize> = h.iter().map(|&i| g[i]).collect();
                if seen.insert(gh.clone()) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(Error::ScaleGuard(format!(
                            "symmetry group exceeds {MAX_GROUP_ORDER} elements"
                        )));
                    }
                    elements.push(gh.clone());
                    queue.push_back(gh);
                }
            }
        }

        let strats: Vec<DeterministicStrategy> = strategies(s).collect();
        let points: Vec<Vec<Rational>> = strats.iter().map(|st| st.behaviour(s).into_coords()).collect();
        let support = |p: &[Rational]| -> Vec<usize> {
            p.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| i)
                .collect()
        };
        let index: HashMap<Vec<usize>, usize> =
            points.iter().enumerate().map(|(i, p)| (support(p), i)).collect();
        let point_perms = elements
            .iter()
            .map(|g| {
                points
                    .iter()
                    .map(|p| {
                        let mut img: Vec<usize> = support(p).into_iter().map(|i| g[i]).collect();
                        img.sort_unstable();
                        index[&img]
                    })
                    .collect()
            })
            .collect();

        let hull = AffineHull::of(&points, s.dim());
        let chart_rows: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| {
                let mut r = vec![Rational::one()];
                r.extend(hull.project(p));
                r
            })
            .collect();
        let mut basis = Vec::new();
        let mut chosen: Vec<Vec<Rational>> = Vec::new();
        for (i, r) in chart_rows.iter().enumerate() {
            chosen.push(r.clone());
            if rank(&chosen) == chosen.len() {
                basis.push(i);
                if basis.len() == hull.dim + 1 {
                    break;
                }
            } else {
                chosen.pop();
            }
        }
        let basis_inverse = invert(&chosen);

        Ok(SymmetryGroup {
            scenario: s.clone(),
            generators,
            elements,
            points,
            point_perms,
            chart: hull.chart,
            basis,
            basis_inverse,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// All group elements, identity first.
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn apply_vector(g: &[usize], p: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); p.len()];
        for (i, v) in p.iter().enumerate() {
            out[g[i]] = v.clone();
        }
        out
    }

    pub fn apply_row(g: &[usize], row: &Inequality) -> Inequality {
        Inequality::new(row.offset.clone(), Self::apply_vector(g, &row.coeffs))
    }

    pub fn apply_behaviour(g: &[usize], p: &Behaviour) -> Behaviour {
        Behaviour::new(p.scenario().clone(), Self::apply_vector(g, p.coords())).expect("same dim")
    }

    fn signature(&self, row: &Inequality) -> Vec<BigInt> {
        let values: Vec<Rational> = self.points.iter().map(|p| row.eval(p)).collect();
        primitive_integer_row(&values)
    }

    fn permuted(&self, sig: &[BigInt], g: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); sig.len()];
        for (i, v) in sig.iter().enumerate() {
            out[self.point_perms[g][i]] = v.clone();
        }
        out
    }

    /// Number of distinct images of the row's class and the number of group
    /// elements fixing it.
    pub fn orbit_and_stabilizer(&self, row: &Inequality) -> (usize, usize) {
        let sig = self.signature(row);
        let mut orbit = HashSet::new();
        let mut stab = 0;
        for g in 0..self.order() {
            let img = self.permuted(&sig, g);
            if img == sig {
                stab += 1;
            }
            orbit.insert(img);
        }
        (orbit.len(), stab)
    }

    /// True when the two rows agree as affine functions on the hull up to
    /// positive scaling.
    pub fn same_row_class(&self, a: &Inequality, b: &Inequality) -> bool {
        self.signature(a) == self.signature(b)
    }

    fn row_from_signature(&self, sig: &[BigInt]) -> Inequality {
        let rhs: Vec<Rational> = self
            .basis
            .iter()
            .map(|&i| Rational::from_integer(sig[i].clone()))
            .collect();
        let sol: Vec<Rational> = self
            .basis_inverse
            .iter()
            .map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum())
            .collect();
        let mut coeffs = vec![Rational::zero(); self.scenario.dim()];
        for (&c, v) in self.chart.iter().zip(&sol[1..]) {
            coeffs[c] = v.clone();
        }
        Inequality::new(sol[0].clone(), coeffs).normalized()
    }
}

fn invert(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let (reduced, pivots) = crate::linalg::rref(std::mem::take(&mut aug));
    assert_eq!(pivots, (0..n).collect::<Vec<_>>(), "basis matrix must be invertible");
    reduced.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Canonical representative of an inequality's symmetry class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    /// Lexicographically least primitive value vector on the local
    /// deterministic points over the group orbit.
    pub signature: Vec<BigInt>,
    /// The row reconstructed from `signature` in a fixed chart, normalised.
    pub row: Inequality,
}

pub fn canonicalize_inequality(ineq: &Inequality, group: &SymmetryGroup) -> Result<CanonicalForm> {
    if ineq.dim() != group.scenario.dim() {
        return Err(Error::shape(group.scenario.dim(), ineq.dim()));
    }
    let sig = group.signature(ineq);
    let mut best: Option<Vec<BigInt>> = None;
    for g in 0..group.order() {
        let img = group.permuted(&sig, g);
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    }
    let signature = best.expect("group has an identity");
    let row = group.row_from_signature(&signature);
    Ok(CanonicalForm { signature, row })
}
