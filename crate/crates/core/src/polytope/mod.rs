//! Exact convex-polytope machinery.
//!
//! Inequalities use offset form: a row `(offset, coeffs)` means
//! `offset + coeffs·p >= 0` (or `= 0` for equalities).

mod convert;
mod dd;
mod format;
pub(crate) mod lp;
mod membership;
mod symmetry;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, primitive_integer_row, Rational};

pub use convert::{facet_enum, vertex_enum};
pub use membership::{
    certify_inside, certify_outside, compare_polytopes, membership, polytope_equal,
    MembershipOracle, PolytopeComparison,
};
pub use symmetry::{canonicalize_inequality, CanonicalForm, SymmetryGroup};

/// An affine row `offset + coeffs·p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub offset: Rational,
    pub coeffs: Vec<Rational>,
}

impl Inequality {
    pub fn new(offset: Rational, coeffs: Vec<Rational>) -> Self {
        Inequality { offset, coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Inequality {
            offset: Rational::zero(),
            coeffs: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `offset + coeffs·p`. Panics on dimension mismatch; see
    /// [`crate::evaluate_inequality`] for the checked version.
    pub fn eval(&self, p: &[Rational]) -> Rational {
        assert_eq!(p.len(), self.coeffs.len(), "dimension mismatch");
        let mut acc = self.offset.clone();
        for (c, x) in self.coeffs.iter().zip(p) {
            if !c.is_zero() && !x.is_zero() {
                acc += c * x;
            }
        }
        acc
    }

    pub fn has_zero_coeffs(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn negated(&self) -> Self {
        Inequality {
            offset: -self.offset.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// Positive rescaling to a primitive integer row. Preserves the
    /// meaning of `>= 0`.
    pub fn normalized(&self) -> Self {
        let mut all = Vec::with_capacity(self.dim() + 1);
        all.push(self.offset.clone());
        all.extend(self.coeffs.iter().cloned());
        let ints = primitive_integer_row(&all);
        let mut it = ints.into_iter().map(Rational::from_integer);
        Inequality {
            offset: it.next().expect("offset"),
            coeffs: it.collect(),
        }
    }

    /// Normalisation for equality rows: primitive integers with the first
    /// nonzero coefficient positive.
    pub fn normalized_equality(&self) -> Self {
        let n = self.normalized();
        let lead = n
            .coeffs
            .iter()
            .chain(std::iter::once(&n.offset))
            .find(|c| !c.is_zero());
        match lead {
            Some(c) if c.is_negative() => n.negated(),
            _ => n,
        }
    }

    pub(crate) fn from_row(row: &[Rational]) -> Self {
        Inequality {
            offset: row[0].clone(),
            coeffs: row[1..].to_vec(),
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.offset))?;
        for c in &self.coeffs {
            write!(f, " {}", format_rational(c))?;
        }
        Ok(())
    }
}

/// Inequality description `{ p : ineq_i(p) >= 0, eq_j(p) = 0 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    pub inequalities: Vec<Inequality>,
    pub equalities: Vec<Inequality>,
}

impl HPolytope {
    pub fn new(
        dim: usize,
        inequalities: Vec<Inequality>,
        equalities: Vec<Inequality>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("polytope dimension must be positive".into()));
        }
        for row in inequalities.iter().chain(&equalities) {
            if row.dim() != dim {
                return Err(Error::shape(dim, row.dim()));
            }
        }
        if inequalities.iter().any(Inequality::has_zero_coeffs) {
            return Err(Error::Invalid("zero inequality row".into()));
        }
        Ok(HPolytope {
            dim,
            inequalities,
            equalities,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.inequalities.iter().all(|r| !r.eval(p).is_negative())
            && self.equalities.iter().all(|r| r.eval(p).is_zero())
    }
}

/// Vertex description. Vertices are deduplicated; constructors that do not
/// already know their points are extreme strip the redundant ones.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<Rational>>,
}

impl VPolytope {
    /// Deduplicates and removes every point that is a convex combination of
    /// the others. First occurrences keep their relative order.
    pub fn new(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        let v = Self::from_extreme_points(dim, points)?;
        Ok(membership::remove_redundant(v))
    }

    /// Deduplicates only; the caller guarantees the points are extreme.
    pub fn from_extreme_points(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("polytope dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::shape(dim, p.len()));
        }
        let mut seen = std::collections::HashSet::new();
        let vertices = points
            .into_iter()
            .filter(|p| seen.insert(p.clone()))
            .collect();
        Ok(VPolytope { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices in lexicographic order.
    pub fn sorted(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.sort();
        VPolytope {
            dim: self.dim,
            vertices,
        }
    }

    pub fn contains_vertex(&self, p: &[Rational]) -> bool {
        self.vertices.iter().any(|v| v.as_slice() == p)
    }
}

/// Outcome of an exact membership query.
#[derive(Debug, Clone, PartialEq)]
pub enum MembershipResult {
    /// Convex weights, one per vertex, reproducing the query exactly.
    Inside { weights: Vec<Rational> },
    /// A row nonnegative on every vertex and negative at the query.
    Outside { separator: Inequality },
}

impl MembershipResult {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipResult::Inside { .. })
    }
}

pub use format::{parse_representation, Representation};
