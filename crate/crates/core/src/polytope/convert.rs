//! Vertex and facet enumeration.
//!
//! Both directions reduce to extreme rays of a homogenised cone solved by
//! [`super::dd`]. Equalities are eliminated first so the double description
//! runs in the polytope's own affine dimension.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dd::extreme_rays;
use super::{HPolytope, Inequality, VPolytope};
use crate::error::{Error, Result};
use crate::linalg::{rref, AffineHull};
use crate::rational::{primitive_integer_row, Rational};

/// Vertices of a bounded, nonempty H-polytope, in lexicographic order.
pub fn vertex_enum(h: &HPolytope) -> Result<VPolytope> {
    let n = h.dim();

    // Solve the equalities: p = base + Σ_f t_f · dir_f over free columns f.
    let eq_rows: Vec<Vec<Rational>> = h
        .equalities
        .iter()
        .map(|e| {
            let mut r = e.coeffs.clone();
            r.push(-e.offset.clone());
            r
        })
        .collect();
    let (reduced, pivots) = if eq_rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(eq_rows)
    };
    if pivots.last() == Some(&n) {
        // 0 = nonzero
        return Err(Error::Empty);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let k = free.len();
    let mut base = vec![Rational::zero(); n];
    let mut dirs = vec![vec![Rational::zero(); n]; k];
    for (fi, &f) in free.iter().enumerate() {
        dirs[fi][f] = Rational::one();
    }
    for (row, &p) in reduced.iter().zip(&pivots) {
        base[p] = row[n].clone();
        for (fi, &f) in free.iter().enumerate() {
            dirs[fi][p] = -row[f].clone();
        }
    }

    // Homogenised rows over (t0, t): t0 >= 0 and t0·b + (c·dir)·t >= 0.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(h.inequalities.len() + 1);
    let mut t0 = vec![BigInt::zero(); k + 1];
    t0[0] = BigInt::one();
    rows.push(t0);
    for ineq in &h.inequalities {
        let mut r = Vec::with_capacity(k + 1);
        r.push(ineq.eval(&base));
        for d in &dirs {
            r.push(
                ineq.coeffs
                    .iter()
                    .zip(d)
                    .filter(|(c, x)| !c.is_zero() && !x.is_zero())
                    .map(|(c, x)| c * x)
                    .sum(),
            );
        }
        if r[1..].iter().all(Zero::is_zero) {
            if r[0].is_negative() {
                return Err(Error::Empty);
            }
            continue;
        }
        rows.push(primitive_integer_row(&r));
    }

    let cone = extreme_rays(&rows, k + 1);
    let mut vertices = Vec::new();
    let mut recession = !cone.lineality.is_empty();
    for ray in &cone.rays {
        if ray[0].is_zero() {
            recession = true;
            continue;
        }
        let scale = Rational::from_integer(ray[0].clone());
        let mut p = base.clone();
        for (d, t) in dirs.iter().zip(&ray[1..]) {
            if t.is_zero() {
                continue;
            }
            let t = Rational::from_integer(t.clone()) / &scale;
            for (pi, di) in p.iter_mut().zip(d) {
                if !di.is_zero() {
                    *pi += &t * di;
                }
            }
        }
        vertices.push(p);
    }
    if vertices.is_empty() {
        return Err(Error::Empty);
    }
    if recession {
        return Err(Error::Unbounded);
    }
    vertices.sort();
    VPolytope::from_extreme_points(n, vertices)
}

/// Minimal H-representation of the convex hull of `v`: equalities spanning
/// the affine hull plus one inequality per facet, all normalised and
/// sorted.
pub fn facet_enum(v: &VPolytope) -> Result<HPolytope> {
    if v.is_empty() {
        return Err(Error::Empty);
    }
    let n = v.dim();
    let hull = AffineHull::of(v.vertices(), n);
    let mut equalities: Vec<Inequality> = hull
        .equalities
        .iter()
        .map(|e| Inequality::from_row(e).normalized_equality())
        .collect();
    equalities.sort();

    let mut inequalities = Vec::new();
    if hull.dim > 0 {
        let mut rows: Vec<Vec<BigInt>> = v
            .vertices()
            .iter()
            .map(|p| {
                let mut r = Vec::with_capacity(hull.dim + 1);
                r.push(Rational::one());
                r.extend(hull.project(p));
                primitive_integer_row(&r)
            })
            .collect();
        rows.sort();
        let cone = extreme_rays(&rows, hull.dim + 1);
        debug_assert!(cone.lineality.is_empty(), "chart must be full dimensional");
        for ray in cone.rays {
            let mut coeffs = vec![Rational::zero(); n];
            for (&c, val) in hull.chart.iter().zip(&ray[1..]) {
                coeffs[c] = Rational::from_integer(val.clone());
            }
            inequalities.push(Inequality::new(Rational::from_integer(ray[0].clone()), coeffs));
        }
    }
    inequalities.sort();
    HPolytope::new(n, inequalities, equalities)
}
