//! LP membership with exact certificates, redundancy removal and polytope
//! equality.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::lp::{Lp, LpOutcome};
use super::{Inequality, MembershipResult, VPolytope};
use crate::error::{Error, Result};
use crate::linalg::AffineHull;
use crate::rational::Rational;

/// Precomputed affine chart of a V-polytope, reused across queries.
#[derive(Debug, Clone)]
pub struct MembershipOracle<'a> {
    polytope: &'a VPolytope,
    hull: AffineHull,
    chart_points: Vec<Vec<Rational>>,
    centroid: Vec<Rational>,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(polytope: &'a VPolytope) -> Result<Self> {
        if polytope.is_empty() {
            return Err(Error::Empty);
        }
        let hull = AffineHull::of(polytope.vertices(), polytope.dim());
        let chart_points: Vec<Vec<Rational>> =
            polytope.vertices().iter().map(|p| hull.project(p)).collect();
        let count = Rational::from_integer(chart_points.len().into());
        let centroid = (0..hull.dim)
            .map(|j| chart_points.iter().map(|u| &u[j]).sum::<Rational>() / &count)
            .collect();
        Ok(MembershipOracle {
            polytope,
            hull,
            chart_points,
            centroid,
        })
    }

    pub fn query(&self, p: &[Rational]) -> Result<MembershipResult> {
        if p.len() != self.polytope.dim() {
            return Err(Error::shape(self.polytope.dim(), p.len()));
        }
        if let Some(e) = self.hull.equalities.iter().find(|e| {
            let v = Inequality::from_row(e).eval(p);
            !v.is_zero()
        }) {
            let row = Inequality::from_row(e);
            let row = if row.eval(p).is_positive() {
                row.negated()
            } else {
                row
            };
            return Ok(MembershipResult::Outside {
                separator: row.normalized(),
            });
        }
        let target = self.hull.project(p);
        if let Some(weights) = self.convex_weights(&target) {
            return Ok(MembershipResult::Inside { weights });
        }
        Ok(MembershipResult::Outside {
            separator: self.deepest_facet(&target),
        })
    }

    fn convex_weights(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.chart_points.len();
        let mut a: Vec<Vec<Rational>> = (0..self.hull.dim)
            .map(|j| self.chart_points.iter().map(|u| u[j].clone()).collect())
            .collect();
        a.push(vec![Rational::one(); n]);
        let mut b = target.to_vec();
        b.push(Rational::one());
        match (Lp {
            a,
            b,
            c: vec![Rational::zero(); n],
        })
        .solve()
        {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }

    /// Facet of the polytope most violated at `target`, measured relative
    /// to its slack at the centroid. The optimum of this LP is a vertex of
    /// the normalised cone of valid inequalities, hence a facet.
    fn deepest_facet(&self, target: &[Rational]) -> Inequality {
        let k = self.hull.dim;
        let nv = self.chart_points.len();
        // Columns: s+, s-, c+ (k), c- (k), slack (nv).
        let ncols = 2 + 2 * k + nv;
        let free_coeffs = |point: &[Rational], sign: Rational| {
            let mut row = vec![Rational::zero(); ncols];
            row[0] = sign.clone();
            row[1] = -sign.clone();
            for j in 0..k {
                row[2 + j] = &sign * &point[j];
                row[2 + k + j] = -&sign * &point[j];
            }
            row
        };
        let mut a = Vec::with_capacity(nv + 1);
        let mut b = Vec::with_capacity(nv + 1);
        for (i, u) in self.chart_points.iter().enumerate() {
            // -(s + c·u) + slack = 0
            let mut row = free_coeffs(u, -Rational::one());
            row[2 + 2 * k + i] = Rational::one();
            a.push(row);
            b.push(Rational::zero());
        }
        a.push(free_coeffs(&self.centroid, Rational::one()));
        b.push(Rational::one());
        let c = free_coeffs(target, Rational::one());
        let x = match (Lp { a, b, c }).solve() {
            LpOutcome::Optimal { x, .. } => x,
            other => unreachable!("separation LP is feasible and bounded: {other:?}"),
        };
        let mut coeffs = vec![Rational::zero(); self.polytope.dim()];
        for (j, &col) in self.hull.chart.iter().enumerate() {
            coeffs[col] = &x[2 + j] - &x[2 + k + j];
        }
        Inequality::new(&x[0] - &x[1], coeffs).normalized()
    }
}

/// Exact membership of `p` in `conv(v)`.
pub fn membership(p: &[Rational], v: &VPolytope) -> Result<MembershipResult> {
    MembershipOracle::new(v)?.query(p)
}

/// Rechecks an Inside certificate from scratch.
pub fn certify_inside(p: &[Rational], v: &VPolytope, weights: &[Rational]) -> bool {
    if weights.len() != v.len() || p.len() != v.dim() {
        return false;
    }
    if weights.iter().any(Signed::is_negative) {
        return false;
    }
    if !weights.iter().sum::<Rational>().is_one() {
        return false;
    }
    (0..v.dim()).all(|j| {
        let s: Rational = v
            .vertices()
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(u, w)| w * &u[j])
            .sum();
        s == p[j]
    })
}

/// Rechecks an Outside certificate from scratch.
pub fn certify_outside(p: &[Rational], v: &VPolytope, separator: &Inequality) -> bool {
    separator.dim() == v.dim()
        && p.len() == v.dim()
        && separator.eval(p).is_negative()
        && v.vertices().iter().all(|u| !separator.eval(u).is_negative())
}

pub(crate) fn remove_redundant(v: VPolytope) -> VPolytope {
    if v.len() <= 1 {
        return v;
    }
    // 0/1 points are extreme in any subset of the unit cube; everything
    // else is tested against the hull of the remaining points.
    let in_cube = v
        .vertices()
        .iter()
        .flatten()
        .all(|x| !x.is_negative() && x <= &Rational::one());
    let keep: Vec<bool> = (0..v.len())
        .into_par_iter()
        .map(|i| {
            let p = &v.vertices()[i];
            if in_cube && p.iter().all(|x| x.is_zero() || x.is_one()) {
                return true;
            }
            let others: Vec<Vec<Rational>> = v
                .vertices()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, u)| u.clone())
                .collect();
            let rest = VPolytope::from_extreme_points(v.dim(), others).expect("same dim");
            !membership(p, &rest).expect("same dim").is_inside()
        })
        .collect();
    let vertices = v
        .vertices()
        .iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then(|| p.clone()))
        .collect();
    VPolytope::from_extreme_points(v.dim(), vertices).expect("same dim")
}

/// Membership certificates in both directions.
#[derive(Debug, Clone)]
pub struct PolytopeComparison {
    /// Each vertex of the first polytope tested against the second.
    pub forward: Vec<MembershipResult>,
    /// Each vertex of the second polytope tested against the first.
    pub backward: Vec<MembershipResult>,
}

impl PolytopeComparison {
    pub fn first_in_second(&self) -> bool {
        self.forward.iter().all(MembershipResult::is_inside)
    }

    pub fn second_in_first(&self) -> bool {
        self.backward.iter().all(MembershipResult::is_inside)
    }

    pub fn equal(&self) -> bool {
        self.first_in_second() && self.second_in_first()
    }
}

fn all_in(a: &VPolytope, b: &VPolytope) -> Result<Vec<MembershipResult>> {
    let oracle = MembershipOracle::new(b)?;
    a.vertices().par_iter().map(|p| oracle.query(p)).collect()
}

pub fn compare_polytopes(a: &VPolytope, b: &VPolytope) -> Result<PolytopeComparison> {
    if a.dim() != b.dim() {
        return Err(Error::shape(a.dim(), b.dim()));
    }
    Ok(PolytopeComparison {
        forward: all_in(a, b)?,
        backward: all_in(b, a)?,
    })
}

/// Same point set, decided by mutual membership of every vertex.
pub fn polytope_equal(a: &VPolytope, b: &VPolytope) -> bool {
    if a.dim() != b.dim() || a.is_empty() || b.is_empty() {
        return a.dim() == b.dim() && a.is_empty() == b.is_empty();
    }
    let inside = |x: &VPolytope, y: &VPolytope| {
        let oracle = MembershipOracle::new(y).expect("nonempty");
        x.vertices()
            .par_iter()
            .all(|p| oracle.query(p).expect("same dim").is_inside())
    };
    inside(a, b) && inside(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn square() -> VPolytope {
        VPolytope::from_extreme_points(
            2,
            vec![
                vec![int(0), int(0)],
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(1), int(1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn inside_with_weights() {
        let v = square();
        let p = vec![ratio(1, 2), ratio(1, 3)];
        match membership(&p, &v).unwrap() {
            MembershipResult::Inside { weights } => assert!(certify_inside(&p, &v, &weights)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vertex_is_its_own_decomposition() {
        let v = square();
        for (i, p) in v.vertices().iter().enumerate() {
            let MembershipResult::Inside { weights } = membership(p, &v).unwrap() else {
                panic!("vertex outside")
            };
            assert!(weights[i].is_one());
        }
    }

    #[test]
    fn outside_gives_facet() {
        let v = square();
        let p = vec![int(2), ratio(1, 2)];
        let MembershipResult::Outside { separator } = membership(&p, &v).unwrap() else {
            panic!("should be outside")
        };
        assert!(certify_outside(&p, &v, &separator));
        // Deepest facet is x <= 1.
        assert_eq!(separator, Inequality::new(int(1), vec![int(-1), int(0)]));
    }

    #[test]
    fn off_hull_point() {
        let seg = VPolytope::from_extreme_points(
            2,
            vec![vec![int(0), int(0)], vec![int(1), int(1)]],
        )
        .unwrap();
        let p = vec![int(1), int(0)];
        let MembershipResult::Outside { separator } = membership(&p, &seg).unwrap() else {
            panic!()
        };
        assert!(certify_outside(&p, &seg, &separator));
    }

    #[test]
    fn redundancy_removal() {
        let v = VPolytope::new(
            2,
            vec![
                vec![int(0), int(0)],
                vec![int(2), int(0)],
                vec![int(1), int(0)],
                vec![int(0), int(2)],
                vec![ratio(1, 2), ratio(1, 2)],
                vec![int(0), int(0)],
            ],
        )
        .unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn equality_is_order_independent() {
        let a = square();
        let mut pts = a.vertices().to_vec();
        pts.reverse();
        let b = VPolytope::from_extreme_points(2, pts).unwrap();
        assert!(polytope_equal(&a, &b));
        let tri = VPolytope::from_extreme_points(2, a.vertices()[..3].to_vec()).unwrap();
        assert!(!polytope_equal(&a, &tri));
        let cmp = compare_polytopes(&tri, &a).unwrap();
        assert!(cmp.first_in_second());
        assert!(!cmp.second_in_first());
    }

    #[test]
    fn dimension_mismatch() {
        let v = square();
        assert!(membership(&[int(0)], &v).is_err());
    }
}
