//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form. Returns the nonzero rows and their pivot
/// columns; pivots are chosen left to right so the result is unique.
pub fn rref(mut rows: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rref(rows.to_vec()).1.len()
}

/// Basis of `{ w : rows · w = 0 }`, one vector per free column.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (reduced, pivots) = rref(rows.to_vec());
    let mut basis = Vec::new();
    let mut pivot_iter = pivots.iter().peekable();
    let free: Vec<usize> = (0..ncols)
        .filter(|c| {
            if pivot_iter.peek() == Some(&c) {
                pivot_iter.next();
                false
            } else {
                true
            }
        })
        .collect();
    for f in free {
        let mut w = vec![Rational::zero(); ncols];
        w[f] = Rational::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            w[p] = -row[f].clone();
        }
        basis.push(w);
    }
    basis
}

/// Affine rank (dimension of the affine hull) of a point set; `None` for
/// the empty set.
pub fn affine_dimension(points: &[Vec<Rational>]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(if diffs.is_empty() { 0 } else { rank(&diffs) })
}

/// The affine hull of a point set, described by a coordinate chart and the
/// equalities that cut it out.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub dim: usize,
    /// Coordinates whose projection is injective on the hull.
    pub chart: Vec<usize>,
    /// Rows `(offset, coeffs)` with `offset + coeffs·p = 0` on the hull.
    pub equalities: Vec<Vec<Rational>>,
}

impl AffineHull {
    pub fn of(points: &[Vec<Rational>], ambient: usize) -> Self {
        let rows: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| {
                let mut r = Vec::with_capacity(ambient + 1);
                r.push(Rational::one());
                r.extend(p.iter().cloned());
                r
            })
            .collect();
        let (_, pivots) = rref(rows.clone());
        let chart: Vec<usize> = pivots.iter().filter(|&&c| c > 0).map(|c| c - 1).collect();
        let equalities = nullspace(&rows, ambient + 1);
        AffineHull {
            dim: chart.len(),
            chart,
            equalities,
        }
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.equalities.iter().all(|e| {
            let v: Rational = &e[0] + e[1..].iter().zip(p).map(|(c, x)| c * x).sum::<Rational>();
            v.is_zero()
        })
    }

    pub fn project(&self, p: &[Rational]) -> Vec<Rational> {
        self.chart.iter().map(|&c| p[c].clone()).collect()
    }
}
