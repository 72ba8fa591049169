//! Exact two-phase tableau simplex with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x >= 0` over the rationals. Columns that
//! already form a unit vector in a row with nonnegative right-hand side are
//! used as the starting basis; the remaining rows get artificials.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone)]
pub(crate) struct Lp {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is
    /// the right-hand side (for the objective row: minus the value).
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns allowed to enter.
    active: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        let m = self.m();
        loop {
            let obj = &self.rows[m];
            let Some(enter) = (0..self.active).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let rhs = self.rows[0].len() - 1;
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                let coef = &self.rows[i][enter];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][rhs] / coef;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

impl Lp {
    pub fn solve(&self) -> LpOutcome {
        let m = self.b.len();
        let n = self.c.len();
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        for i in 0..m {
            if b[i].is_negative() {
                b[i] = -b[i].clone();
                a[i].iter_mut().for_each(|v| *v = -v.clone());
            }
        }

        // Reuse existing unit columns as the initial basis where possible.
        let mut basis: Vec<Option<usize>> = vec![None; m];
        for j in 0..n {
            let mut one_at = None;
            let mut unit = true;
            for (i, row) in a.iter().enumerate() {
                if row[j].is_zero() {
                    continue;
                }
                if row[j].is_one() && one_at.is_none() {
                    one_at = Some(i);
                } else {
                    unit = false;
                    break;
                }
            }
            if let (true, Some(i)) = (unit, one_at) {
                if basis[i].is_none() {
                    basis[i] = Some(j);
                }
            }
        }
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
        let n_art = artificial_rows.len();
        let width = n + n_art + 1;

        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
        for i in 0..m {
            let mut row = vec![Rational::zero(); width];
            row[..n].clone_from_slice(&a[i]);
            row[width - 1] = b[i].clone();
            rows.push(row);
        }
        let mut full_basis = vec![0; m];
        for (k, &i) in artificial_rows.iter().enumerate() {
            rows[i][n + k] = Rational::one();
            full_basis[i] = n + k;
        }
        for i in 0..m {
            if let Some(j) = basis[i] {
                full_basis[i] = j;
            }
        }

        // Phase I objective: sum of artificials, expressed in nonbasic terms.
        let mut obj = vec![Rational::zero(); width];
        for &i in &artificial_rows {
            for (o, v) in obj.iter_mut().zip(&rows[i]) {
                *o -= v;
            }
        }
        for k in 0..n_art {
            obj[n + k] = Rational::zero();
        }
        rows.push(obj);
        let mut t = Tableau {
            rows,
            basis: full_basis,
            active: n,
        };
        if n_art > 0 {
            t.optimize();
            if !t.rows[m][width - 1].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut r = 0;
            while r < t.m() {
                if t.basis[r] >= n {
                    if let Some(j) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                        t.pivot(r, j);
                    } else {
                        // Redundant row.
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
                r += 1;
            }
        }

        // Phase II objective row.
        let mm = t.m();
        let mut obj = vec![Rational::zero(); width];
        obj[..n].clone_from_slice(&self.c);
        for i in 0..mm {
            let cb = &self.c[t.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&t.rows[i]) {
                *o -= cb * v;
            }
        }
        t.rows[mm] = obj;
        if !t.optimize() {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); n];
        for i in 0..mm {
            x[t.basis[i]] = t.rows[i][width - 1].clone();
        }
        let value = -t.rows[mm][width - 1].clone();
        LpOutcome::Optimal { x, value }
    }
}
