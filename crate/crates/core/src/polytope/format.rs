//! cdd-style text representations.
//!
//! ```text
//! H-representation
//! linearity 2 1 2
//! begin
//! 5 4 rational
//! -1 1 1 1
//! ...
//! end
//! ```
//!
//! H rows are `offset coeffs...`; V rows are `1 coords...`. `linearity`
//! lists 1-based indices of equality rows.

use std::fmt::Write as _;

use super::{HPolytope, Inequality, VPolytope};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational_at, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    H(HPolytope),
    V(VPolytope),
}

fn write_row(out: &mut String, lead: &Rational, rest: &[Rational]) {
    out.push_str(&format_rational(lead));
    for v in rest {
        out.push(' ');
        out.push_str(&format_rational(v));
    }
    out.push('\n');
}

impl HPolytope {
    /// Equalities first (marked by `linearity`), then inequalities.
    pub fn to_text(&self) -> String {
        let mut out = String::from("H-representation\n");
        let k = self.equalities.len();
        if k > 0 {
            out.push_str(&format!("linearity {k}"));
            for i in 1..=k {
                let _ = write!(out, " {i}");
            }
            out.push('\n');
        }
        out.push_str("begin\n");
        let _ = writeln!(out, "{} {} rational", k + self.inequalities.len(), self.dim() + 1);
        for row in self.equalities.iter().chain(&self.inequalities) {
            write_row(&mut out, &row.offset, &row.coeffs);
        }
        out.push_str("end\n");
        out
    }
}

impl VPolytope {
    pub fn to_text(&self) -> String {
        let mut out = String::from("V-representation\nbegin\n");
        let _ = writeln!(out, "{} {} rational", self.len(), self.dim() + 1);
        let one = Rational::from_integer(1.into());
        for v in self.vertices() {
            write_row(&mut out, &one, v);
        }
        out.push_str("end\n");
        out
    }
}

/// Parses either representation.
pub fn parse_representation(text: &str) -> Result<Representation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('*') && !l.starts_with('#'));
    let (n, header) = lines.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    let is_h = match header {
        "H-representation" => true,
        "V-representation" => false,
        _ => return Err(Error::parse(n, "expected H-representation or V-representation")),
    };
    let mut linearity: Vec<usize> = Vec::new();
    let mut saw_begin = false;
    for (n, line) in lines.by_ref() {
        if line == "begin" {
            saw_begin = true;
            break;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() == Some(&"linearity") {
            let nums: Vec<usize> = toks[1..]
                .iter()
                .map(|t| t.parse().map_err(|_| Error::parse(n, "bad linearity index")))
                .collect::<Result<_>>()?;
            if nums.is_empty() || nums[0] != nums.len() - 1 {
                return Err(Error::parse(n, "linearity count does not match"));
            }
            linearity = nums[1..].to_vec();
        } else {
            return Err(Error::parse(n, format!("unexpected line {line:?}")));
        }
    }
    if !saw_begin {
        return Err(Error::parse(0, "missing begin"));
    }
    let (n, size) = lines.next().ok_or_else(|| Error::parse(0, "missing size line"))?;
    let toks: Vec<&str> = size.split_whitespace().collect();
    if toks.len() != 3 || toks[2] != "rational" {
        return Err(Error::parse(n, "expected `rows cols rational`"));
    }
    let nrows: usize = toks[0].parse().map_err(|_| Error::parse(n, "bad row count"))?;
    let ncols: usize = toks[1].parse().map_err(|_| Error::parse(n, "bad column count"))?;
    if ncols < 2 {
        return Err(Error::parse(n, "need at least one coordinate"));
    }
    let mut rows = Vec::with_capacity(nrows);
    let mut ended = false;
    for (n, line) in lines.by_ref() {
        if line == "end" {
            ended = true;
            break;
        }
        let row: Vec<Rational> = line
            .split_whitespace()
            .map(|t| parse_rational_at(n, t))
            .collect::<Result<_>>()?;
        if row.len() != ncols {
            return Err(Error::parse(n, format!("expected {ncols} entries")));
        }
        rows.push((n, row));
    }
    if !ended {
        return Err(Error::parse(0, "missing end"));
    }
    if rows.len() != nrows {
        return Err(Error::parse(0, format!("expected {nrows} rows, got {}", rows.len())));
    }
    let dim = ncols - 1;
    if is_h {
        if linearity.iter().any(|&i| i == 0 || i > nrows) {
            return Err(Error::parse(0, "linearity index out of range"));
        }
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        for (i, (_, row)) in rows.iter().enumerate() {
            let r = Inequality::from_row(row);
            if linearity.contains(&(i + 1)) {
                eqs.push(r);
            } else {
                ineqs.push(r);
            }
        }
        Ok(Representation::H(HPolytope::new(dim, ineqs, eqs)?))
    } else {
        if !linearity.is_empty() {
            return Err(Error::parse(0, "linearity is not supported for V-representations"));
        }
        let mut pts = Vec::with_capacity(rows.len());
        for (n, row) in rows {
            if row[0] != Rational::from_integer(1.into()) {
                return Err(Error::parse(n, "only vertices (leading 1) are supported"));
            }
            pts.push(row[1..].to_vec());
        }
        Ok(Representation::V(VPolytope::new(dim, pts)?))
    }
}
