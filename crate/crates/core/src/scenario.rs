//! Bipartite scenarios, behaviours and the coordinate layout shared by every
//! other module.
//!
//! Coordinates of a behaviour are stored lexicographically by `(x, y, a, b)`
//! with 0-based labels, so each `(x, y)` block is contiguous and Bob's
//! outcomes vary fastest.

use std::fmt;
use std::ops::Range;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational_at, Rational};

/// Input and outcome cardinalities of a bipartite public scenario.
///
/// Outcome alphabets may differ per input (the sequential scenario gives the
/// final Alice input its own alphabet).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    alice_outcomes: Vec<usize>,
    bob_outcomes: Vec<usize>,
    /// Start of each `(x, y)` block, row-major in `(x, y)`, plus the total.
    offsets: Vec<usize>,
}

impl Scenario {
    pub fn new(alice_outcomes: Vec<usize>, bob_outcomes: Vec<usize>) -> Result<Self> {
        if alice_outcomes.is_empty() || bob_outcomes.is_empty() {
            return Err(Error::InvalidScenario(
                "each party needs at least one input".into(),
            ));
        }
        if alice_outcomes.iter().chain(&bob_outcomes).any(|&n| n == 0) {
            return Err(Error::InvalidScenario(
                "every input needs at least one outcome".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(alice_outcomes.len() * bob_outcomes.len() + 1);
        let mut acc = 0;
        for &na in &alice_outcomes {
            for &nb in &bob_outcomes {
                offsets.push(acc);
                acc += na * nb;
            }
        }
        offsets.push(acc);
        Ok(Scenario {
            alice_outcomes,
            bob_outcomes,
            offsets,
        })
    }

    /// `MA` inputs with `NA` outcomes each for Alice, likewise for Bob.
    pub fn homogeneous(ma: usize, na: usize, mb: usize, nb: usize) -> Result<Self> {
        Self::new(vec![na; ma], vec![nb; mb])
    }

    /// Two binary inputs per party.
    pub fn chsh() -> Self {
        Self::homogeneous(2, 2, 2, 2).expect("valid")
    }

    pub fn alice_inputs(&self) -> usize {
        self.alice_outcomes.len()
    }

    pub fn bob_inputs(&self) -> usize {
        self.bob_outcomes.len()
    }

    pub fn alice_outcomes(&self) -> &[usize] {
        &self.alice_outcomes
    }

    pub fn bob_outcomes(&self) -> &[usize] {
        &self.bob_outcomes
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    pub fn is_homogeneous(&self) -> bool {
        self.alice_outcomes.windows(2).all(|w| w[0] == w[1])
            && self.bob_outcomes.windows(2).all(|w| w[0] == w[1])
    }

    /// Coordinate range of the `(x, y)` block.
    pub fn block(&self, x: usize, y: usize) -> Range<usize> {
        let i = x * self.bob_inputs() + y;
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Index of `p(ab|xy)`, with bounds checking.
    pub fn coord_index(&self, x: usize, y: usize, a: usize, b: usize) -> Result<usize> {
        if x >= self.alice_inputs() {
            return Err(Error::Bounds(format!("alice input {x}")));
        }
        if y >= self.bob_inputs() {
            return Err(Error::Bounds(format!("bob input {y}")));
        }
        if a >= self.alice_outcomes[x] {
            return Err(Error::Bounds(format!("alice outcome {a} for input {x}")));
        }
        if b >= self.bob_outcomes[y] {
            return Err(Error::Bounds(format!("bob outcome {b} for input {y}")));
        }
        Ok(self.idx(x, y, a, b))
    }

    #[inline]
    pub(crate) fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        self.offsets[x * self.bob_inputs() + y] + a * self.bob_outcomes[y] + b
    }

    /// Inverse of [`Scenario::coord_index`].
    pub fn coord_tuple(&self, index: usize) -> Result<(usize, usize, usize, usize)> {
        if index >= self.dim() {
            return Err(Error::Bounds(format!("coordinate {index}")));
        }
        // Last block whose offset is <= index.
        let block = self.offsets.partition_point(|&o| o <= index) - 1;
        let (x, y) = (block / self.bob_inputs(), block % self.bob_inputs());
        let within = index - self.offsets[block];
        let nb = self.bob_outcomes[y];
        Ok((x, y, within / nb, within % nb))
    }

    /// All `(x, y, a, b)` tuples in coordinate order.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        (0..self.alice_inputs()).flat_map(move |x| {
            (0..self.bob_inputs()).flat_map(move |y| {
                (0..self.alice_outcomes[x])
                    .flat_map(move |a| (0..self.bob_outcomes[y]).map(move |b| (x, y, a, b)))
            })
        })
    }

    /// Dimension of the no-signalling affine hull.
    pub fn ns_dimension(&self) -> usize {
        let da: usize = self.alice_outcomes.iter().map(|n| n - 1).sum::<usize>() + 1;
        let db: usize = self.bob_outcomes.iter().map(|n| n - 1).sum::<usize>() + 1;
        da * db - 1
    }

    /// The `MA MB | a-counts | b-counts` header used by the text formats.
    pub fn spec_line(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "{} {} | {} | {}",
            self.alice_inputs(),
            self.bob_inputs(),
            join(&self.alice_outcomes),
            join(&self.bob_outcomes)
        )
    }

    pub fn parse_spec_line(line: usize, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::parse(line, "expected `MA MB | a-counts | b-counts`"));
        }
        let nums = |p: &str| -> Result<Vec<usize>> {
            p.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(line, format!("bad count {t:?}")))
                })
                .collect()
        };
        let head = nums(parts[0])?;
        let (ao, bo) = (nums(parts[1])?, nums(parts[2])?);
        if head.len() != 2 || head[0] != ao.len() || head[1] != bo.len() {
            return Err(Error::parse(line, "input counts disagree with outcome lists"));
        }
        Self::new(ao, bo)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_line())
    }
}

/// Why a coordinate vector is not a valid behaviour.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Negative {
        index: usize,
        tuple: (usize, usize, usize, usize),
        value: Rational,
    },
    BlockSum {
        x: usize,
        y: usize,
        sum: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Negative {
                index,
                tuple: (x, y, a, b),
                value,
            } => write!(
                f,
                "coordinate {index} p({a}{b}|{x}{y}) = {} is negative",
                format_rational(value)
            ),
            Violation::BlockSum { x, y, sum } => write!(
                f,
                "block (x={x}, y={y}) sums to {} instead of 1",
                format_rational(sum)
            ),
        }
    }
}

/// An exact point `p(ab|xy)` in behaviour space.
///
/// Construction only checks the dimension; use [`Behaviour::validate`] for
/// normalisation and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct Behaviour {
    scenario: Scenario,
    coords: Vec<Rational>,
}

impl Behaviour {
    pub fn new(scenario: Scenario, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != scenario.dim() {
            return Err(Error::shape(scenario.dim(), coords.len()));
        }
        Ok(Behaviour { scenario, coords })
    }

    /// Every block uniform.
    pub fn uniform(scenario: &Scenario) -> Self {
        let coords = scenario
            .tuples()
            .map(|(x, y, _, _)| {
                let n = scenario.alice_outcomes[x] * scenario.bob_outcomes[y];
                Rational::new(1.into(), (n as i64).into())
            })
            .collect();
        Behaviour {
            scenario: scenario.clone(),
            coords,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> Result<&Rational> {
        Ok(&self.coords[self.scenario.coord_index(x, y, a, b)?])
    }

    /// Ok iff every coordinate is nonnegative and each block sums to 1.
    /// Reports the first offending coordinate or block.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let s = &self.scenario;
        for x in 0..s.alice_inputs() {
            for y in 0..s.bob_inputs() {
                let block = s.block(x, y);
                for i in block.clone() {
                    if self.coords[i].is_negative() {
                        return Err(Violation::Negative {
                            index: i,
                            tuple: s.coord_tuple(i).expect("in range"),
                            value: self.coords[i].clone(),
                        });
                    }
                }
                let sum: Rational = self.coords[block].iter().sum();
                if !sum.is_one() {
                    return Err(Violation::BlockSum { x, y, sum });
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// `Σ_b p(ab|xy)`.
    pub fn alice_marginal(&self, a: usize, x: usize, y: usize) -> Result<Rational> {
        self.scenario.coord_index(x, y, a, 0)?;
        Ok((0..self.scenario.bob_outcomes[y])
            .map(|b| &self.coords[self.scenario.idx(x, y, a, b)])
            .sum())
    }

    /// `Σ_a p(ab|xy)`.
    pub fn bob_marginal(&self, b: usize, x: usize, y: usize) -> Result<Rational> {
        self.scenario.coord_index(x, y, 0, b)?;
        Ok((0..self.scenario.alice_outcomes[x])
            .map(|a| &self.coords[self.scenario.idx(x, y, a, b)])
            .sum())
    }

    /// Alice's marginals independent of `y` and Bob's independent of `x`,
    /// exactly.
    pub fn is_no_signalling(&self) -> bool {
        let s = &self.scenario;
        for x in 0..s.alice_inputs() {
            for a in 0..s.alice_outcomes[x] {
                let first = self.alice_marginal(a, x, 0).expect("in range");
                for y in 1..s.bob_inputs() {
                    if self.alice_marginal(a, x, y).expect("in range") != first {
                        return false;
                    }
                }
            }
        }
        for y in 0..s.bob_inputs() {
            for b in 0..s.bob_outcomes[y] {
                let first = self.bob_marginal(b, 0, y).expect("in range");
                for x in 1..s.alice_inputs() {
                    if self.bob_marginal(b, x, y).expect("in range") != first {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Text form: `behaviour`, the scenario line, then one `x y a b value`
    /// line per coordinate.
    pub fn to_text(&self) -> String {
        let mut out = String::from("behaviour\n");
        out.push_str(&self.scenario.spec_line());
        out.push('\n');
        for ((x, y, a, b), v) in self.scenario.tuples().zip(&self.coords) {
            out.push_str(&format!("{x} {y} {a} {b} {}\n", format_rational(v)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "behaviour")) => {}
            Some((n, _)) => return Err(Error::parse(n, "expected `behaviour` header")),
            None => return Err(Error::parse(0, "empty input")),
        }
        let (n, spec) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing scenario line"))?;
        let scenario = Scenario::parse_spec_line(n, spec)?;
        let mut coords: Vec<Option<Rational>> = vec![None; scenario.dim()];
        for (n, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(Error::parse(n, "expected `x y a b value`"));
            }
            let lab = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(n, format!("bad label {t:?}")))
            };
            let i = scenario
                .coord_index(lab(toks[0])?, lab(toks[1])?, lab(toks[2])?, lab(toks[3])?)
                .map_err(|e| Error::parse(n, e.to_string()))?;
            if coords[i].is_some() {
                return Err(Error::parse(n, "duplicate coordinate"));
            }
            coords[i] = Some(parse_rational_at(n, toks[4])?);
        }
        let missing = coords.iter().filter(|c| c.is_none()).count();
        if missing > 0 {
            return Err(Error::parse(0, format!("{missing} coordinates missing")));
        }
        Behaviour::new(scenario, coords.into_iter().map(Option::unwrap).collect())
    }
}

/// Zero vector of the scenario's dimension.
pub(crate) fn zeros(dim: usize) -> Vec<Rational> {
    vec![Rational::zero(); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn chsh_corners() {
        let s = Scenario::chsh();
        assert_eq!(s.dim(), 16);
        assert_eq!(s.coord_index(0, 0, 0, 0).unwrap(), 0);
        assert_eq!(s.coord_index(1, 1, 1, 1).unwrap(), 15);
    }

    #[test]
    fn heterogeneous_index_matches_enumeration() {
        let s = Scenario::new(vec![2, 3], vec![2]).unwrap();
        let pos = s
            .tuples()
            .position(|t| t == (1, 0, 2, 1))
            .expect("tuple present");
        // Block (0,0) has 4 entries, then (1,0) lists a=0,1,2 × b=0,1.
        assert_eq!(pos, 9);
        assert_eq!(s.coord_index(1, 0, 2, 1).unwrap(), pos);
        assert_eq!(s.dim(), 10);
    }

    #[test]
    fn out_of_range_labels() {
        let s = Scenario::new(vec![2, 3], vec![2]).unwrap();
        assert!(matches!(s.coord_index(0, 0, 2, 0), Err(Error::Bounds(_))));
        assert!(matches!(s.coord_index(2, 0, 0, 0), Err(Error::Bounds(_))));
        assert!(matches!(s.coord_index(0, 1, 0, 0), Err(Error::Bounds(_))));
        assert!(s.coord_tuple(10).is_err());
    }

    #[test]
    fn rejects_degenerate_scenarios() {
        assert!(Scenario::new(vec![], vec![2]).is_err());
        assert!(Scenario::new(vec![2, 0], vec![2]).is_err());
    }

    #[test]
    fn uniform_is_valid() {
        let p = Behaviour::uniform(&Scenario::chsh());
        assert!(p.validate().is_ok());
        assert_eq!(p.alice_marginal(0, 1, 0).unwrap(), ratio(1, 2));
        assert_eq!(p.bob_marginal(1, 0, 1).unwrap(), ratio(1, 2));
        assert!(p.is_no_signalling());
    }

    #[test]
    fn zero_vector_fails_block_sum() {
        let s = Scenario::chsh();
        let p = Behaviour::new(s.clone(), zeros(16)).unwrap();
        assert_eq!(
            p.validate(),
            Err(Violation::BlockSum {
                x: 0,
                y: 0,
                sum: int(0)
            })
        );
    }

    #[test]
    fn negative_coordinate_reported() {
        let s = Scenario::homogeneous(1, 2, 1, 2).unwrap();
        let p = Behaviour::new(s, vec![int(1), int(1), int(-1), int(0)]).unwrap();
        assert!(matches!(p.validate(), Err(Violation::Negative { index: 2, .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            Behaviour::new(Scenario::chsh(), zeros(3)),
            Err(Error::Shape {
                expected: 16,
                actual: 3
            })
        );
    }

    #[test]
    fn signalling_behaviour_detected() {
        // Alice outputs a = y: her marginal depends on Bob's input.
        let s = Scenario::chsh();
        let mut c = zeros(16);
        for x in 0..2 {
            for y in 0..2 {
                c[s.idx(x, y, y, 0)] = int(1);
            }
        }
        let p = Behaviour::new(s, c).unwrap();
        assert!(p.is_valid());
        assert!(!p.is_no_signalling());
    }

    #[test]
    fn text_round_trip() {
        let s = Scenario::new(vec![2, 3], vec![2, 2]).unwrap();
        let p = Behaviour::uniform(&s);
        let text = p.to_text();
        assert!(text.starts_with("behaviour\n2 2 | 2 3 | 2 2\n0 0 0 0 1/4\n"));
        assert_eq!(Behaviour::from_text(&text).unwrap(), p);
    }

    #[test]
    fn text_parse_errors() {
        assert!(Behaviour::from_text("nope").is_err());
        assert!(Behaviour::from_text("behaviour\n1 1 | 2 | 2\n0 0 0 0 1\n").is_err());
        assert!(Behaviour::from_text("behaviour\n1 1 | 2 | 2\n0 0 5 0 1\n").is_err());
    }

    fn scenario_strategy() -> impl Strategy<Value = Scenario> {
        (
            prop::collection::vec(1usize..4, 1..4),
            prop::collection::vec(1usize..4, 1..4),
        )
            .prop_map(|(a, b)| Scenario::new(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn coord_index_is_a_bijection(s in scenario_strategy()) {
            let mut seen = vec![false; s.dim()];
            for (x, y, a, b) in s.tuples() {
                let i = s.coord_index(x, y, a, b).unwrap();
                prop_assert!(!seen[i]);
                seen[i] = true;
                prop_assert_eq!(s.coord_tuple(i).unwrap(), (x, y, a, b));
            }
            prop_assert!(seen.iter().all(|&v| v));
        }
    }
}
