//! Allowed-degree sets and their exponential generating functions.
//!
//! A [`DegreeSet`] is either an explicit finite list of degrees or one of
//! three infinite families with a closed-form EGF: all degrees at least
//! some minimum, all even degrees, or all odd degrees. For a set `D` the
//! generating function is `Set_D(x) = sum_{d in D} x^d / d!`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::numeric::ln_factorial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegreeSetError {
    #[error("malformed degree set `{0}`")]
    Malformed(String),
    #[error("negative degree `{0}` is not allowed")]
    Negative(String),
    #[error("degree list is empty")]
    Empty,
    #[error("shifting {set} by {by} leaves no degree")]
    DegenerateShift { set: String, by: usize },
}

/// A quantity that is either a natural number or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extent {
    Finite(usize),
    Infinite,
}

impl Extent {
    pub fn finite(self) -> Option<usize> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extent::Infinite)
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(v) => write!(f, "{v}"),
            Extent::Infinite => f.write_str("inf"),
        }
    }
}

/// Set of allowed vertex degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DegreeSet {
    /// Sorted, distinct, nonempty.
    Finite(Vec<usize>),
    /// All integers `>= delta`.
    MinDegree(usize),
    Even,
    Odd,
}

impl DegreeSet {
    /// Builds a finite set, sorting and removing duplicates.
    pub fn finite(degrees: impl IntoIterator<Item = usize>) -> Result<Self, DegreeSetError> {
        let mut list: Vec<usize> = degrees.into_iter().collect();
        if list.is_empty() {
            return Err(DegreeSetError::Empty);
        }
        list.sort_unstable();
        list.dedup();
        Ok(DegreeSet::Finite(list))
    }

    pub fn parse(text: &str) -> Result<Self, DegreeSetError> {
        text.parse()
    }

    pub fn valuation(&self) -> usize {
        match self {
            DegreeSet::Finite(list) => list[0],
            DegreeSet::MinDegree(delta) => *delta,
            DegreeSet::Even => 0,
            DegreeSet::Odd => 1,
        }
    }

    /// Gcd of pairwise differences; infinite for a singleton.
    pub fn periodicity(&self) -> Extent {
        match self {
            DegreeSet::Finite(list) => {
                let r = list[0];
                let p = list[1..].iter().fold(0usize, |g, &d| g.gcd(&(d - r)));
                if p == 0 {
                    Extent::Infinite
                } else {
                    Extent::Finite(p)
                }
            }
            DegreeSet::MinDegree(_) => Extent::Finite(1),
            DegreeSet::Even | DegreeSet::Odd => Extent::Finite(2),
        }
    }

    pub fn max_degree(&self) -> Extent {
        match self {
            DegreeSet::Finite(list) => Extent::Finite(*list.last().unwrap()),
            _ => Extent::Infinite,
        }
    }

    /// Number of members, `None` when infinite.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            DegreeSet::Finite(list) => Some(list.len()),
            _ => None,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.cardinality() == Some(1)
    }

    pub fn contains(&self, d: usize) -> bool {
        match self {
            DegreeSet::Finite(list) => list.binary_search(&d).is_ok(),
            DegreeSet::MinDegree(delta) => d >= *delta,
            DegreeSet::Even => d.is_multiple_of(2),
            DegreeSet::Odd => d % 2 == 1,
        }
    }

    /// Members `<= bound`, ascending.
    pub fn members_up_to(&self, bound: usize) -> Vec<usize> {
        match self {
            DegreeSet::Finite(list) => list.iter().copied().take_while(|&d| d <= bound).collect(),
            DegreeSet::MinDegree(delta) => (*delta..=bound).collect(),
            DegreeSet::Even => (0..=bound).step_by(2).collect(),
            DegreeSet::Odd => (1..=bound).step_by(2).collect(),
        }
    }

    /// `D - i = { d - i : d in D, d >= i }`.
    pub fn shift(&self, i: usize) -> Result<DegreeSet, DegreeSetError> {
        if i == 0 {
            return Ok(self.clone());
        }
        match self {
            DegreeSet::Finite(list) => {
                let shifted: Vec<usize> =
                    list.iter().filter(|&&d| d >= i).map(|&d| d - i).collect();
                if shifted.is_empty() {
                    Err(DegreeSetError::DegenerateShift { set: self.to_string(), by: i })
                } else {
                    Ok(DegreeSet::Finite(shifted))
                }
            }
            DegreeSet::MinDegree(delta) => Ok(DegreeSet::MinDegree(delta.saturating_sub(i))),
            DegreeSet::Even | DegreeSet::Odd => {
                let flip = i % 2 == 1;
                Ok(match (self, flip) {
                    (DegreeSet::Even, false) | (DegreeSet::Odd, true) => DegreeSet::Even,
                    _ => DegreeSet::Odd,
                })
            }
        }
    }

    /// `Set_D(x)` in linear space. Overflows to `+inf` for large `x`;
    /// use [`DegreeSet::egf_log_eval`] there.
    pub fn egf_eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if x == 0.0 {
            return if self.contains(0) { 1.0 } else { 0.0 };
        }
        match self {
            DegreeSet::Finite(list) => finite_sum(list, x),
            DegreeSet::MinDegree(0) => x.exp(),
            DegreeSet::MinDegree(delta) => {
                if x < *delta as f64 + 5.0 {
                    let (log_head, tail) = min_degree_series(*delta, x);
                    log_head.exp() * tail
                } else {
                    x.exp() - head_sum(*delta, x)
                }
            }
            DegreeSet::Even => x.cosh(),
            DegreeSet::Odd => x.sinh(),
        }
    }

    /// `ln Set_D(x)`; `-inf` when the set has no member contributing at `x = 0`.
    pub fn egf_log_eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if x == 0.0 {
            return if self.contains(0) { 0.0 } else { f64::NEG_INFINITY };
        }
        match self {
            DegreeSet::Finite(list) => {
                let ln_x = x.ln();
                let logs: Vec<f64> =
                    list.iter().map(|&d| d as f64 * ln_x - ln_factorial(d)).collect();
                log_sum_exp(&logs)
            }
            DegreeSet::MinDegree(0) => x,
            DegreeSet::MinDegree(delta) => {
                if x < *delta as f64 + 5.0 {
                    let (log_head, tail) = min_degree_series(*delta, x);
                    log_head + tail.ln()
                } else {
                    // e^x (1 - P[Poisson(x) < delta])
                    let ln_x = x.ln();
                    let below: f64 = (0..*delta)
                        .map(|d| (d as f64 * ln_x - x - ln_factorial(d)).exp())
                        .sum();
                    x + (-below).ln_1p()
                }
            }
            DegreeSet::Even => {
                if x < 20.0 {
                    x.cosh().ln()
                } else {
                    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
                }
            }
            DegreeSet::Odd => {
                if x < 20.0 {
                    x.sinh().ln()
                } else {
                    x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
                }
            }
        }
    }
}

fn finite_sum(list: &[usize], x: f64) -> f64 {
    let mut term = 1.0;
    let mut k = 0usize;
    let mut total = 0.0;
    for &d in list {
        if d > 170 {
            total += (d as f64 * x.ln() - ln_factorial(d)).exp();
            continue;
        }
        while k < d {
            k += 1;
            term *= x / k as f64;
        }
        total += term;
    }
    total
}

fn head_sum(delta: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut total = 0.0;
    for d in 0..delta {
        if d > 0 {
            term *= x / d as f64;
        }
        total += term;
    }
    total
}

/// Splits `sum_{d >= delta} x^d/d!` as `exp(log_head) * tail` where
/// `log_head = ln(x^delta / delta!)` and `tail >= 1`.
fn min_degree_series(delta: usize, x: f64) -> (f64, f64) {
    let log_head = delta as f64 * x.ln() - ln_factorial(delta);
    let mut term = 1.0;
    let mut tail = 1.0;
    let mut d = delta;
    loop {
        d += 1;
        term *= x / d as f64;
        tail += term;
        if term < 1e-18 * tail && (d as f64) > x {
            break;
        }
    }
    (log_head, tail)
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

impl FromStr for DegreeSet {
    type Err = DegreeSetError;

    /// Accepts `"d1,d2,..."`, `"min=delta"`, `"even"` or `"odd"`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        match s.to_ascii_lowercase().as_str() {
            "even" => return Ok(DegreeSet::Even),
            "odd" => return Ok(DegreeSet::Odd),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("min=") {
            return parse_natural(rest.trim()).map(DegreeSet::MinDegree);
        }
        if s.is_empty() {
            return Err(DegreeSetError::Empty);
        }
        let degrees = s
            .split(',')
            .map(|tok| parse_natural(tok.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        DegreeSet::finite(degrees)
    }
}

fn parse_natural(tok: &str) -> Result<usize, DegreeSetError> {
    if tok.starts_with('-') && tok[1..].parse::<u64>().is_ok() {
        return Err(DegreeSetError::Negative(tok.to_string()));
    }
    tok.parse::<usize>().map_err(|_| DegreeSetError::Malformed(tok.to_string()))
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSet::Finite(list) => {
                let parts: Vec<String> = list.iter().map(|d| d.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            DegreeSet::MinDegree(delta) => write!(f, "min={delta}"),
            DegreeSet::Even => f.write_str("even"),
            DegreeSet::Odd => f.write_str("odd"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn all_kinds() -> Vec<DegreeSet> {
        vec![
            DegreeSet::MinDegree(0),
            DegreeSet::MinDegree(1),
            DegreeSet::MinDegree(2),
            DegreeSet::MinDegree(5),
            DegreeSet::Even,
            DegreeSet::Odd,
            DegreeSet::finite([1, 3]).unwrap(),
            DegreeSet::finite([2, 3]).unwrap(),
            DegreeSet::finite([0, 4, 7]).unwrap(),
        ]
    }

    #[test]
    fn parse_forms() {
        assert_eq!("2".parse::<DegreeSet>().unwrap(), DegreeSet::Finite(vec![2]));
        assert_eq!("3, 1,3".parse::<DegreeSet>().unwrap(), DegreeSet::Finite(vec![1, 3]));
        assert_eq!("even".parse::<DegreeSet>().unwrap(), DegreeSet::Even);
        assert_eq!("ODD".parse::<DegreeSet>().unwrap(), DegreeSet::Odd);
        assert_eq!("min=3".parse::<DegreeSet>().unwrap(), DegreeSet::MinDegree(3));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(DegreeSet::parse(""), Err(DegreeSetError::Empty));
        assert!(matches!(DegreeSet::parse("1,-2"), Err(DegreeSetError::Negative(_))));
        assert!(matches!(DegreeSet::parse("1,,2"), Err(DegreeSetError::Malformed(_))));
        assert!(matches!(DegreeSet::parse("min=x"), Err(DegreeSetError::Malformed(_))));
        assert!(matches!(DegreeSet::parse("evens"), Err(DegreeSetError::Malformed(_))));
    }

    #[test]
    fn display_round_trips() {
        for d in all_kinds() {
            assert_eq!(d.to_string().parse::<DegreeSet>().unwrap(), d);
        }
    }

    #[test]
    fn valuation_periodicity_max() {
        assert_eq!(DegreeSet::Even.valuation(), 0);
        assert_eq!(DegreeSet::Even.periodicity(), Extent::Finite(2));
        assert_eq!(DegreeSet::Odd.valuation(), 1);
        let one_three = DegreeSet::parse("1,3").unwrap();
        assert_eq!(one_three.valuation(), 1);
        assert_eq!(one_three.periodicity(), Extent::Finite(2));
        assert_eq!(DegreeSet::parse("2").unwrap().periodicity(), Extent::Infinite);
        assert_eq!(DegreeSet::MinDegree(3).valuation(), 3);
        assert_eq!(DegreeSet::MinDegree(3).max_degree(), Extent::Infinite);
        assert_eq!(DegreeSet::parse("2,5,11").unwrap().periodicity(), Extent::Finite(3));
    }

    #[test]
    fn shifts() {
        assert_eq!(DegreeSet::Even.shift(1).unwrap(), DegreeSet::Odd);
        assert_eq!(DegreeSet::Odd.shift(1).unwrap(), DegreeSet::Even);
        assert_eq!(DegreeSet::Even.shift(2).unwrap(), DegreeSet::Even);
        assert_eq!(
            DegreeSet::parse("1,3").unwrap().shift(2).unwrap(),
            DegreeSet::Finite(vec![1])
        );
        assert_eq!(DegreeSet::MinDegree(2).shift(2).unwrap(), DegreeSet::MinDegree(0));
        assert_eq!(DegreeSet::MinDegree(1).shift(3).unwrap(), DegreeSet::MinDegree(0));
        assert!(matches!(
            DegreeSet::parse("0,1").unwrap().shift(2),
            Err(DegreeSetError::DegenerateShift { .. })
        ));
    }

    #[test]
    fn egf_examples() {
        assert_eq!(DegreeSet::Even.egf_eval(0.0), 1.0);
        assert_relative_eq!(DegreeSet::MinDegree(0).egf_eval(1.7), 1.7f64.exp());
        assert_relative_eq!(
            DegreeSet::parse("1,3").unwrap().egf_eval(2.0),
            10.0 / 3.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn egf_small_argument_has_no_cancellation() {
        // x^3/6 + x^4/24 + ... at x = 1e-3
        let x = 1e-3;
        let expected = x * x * x / 6.0 * (1.0 + x / 4.0 + x * x / 20.0 + x * x * x / 120.0);
        assert_relative_eq!(DegreeSet::MinDegree(3).egf_eval(x), expected, max_relative = 1e-14);
    }

    /// Truncated direct summation with a factorial-tail bound.
    fn direct_sum(d: &DegreeSet, x: f64) -> f64 {
        let mut total = 0.0;
        let mut term = 1.0;
        let mut k = 0usize;
        loop {
            if k > 0 {
                term *= x / k as f64;
            }
            if d.contains(k) {
                total += term;
            }
            // tail of e^x beyond k is below term * e^x
            if k as f64 > x && term * x.exp() < 1e-16 * total.max(f64::MIN_POSITIVE) {
                break;
            }
            if let Extent::Finite(max) = d.max_degree() {
                if k >= max {
                    break;
                }
            }
            k += 1;
        }
        total
    }

    #[test]
    fn egf_matches_truncated_sum() {
        for d in all_kinds() {
            for &x in &[0.01, 0.3, 1.0, 2.5, 6.0, 11.0, 25.0] {
                let direct = direct_sum(&d, x);
                assert_relative_eq!(d.egf_eval(x), direct, max_relative = 1e-14);
                assert_relative_eq!(d.egf_log_eval(x), direct.ln(), max_relative = 1e-13, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn log_eval_survives_huge_arguments() {
        let x = 1.0e6;
        assert!(DegreeSet::Even.egf_eval(x).is_infinite());
        assert_relative_eq!(DegreeSet::Even.egf_log_eval(x), x - std::f64::consts::LN_2);
        assert_relative_eq!(DegreeSet::MinDegree(4).egf_log_eval(x), x);
        let fin = DegreeSet::parse("1,3").unwrap();
        assert_relative_eq!(fin.egf_log_eval(x), 3.0 * x.ln() - 6f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn derivative_is_shifted_set() {
        for d in all_kinds() {
            let shifted = d.shift(1).unwrap();
            for &x in &[0.2, 0.9, 1.5, 3.0, 7.5] {
                let h = 1e-5 * x;
                let fd = (d.egf_eval(x + h) - d.egf_eval(x - h)) / (2.0 * h);
                assert_relative_eq!(shifted.egf_eval(x), fd, max_relative = 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn periodicity_divides_differences(mut list in proptest::collection::vec(0usize..60, 1..8)) {
            list.sort_unstable();
            list.dedup();
            let d = DegreeSet::finite(list.clone()).unwrap();
            match d.periodicity() {
                Extent::Infinite => prop_assert_eq!(list.len(), 1),
                Extent::Finite(p) => {
                    for a in &list {
                        for b in &list {
                            prop_assert_eq!((a.max(b) - a.min(b)) % p, 0);
                        }
                    }
                }
            }
        }

        #[test]
        fn shift_composes(list in proptest::collection::vec(0usize..40, 1..8), a in 0usize..5, b in 0usize..5) {
            let lifted: Vec<usize> = list.iter().map(|d| d + a + b).collect();
            let d = DegreeSet::finite(lifted).unwrap();
            prop_assert_eq!(d.shift(a).unwrap().shift(b).unwrap(), d.shift(a + b).unwrap());
        }

        #[test]
        fn shift_membership(delta in 0usize..6, i in 0usize..6, probe in 0usize..30) {
            for d in [DegreeSet::MinDegree(delta), DegreeSet::Even, DegreeSet::Odd] {
                let s = d.shift(i).unwrap();
                prop_assert_eq!(s.contains(probe), d.contains(probe + i));
            }
        }
    }
}
