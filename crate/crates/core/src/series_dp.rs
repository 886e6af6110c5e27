//! Exact coefficient tables for powers of `Set_D`.
//!
//! Everything here works with the integer form
//! `T[i][j] = j! [x^j] Set_D(x)^i`, which counts sequences of `i` disjoint
//! sets of sizes in `D` partitioning `{1..j}`. Two routes are provided:
//!
//! * [`CoefficientTable::build`] fills the whole `(i, j)` table with the
//!   recursion `T[i][j] = sum_{d in D} C(j, d) T[i-1][j-d]`;
//! * [`power_row`] produces one row `T[i][..]` directly from the
//!   differential equation `P (P^i)' = i P' P^i`, at cost
//!   `O(j_max * |D|)` big-integer products instead of `O(i * j_max * |D|)`.
//!
//! The second route is what makes the exact counts practical at a few
//! thousand half-edges.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::degree_set::{DegreeSet, DegreeSetError};
use crate::numeric::{big_rational, binomial, binomial_row, factorial, mantissa_exponent, rational_ln};

/// Full table `T[i][j]` for `0 <= i <= n_max`, `0 <= j <= j_max`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    degree_set: DegreeSet,
    n_max: usize,
    j_max: usize,
    rows: Vec<Vec<BigUint>>,
}

impl CoefficientTable {
    pub fn build(degree_set: &DegreeSet, n_max: usize, j_max: usize) -> Self {
        let members = degree_set.members_up_to(j_max);
        let mut rows = vec![vec![BigUint::zero(); j_max + 1]; n_max + 1];
        rows[0][0] = BigUint::one();
        // column-major so that each binomial row is computed once
        for j in 0..=j_max {
            let binom = binomial_row(j);
            for i in 1..=n_max {
                let mut acc = BigUint::zero();
                for &d in members.iter().take_while(|&&d| d <= j) {
                    let prev = &rows[i - 1][j - d];
                    if !prev.is_zero() {
                        acc += &binom[d] * prev;
                    }
                }
                rows[i][j] = acc;
            }
        }
        CoefficientTable { degree_set: degree_set.clone(), n_max, j_max, rows }
    }

    pub fn degree_set(&self) -> &DegreeSet {
        &self.degree_set
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[BigUint] {
        &self.rows[i]
    }
}

/// Row `T[i][0..=j_max]` of the coefficient table.
///
/// Writes `Set_D(x) = x^r Q(x)` with `r` the valuation, so that `Q(0) != 0`,
/// and runs the power recurrence on `u_k = T[i][k + r i]`:
///
/// `k u_k = sum_{s >= 1, s + r in D} ((i + 1) s - k) C(k + r i, s) / C(s + r, r) u_{k-s}`.
///
/// The `1 / C(s + r, r)` factors are cleared with their lcm so every step
/// is integral; the final division is exact.
pub fn power_row(degree_set: &DegreeSet, i: usize, j_max: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::zero(); j_max + 1];
    if i == 0 {
        row[0] = BigUint::one();
        return row;
    }
    let r = degree_set.valuation();
    let base = r * i;
    if base > j_max {
        return row;
    }
    let span = j_max - base;
    let steps: Vec<usize> = degree_set
        .members_up_to(r + span)
        .into_iter()
        .filter(|&d| d > r)
        .map(|d| d - r)
        .collect();

    let (lambda, lambda_over) = if r == 0 {
        (BigUint::one(), vec![BigUint::one(); steps.len()])
    } else {
        let denoms: Vec<BigUint> = steps.iter().map(|&s| binomial(s + r, r)).collect();
        let lambda = denoms.iter().fold(BigUint::one(), |acc, c| acc.lcm(c));
        let over = denoms.iter().map(|c| &lambda / c).collect();
        (lambda, over)
    };

    let r_fact = factorial(r);
    let mut u: Vec<BigUint> = Vec::with_capacity(span + 1);
    u.push(factorial(base) / num_traits::pow(r_fact, i));

    let weight = (i + 1) as u64;
    for k in 1..=span {
        let total = (k + base) as u64;
        let mut pos = BigUint::zero();
        let mut neg = BigUint::zero();
        let mut binom = BigUint::one();
        let mut at = 0u64;
        for (idx, &s) in steps.iter().enumerate() {
            if s > k {
                break;
            }
            while at < s as u64 {
                at += 1;
                binom = binom * (total - at + 1) / at;
            }
            let prev = &u[k - s];
            if prev.is_zero() {
                continue;
            }
            let lhs = weight * s as u64;
            let (coef, sink) = match lhs.cmp(&(k as u64)) {
                std::cmp::Ordering::Equal => continue,
                std::cmp::Ordering::Greater => (lhs - k as u64, &mut pos),
                std::cmp::Ordering::Less => (k as u64 - lhs, &mut neg),
            };
            let mut term = &binom * prev;
            if r != 0 {
                term *= &lambda_over[idx];
            }
            term *= coef;
            *sink += term;
        }
        debug_assert!(pos >= neg);
        let numer = pos - neg;
        let divisor = &lambda * k as u64;
        let (q, rem) = numer.div_rem(&divisor);
        debug_assert!(rem.is_zero(), "power recurrence division must be exact");
        u.push(q);
    }
    for (k, value) in u.into_iter().enumerate() {
        row[base + k] = value;
    }
    row
}

/// Single entry `T[i][j]`.
pub fn power_coefficient(degree_set: &DegreeSet, i: usize, j: usize) -> BigUint {
    power_row(degree_set, i, j).pop().unwrap_or_default()
}

/// `j! [x^j] Set_{D-2}(x)^a Set_D(x)^b`.
pub fn mixed_coefficient(
    degree_set: &DegreeSet,
    a: usize,
    b: usize,
    j: usize,
) -> Result<BigUint, DegreeSetError> {
    let main = power_row(degree_set, b, j);
    if a == 0 {
        return Ok(main[j].clone());
    }
    let shifted = degree_set.shift(2)?;
    let low = power_row(&shifted, a, j);
    Ok(binomial_convolution(&low, &main, j))
}

/// `sum_k C(j, k) left[k] right[j - k]`.
pub fn binomial_convolution(left: &[BigUint], right: &[BigUint], j: usize) -> BigUint {
    let binom = binomial_row(j);
    let mut acc = BigUint::zero();
    for k in 0..=j {
        if left[k].is_zero() || right[j - k].is_zero() {
            continue;
        }
        acc += &binom[k] * &left[k] * &right[j - k];
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Asymptotic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::Asymptotic => "asymptotic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightValue {
    ExactRational(BigRational),
    /// Natural logarithm of a positive magnitude; `-inf` encodes zero.
    LogReal(f64),
}

/// A count or total weight, either exact or as a natural logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct LogWeight {
    pub value: WeightValue,
    pub provenance: Provenance,
}

impl LogWeight {
    pub fn exact(value: BigRational) -> Self {
        LogWeight { value: WeightValue::ExactRational(value), provenance: Provenance::Exact }
    }

    pub fn asymptotic(ln: f64) -> Self {
        LogWeight { value: WeightValue::LogReal(ln), provenance: Provenance::Asymptotic }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match &self.value {
            WeightValue::ExactRational(q) => Some(q),
            WeightValue::LogReal(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            WeightValue::ExactRational(q) => q.is_zero(),
            WeightValue::LogReal(ln) => *ln == f64::NEG_INFINITY,
        }
    }

    pub fn ln(&self) -> f64 {
        match &self.value {
            WeightValue::ExactRational(q) => rational_ln(q),
            WeightValue::LogReal(ln) => *ln,
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    pub fn mantissa_exponent(&self) -> Option<(f64, i64)> {
        mantissa_exponent(self.ln())
    }
}

/// Total compensation-factor weight of multigraphs with `n` vertices,
/// `m` edges and every degree in `D`: `T[n][2m] / (2^m m!)`, exactly.
pub fn mg_total_weight(degree_set: &DegreeSet, n: usize, m: usize) -> LogWeight {
    let count = power_coefficient(degree_set, n, 2 * m);
    LogWeight::exact(orderings_to_weight(count, m))
}

/// Divides an orderings count by `2^m m!`.
pub fn orderings_to_weight(orderings: BigUint, m: usize) -> BigRational {
    let den = (BigUint::one() << m) * factorial(m);
    big_rational(orderings, den)
}
