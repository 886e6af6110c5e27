//! Saddle-point asymptotics and the exact marked-multigraph sums.
//!
//! With `phi(x) = x Set_{D-1}(x) / Set_D(x)` and `zeta` the positive root of
//! `phi(zeta) = 2m/n`, the total weight of multigraphs is estimated by
//!
//! ```text
//! (2m)! / (2^m m!) * p / sqrt(2 pi n zeta phi'(zeta)) * Set_D(zeta)^n / zeta^(2m)
//! ```
//!
//! and the number of simple graphs by the same expression times
//! `exp(-W^2 - W)` where `W = (n / 4m) zeta^2 Set_{D-2}(zeta) / Set_D(zeta)`.
//! All evaluation happens in natural-log space.
//!
//! The marked sums weight each multigraph with some of its loops and
//! double edges marked (vertex-disjointly) by `kappa * u^k * v^l`; at
//! `(u, v) = (-1, -1)` they realise inclusion-exclusion over loops and
//! double edges.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::degree_set::{DegreeSet, DegreeSetError, Extent};
use crate::numeric::{big_rational, factorial, falling, ln_factorial, mantissa_exponent, rational_pow};
use crate::series_dp::{binomial_convolution, power_row};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("degree set {0} has a single member; only the regular closed form applies")]
    Regular(String),
    #[error("target mean degree {target} is outside the open interval ]{low}, {high}[")]
    OutsideRegime { target: f64, low: usize, high: Extent },
    #[error("saddle-point search failed to converge for target {0}")]
    NoConvergence(f64),
    #[error("instance needs at least one vertex")]
    NoVertices,
    #[error("instance is infeasible: {0}")]
    Infeasible(Feasibility),
    #[error(transparent)]
    DegreeSet(#[from] DegreeSetError),
}

/// Arithmetic emptiness tests on `(D, n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// `2m < n * min(D)`.
    BelowValuation,
    /// `2m > n * max(D)`.
    AboveMaxDegree,
    /// `p` does not divide `2m - r n`.
    Periodicity { period: usize },
    /// no vertices but a positive number of edges
    NoVertices,
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        self == Feasibility::Feasible
    }
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feasibility::Feasible => f.write_str("feasible"),
            Feasibility::BelowValuation => f.write_str("2m is below n * min(D)"),
            Feasibility::AboveMaxDegree => f.write_str("2m is above n * max(D)"),
            Feasibility::Periodicity { period } => {
                write!(f, "periodicity {period} does not divide 2m - n * min(D)")
            }
            Feasibility::NoVertices => f.write_str("edges without vertices"),
        }
    }
}

/// Necessary conditions for `MG^(D)_{n,m}` to be nonempty. They are also
/// sufficient once `n` is large; tiny instances can still be empty.
pub fn feasibility(d: &DegreeSet, n: usize, m: usize) -> Feasibility {
    let total = 2 * m;
    if n == 0 {
        return if m == 0 { Feasibility::Feasible } else { Feasibility::NoVertices };
    }
    let r = d.valuation();
    if total < r * n {
        return Feasibility::BelowValuation;
    }
    if let Extent::Finite(max) = d.max_degree() {
        if total > max * n {
            return Feasibility::AboveMaxDegree;
        }
    }
    // a singleton set is pinned by the two bounds above
    match d.periodicity() {
        Extent::Finite(p) if !(total - r * n).is_multiple_of(p) => Feasibility::Periodicity { period: p },
        _ => Feasibility::Feasible,
    }
}

/// `ln(Set_{D-i}(x) / Set_D(x))`, `-inf` when `D - i` is empty.
fn ln_shift_ratio(d: &DegreeSet, i: usize, x: f64) -> f64 {
    match d.shift(i) {
        Ok(s) => s.egf_log_eval(x) - d.egf_log_eval(x),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn require_non_monomial(d: &DegreeSet) -> Result<(), AnalyticError> {
    if d.is_singleton() {
        Err(AnalyticError::Regular(d.to_string()))
    } else {
        Ok(())
    }
}

/// `phi(x) = x Set_{D-1}(x) / Set_D(x)`, the mean of the Boltzmann degree law.
pub fn phi(d: &DegreeSet, x: f64) -> Result<f64, AnalyticError> {
    require_non_monomial(d)?;
    Ok(x * ln_shift_ratio(d, 1, x).exp())
}

/// `phi'(x) = (Set_{D-1} + x Set_{D-2}) / Set_D - x (Set_{D-1} / Set_D)^2`.
pub fn phi_prime(d: &DegreeSet, x: f64) -> Result<f64, AnalyticError> {
    require_non_monomial(d)?;
    let r1 = ln_shift_ratio(d, 1, x).exp();
    let r2 = ln_shift_ratio(d, 2, x).exp();
    Ok(r1 + x * r2 - x * r1 * r1)
}

/// Positive root of `phi(x) = target`.
///
/// Brackets from `x = 1` by doubling or halving, bisects down to a relative
/// width of `1e-3`, then finishes with safeguarded Newton steps.
pub fn solve_phi(d: &DegreeSet, target: f64) -> Result<f64, AnalyticError> {
    require_non_monomial(d)?;
    let low = d.valuation();
    let high = d.max_degree();
    let above_low = target > low as f64;
    let below_high = high.finite().is_none_or(|mx| target < mx as f64);
    if !(above_low && below_high && target.is_finite()) {
        return Err(AnalyticError::OutsideRegime { target, low, high });
    }
    let f = |x: f64| phi(d, x).map(|v| v - target);

    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    if f(1.0)? < 0.0 {
        let mut steps = 0;
        while f(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(AnalyticError::NoConvergence(target));
            }
        }
    } else {
        let mut steps = 0;
        while f(lo)? > 0.0 {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > 200 {
                return Err(AnalyticError::NoConvergence(target));
            }
        }
    }

    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x)?;
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = phi_prime(d, x)?;
        let mut next = x - fx / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() <= 1e-15 * x || hi - lo <= 4.0 * f64::EPSILON * hi;
        x = next;
        if done {
            break;
        }
    }
    if (f(x)?).abs() <= 1e-12 * target {
        Ok(x)
    } else {
        Err(AnalyticError::NoConvergence(target))
    }
}

/// Saddle point and the derived quantities for one `(D, n, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub zeta: f64,
    pub phi_at_zeta: f64,
    pub phi_prime_at_zeta: f64,
    pub w_at_zeta: f64,
    pub log_set_at_zeta: f64,
}

pub fn solve_saddle(d: &DegreeSet, n: usize, m: usize) -> Result<SaddleData, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::NoVertices);
    }
    let zeta = solve_phi(d, 2.0 * m as f64 / n as f64)?;
    Ok(SaddleData {
        zeta,
        phi_at_zeta: phi(d, zeta)?,
        phi_prime_at_zeta: phi_prime(d, zeta)?,
        w_at_zeta: w_value(d, n, m, zeta)?,
        log_set_at_zeta: d.egf_log_eval(zeta),
    })
}

/// `W_{n/m}(x) = (n / 4m) x^2 Set_{D-2}(x) / Set_D(x)`.
pub fn w_value(d: &DegreeSet, n: usize, m: usize, zeta: f64) -> Result<f64, AnalyticError> {
    if m == 0 {
        return Ok(0.0);
    }
    Ok(n as f64 / (4.0 * m as f64) * zeta * zeta * ln_shift_ratio(d, 2, zeta).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `r < 2m/n < max(D)`: saddle-point formula.
    Saddle(SaddleData),
    /// Every vertex is forced to the same degree: regular set, or `2m/n`
    /// sitting on `min(D)` or `max(D)`. Closed form.
    Degenerate { degree: usize },
    Infeasible(Feasibility),
}

/// Natural log of an asymptotic count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCount {
    pub n: usize,
    pub m: usize,
    pub feasible: bool,
    /// `-inf` when infeasible.
    pub log_value: f64,
    pub regime: Regime,
}

impl AsymptoticCount {
    pub fn log10(&self) -> f64 {
        self.log_value / std::f64::consts::LN_10
    }

    pub fn mantissa_exponent(&self) -> Option<(f64, i64)> {
        mantissa_exponent(self.log_value)
    }

    pub fn saddle(&self) -> Option<&SaddleData> {
        match &self.regime {
            Regime::Saddle(s) => Some(s),
            _ => None,
        }
    }
}

/// `ln((2m)! / (2^m m!))`.
fn ln_pairing_prefactor(m: usize) -> f64 {
    ln_factorial(2 * m) - m as f64 * LN_2 - ln_factorial(m)
}

fn classify_regime(d: &DegreeSet, n: usize, m: usize) -> Result<Regime, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::NoVertices);
    }
    let feas = feasibility(d, n, m);
    if !feas.is_feasible() {
        return Ok(Regime::Infeasible(feas));
    }
    let r = d.valuation();
    if d.is_singleton() || 2 * m == r * n {
        return Ok(Regime::Degenerate { degree: r });
    }
    if let Extent::Finite(max) = d.max_degree() {
        if 2 * m == max * n {
            return Ok(Regime::Degenerate { degree: max });
        }
    }
    Ok(Regime::Saddle(solve_saddle(d, n, m)?))
}

/// Estimated total weight of `MG^(D)_{n,m}`.
pub fn mg_asymptotic(d: &DegreeSet, n: usize, m: usize) -> Result<AsymptoticCount, AnalyticError> {
    let regime = classify_regime(d, n, m)?;
    let log_value = match &regime {
        Regime::Infeasible(_) => f64::NEG_INFINITY,
        Regime::Degenerate { degree } => ln_pairing_prefactor(m) - n as f64 * ln_factorial(*degree),
        Regime::Saddle(s) => {
            let p = d.periodicity().finite().expect("non-monomial set has finite periodicity");
            ln_pairing_prefactor(m) + (p as f64).ln()
                - 0.5 * (2.0 * PI * n as f64 * s.zeta * s.phi_prime_at_zeta).ln()
                + n as f64 * s.log_set_at_zeta
                - 2.0 * m as f64 * s.zeta.ln()
        }
    };
    Ok(AsymptoticCount { n, m, feasible: !matches!(regime, Regime::Infeasible(_)), log_value, regime })
}

/// `W` for the regime: the saddle value, or `(d - 1)/2` when every degree is `d`.
fn regime_w(regime: &Regime) -> f64 {
    match regime {
        Regime::Saddle(s) => s.w_at_zeta,
        Regime::Degenerate { degree } => (*degree as f64 - 1.0).max(0.0) / 2.0,
        Regime::Infeasible(_) => 0.0,
    }
}

/// Estimated number of simple graphs in `SG^(D)_{n,m}`.
pub fn sg_asymptotic(d: &DegreeSet, n: usize, m: usize) -> Result<AsymptoticCount, AnalyticError> {
    let mut count = mg_asymptotic(d, n, m)?;
    if count.feasible {
        let w = regime_w(&count.regime);
        count.log_value -= w * w + w;
    }
    Ok(count)
}

/// Asymptotic probability that a `kappa`-weighted multigraph is simple,
/// `exp(-W^2 - W)`. The expected number of trials is its reciprocal.
pub fn acceptance_probability(d: &DegreeSet, n: usize, m: usize) -> Result<f64, AnalyticError> {
    match classify_regime(d, n, m)? {
        Regime::Infeasible(f) => Err(AnalyticError::Infeasible(f)),
        regime => {
            let w = regime_w(&regime);
            Ok((-w * w - w).exp())
        }
    }
}

/// `a_{n,m,j} = n!/((n-j)! n^j) * m!/((m-j)! m^j) * (2m-2j)! (2m)^{2j} / (2m)!`,
/// zero when `j > min(n, m)`.
pub fn a_coefficient(n: usize, m: usize, j: usize) -> BigRational {
    if j > n.min(m) {
        return BigRational::zero();
    }
    if j == 0 {
        return BigRational::one();
    }
    let two_m = BigUint::from(2 * m);
    let num = falling(n, j) * falling(m, j) * factorial(2 * m - 2 * j) * num_traits::pow(two_m, 2 * j);
    let den = num_traits::pow(BigUint::from(n), j) * num_traits::pow(BigUint::from(m), j) * factorial(2 * m);
    big_rational(num, den)
}

/// `j! [x^j] Set_{D-2}^a Set_D^b` from precomputed rows.
fn mixed_from(shifted: &DegreeSet, d: &DegreeSet, a: usize, b: usize, j: usize) -> BigUint {
    let main = power_row(d, b, j);
    if a == 0 {
        return main[j].clone();
    }
    let low = power_row(shifted, a, j);
    binomial_convolution(&low, &main, j)
}

/// Exact `Marked_{MG^(D)_{n,m}}(u, v)` via the constructive sum over
/// `k` marked double edges and `l` marked loops:
///
/// ```text
/// 1/(2^m m!) sum_{k,l} C(n; 2k, l) (2k)!/(2^k k!) (2k)! 2^k l! C(m; 2k, l)
///                      * mixed(2k + l, n - 2k - l, 2m - 4k - 2l) u^k v^l
/// ```
pub fn marked_weight_exact(
    d: &DegreeSet,
    n: usize,
    m: usize,
    u: &BigRational,
    v: &BigRational,
) -> Result<BigRational, AnalyticError> {
    let shifted = d.shift(2)?;
    let mut total = BigRational::zero();
    for j in 0..=n.min(m) {
        let mixed = mixed_from(&shifted, d, j, n - j, 2 * m - 2 * j);
        if mixed.is_zero() {
            continue;
        }
        // n!/(n-j)! * m!/(m-j)! shared by every split of j
        let common = falling(n, j) * falling(m, j) * mixed;
        for k in 0..=j / 2 {
            let l = j - 2 * k;
            // C(n;2k,l) (2k)!/(2^k k!) (2k)! 2^k l! C(m;2k,l) = n!/(n-j)! m!/(m-j)! / (k! l!)
            let den = factorial(k) * factorial(l);
            let coef = big_rational(common.clone(), den);
            total += coef * rational_pow(u, k) * rational_pow(v, l);
        }
    }
    let den = (BigUint::one() << m) * factorial(m);
    Ok(total / BigRational::from_integer(BigInt::from(den)))
}

/// Same quantity through the compact form
/// `(2m)!/(2^m m!) [x^{2m}] sum_{k,l} a_{n,m,2k+l} (u W^2)^k/k! (v W)^l/l! Set_D^n`,
/// expanding `W^j Set_D^n = (n/4m)^j x^{2j} Set_{D-2}^j Set_D^{n-j}`.
pub fn marked_weight_compact(
    d: &DegreeSet,
    n: usize,
    m: usize,
    u: &BigRational,
    v: &BigRational,
) -> Result<BigRational, AnalyticError> {
    let shifted = d.shift(2)?;
    let prefactor = big_rational(factorial(2 * m), (BigUint::one() << m) * factorial(m));
    let mut total = BigRational::zero();
    for j in 0..=n.min(m) {
        let mixed = mixed_from(&shifted, d, j, n - j, 2 * m - 2 * j);
        if mixed.is_zero() {
            continue;
        }
        // [x^{2m-2j}] of the product, as a rational
        let coeff = big_rational(mixed, factorial(2 * m - 2 * j));
        let w_power = if j == 0 {
            BigRational::one()
        } else {
            rational_pow(&big_rational(BigUint::from(n), BigUint::from(4 * m)), j)
        };
        let base = &prefactor * a_coefficient(n, m, j) * w_power * coeff;
        for k in 0..=j / 2 {
            let l = j - 2 * k;
            let split = big_rational(BigUint::one(), factorial(k) * factorial(l));
            total += &base * split * rational_pow(u, k) * rational_pow(v, l);
        }
    }
    Ok(total)
}
