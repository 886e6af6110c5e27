//! Small numeric helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `ln(k!)`, exact-rounded table up to 170 and log-gamma beyond.
pub fn ln_factorial(k: usize) -> f64 {
    statrs::function::factorial::ln_factorial(k as u64)
}

/// `ln(x)` of a big integer, relative accuracy close to one ulp of the result.
pub fn biguint_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("top bits fit in u64");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln|q|`, `-inf` for zero.
pub fn rational_ln(q: &BigRational) -> f64 {
    let num = q.numer().abs().to_biguint().expect("nonnegative");
    let den = q.denom().abs().to_biguint().expect("nonnegative");
    biguint_ln(&num) - biguint_ln(&den)
}

pub fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1) as u64..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Row `C(n, 0..=n)` computed incrementally.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = BigUint::one();
    row.push(acc.clone());
    for k in 1..=n {
        acc = acc * (n - k + 1) as u64 / k as u64;
        row.push(acc.clone());
    }
    row
}

pub fn big_rational(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_uint(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Integer power of a rational, `0^0 = 1`.
pub fn rational_pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Natural log split into base-10 mantissa and exponent.
pub fn mantissa_exponent(ln_value: f64) -> Option<(f64, i64)> {
    if !ln_value.is_finite() {
        return None;
    }
    let log10 = ln_value / std::f64::consts::LN_10;
    // absorb rounding just below an integer power of ten
    let exponent = (log10 + 1e-12 * log10.abs().max(1.0)).floor();
    let mantissa = 10f64.powf(log10 - exponent);
    Some((mantissa, exponent as i64))
}
