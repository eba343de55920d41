//! Exact rational arithmetic, gamma quotients and polynomial fractions.
//!
//! Every exact scalar in the crate is a [`Rational`]. Gamma functions are never
//! evaluated directly: a quotient of gammas is rational exactly when its
//! arguments pair up with integer differences, and each pair collapses to a
//! finite rising factorial.

mod expr;
mod gamma;
mod poly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use expr::parse_polyfrac;
pub use gamma::{gamma_half_integer, gamma_quotient, rising_factorial, GammaArg, PiRational};
pub use poly::{polyfrac_eval, Poly, PolyFraction};

/// Arbitrary-precision exact fraction, always in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("pole: {0}")]
    Pole(String),
    #[error("gamma arguments cannot be paired: {0}")]
    Unpairable(String),
    #[error("non-removable pole at {0}")]
    TruePole(String),
    #[error("missing binding for indeterminate `{0}`")]
    Unbound(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q` into an exact rational. No floating forms are accepted.
pub fn parse_rational(s: &str) -> Result<Rational, RatError> {
    let bad = |msg: &str| RatError::Parse { pos: 0, msg: format!("{msg}: `{s}`") };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad("invalid numerator"))?;
    let d: BigInt = den.parse().map_err(|_| bad("invalid denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Binomial coefficient C(n, k) for `0 <= k <= n`; zero otherwise.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// True when `x` is an integer `<= 0`.
pub fn is_nonpositive_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_positive()
}

/// Converts to `f64`, losing precision. Presentation only.
pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Very large numerators overflow f64; divide in log space.
        let (n, d) = (x.numer(), x.denom());
        let shift = n.bits().max(d.bits()).saturating_sub(1000) as u64;
        let n2 = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let d2 = (d >> shift).to_f64().unwrap_or(f64::NAN);
        n2 / d2
    })
}

/// Decimal expansion of `x` with `digits` digits after the point, truncated toward zero.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale) / a.denom();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        s.push('.');
        let f = frac_part.to_string();
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("7/3").unwrap(), rat(7, 3));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 6), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&rat(7, 8), 3), "0.875");
        assert_eq!(to_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(to_decimal(&int(2), 0), "2");
        assert_eq!(to_decimal(&rat(1, 20), 2), "0.05");
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&rat(-1, 2)), rat(1, 2));
        assert_eq!(frac(&rat(7, 3)), rat(1, 3));
        assert_eq!(frac(&int(-4)), int(0));
    }
}
