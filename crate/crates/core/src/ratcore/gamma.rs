use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{frac, int, is_nonpositive_integer, rat, RatError, Rational};

/// Pochhammer symbol `(x)_k`.
///
/// For `k >= 0` this is `x (x+1) ... (x+k-1)`. For `k < 0` it is
/// `1 / ((x-1)(x-2)...(x-|k|))`, so that `Γ(x+k)/Γ(x) = rising_factorial(x, k)`
/// holds for every integer `k`.
pub fn rising_factorial(x: &Rational, k: i64) -> Result<Rational, RatError> {
    let mut acc = Rational::one();
    if k >= 0 {
        for j in 0..k {
            acc *= x + int(j);
        }
        return Ok(acc);
    }
    for j in 1..=(-k) {
        let f = x - int(j);
        if f.is_zero() {
            return Err(RatError::Pole(format!("rising_factorial({x}, {k}) divides by zero")));
        }
        acc *= f;
    }
    Ok(acc.recip())
}

/// Argument of a gamma function inside a [`gamma_quotient`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GammaArg(pub Rational);

impl GammaArg {
    pub fn new(x: Rational) -> Self {
        GammaArg(x)
    }

    pub fn int(n: i64) -> Self {
        GammaArg(int(n))
    }
}

impl From<Rational> for GammaArg {
    fn from(x: Rational) -> Self {
        GammaArg(x)
    }
}

/// `Γ(-k+ε)` behaves like `(-1)^k / (k! ε)`; this returns the coefficient `(-1)^k / k!`.
fn pole_residue(x: &Rational) -> Rational {
    let k = (-x).to_integer().to_u64().expect("pole order fits in u64");
    let mut f = BigInt::one();
    for j in 2..=k {
        f *= j;
    }
    let sign = if k.is_odd() { -1 } else { 1 };
    Rational::new(BigInt::from(sign), f)
}

/// Exact value of `Π Γ(numer) / Π Γ(denom)`.
///
/// Arguments are grouped by fractional part, and each group is paired in sorted
/// order; every pair differs by an integer and collapses to a rising factorial.
/// Inside the integer group a reciprocal gamma at a non-positive integer is zero,
/// so a surplus of such arguments in the denominator makes the quotient vanish.
/// Equal pole counts cancel through their residues.
pub fn gamma_quotient(numer: &[GammaArg], denom: &[GammaArg]) -> Result<Rational, RatError> {
    let mut classes: BTreeMap<Rational, (Vec<Rational>, Vec<Rational>)> = BTreeMap::new();
    for a in numer {
        classes.entry(frac(&a.0)).or_default().0.push(a.0.clone());
    }
    for b in denom {
        classes.entry(frac(&b.0)).or_default().1.push(b.0.clone());
    }
    for (f, (a, b)) in &classes {
        if a.len() != b.len() {
            return Err(RatError::Unpairable(format!(
                "{} numerator vs {} denominator arguments with fractional part {f}",
                a.len(),
                b.len()
            )));
        }
    }

    let mut acc = Rational::one();
    for (f, (mut a, mut b)) in classes {
        if f.is_zero() {
            let (pa, qa): (Vec<_>, Vec<_>) = a.into_iter().partition(is_nonpositive_integer);
            let (pb, qb): (Vec<_>, Vec<_>) = b.into_iter().partition(is_nonpositive_integer);
            if pb.len() > pa.len() {
                return Ok(Rational::zero());
            }
            if pa.len() > pb.len() {
                return Err(RatError::Pole(format!("gamma at non-positive integer {}", pa[0])));
            }
            let pair = |mut x: Vec<Rational>, mut y: Vec<Rational>, acc: &mut Rational| {
                x.sort();
                y.sort();
                for (u, v) in x.iter().zip(&y) {
                    let k = (u - v).to_integer().to_i64().expect("shift fits in i64");
                    *acc *= rising_factorial(v, k).expect("positive integers are never poles");
                }
            };
            pair(qa, qb, &mut acc);
            for (u, v) in pa.iter().zip(pb.iter()) {
                acc *= pole_residue(u) / pole_residue(v);
            }
            continue;
        }
        a.sort();
        b.sort();
        for (u, v) in a.iter().zip(&b) {
            let k = (u - v).to_integer().to_i64().expect("shift fits in i64");
            acc *= rising_factorial(v, k)?;
        }
    }
    Ok(acc)
}

/// A value `coeff · π^(half_pi_power/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiRational {
    pub coeff: Rational,
    pub half_pi_power: i32,
}

impl PiRational {
    pub fn rational(coeff: Rational) -> Self {
        PiRational { coeff, half_pi_power: 0 }
    }

    pub fn mul(&self, o: &PiRational) -> PiRational {
        PiRational {
            coeff: &self.coeff * &o.coeff,
            half_pi_power: self.half_pi_power + o.half_pi_power,
        }
    }

    pub fn div(&self, o: &PiRational) -> PiRational {
        PiRational {
            coeff: &self.coeff / &o.coeff,
            half_pi_power: self.half_pi_power - o.half_pi_power,
        }
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.coeff) * std::f64::consts::PI.powf(self.half_pi_power as f64 / 2.0)
    }
}

/// `Γ(x)` for `x` a positive integer or positive half-integer, as rational · √π^k.
pub fn gamma_half_integer(x: &Rational) -> Result<PiRational, RatError> {
    if !x.is_positive() {
        return Err(RatError::Pole(format!("gamma_half_integer needs x > 0, got {x}")));
    }
    let f = frac(x);
    if f.is_zero() {
        return Ok(PiRational::rational(rising_factorial(&int(1), (x - int(1)).to_integer().to_i64().unwrap())?));
    }
    if f != rat(1, 2) {
        return Err(RatError::Unpairable(format!("Γ({x}) is not rational times a power of √π")));
    }
    let k = (x - rat(1, 2)).to_integer().to_i64().unwrap();
    Ok(PiRational { coeff: rising_factorial(&rat(1, 2), k)?, half_pi_power: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[Rational]) -> Vec<GammaArg> {
        v.iter().cloned().map(GammaArg).collect()
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(&rat(1, 2), 2).unwrap(), rat(3, 4));
        assert_eq!(rising_factorial(&rat(17, 5), 0).unwrap(), int(1));
        assert_eq!(rising_factorial(&int(3), 3).unwrap(), int(60));
        assert_eq!(rising_factorial(&int(4), -2).unwrap(), rat(1, 6));
        assert!(matches!(rising_factorial(&int(2), -2), Err(RatError::Pole(_))));
    }

    #[test]
    fn quotient_examples() {
        let v = gamma_quotient(&g(&[int(2), rat(3, 2)]), &g(&[int(3), rat(1, 2)])).unwrap();
        assert_eq!(v, rat(1, 4));
        assert_eq!(gamma_quotient(&g(&[int(5)]), &g(&[int(5)])).unwrap(), int(1));
        assert_eq!(gamma_quotient(&g(&[int(1)]), &g(&[int(-1)])).unwrap(), int(0));
    }

    #[test]
    fn pole_ratio_limit() {
        // Γ(-2+ε)/Γ(-1+ε) -> ((1/2)) / (-1) = -1/2
        let v = gamma_quotient(&g(&[int(-2)]), &g(&[int(-1)])).unwrap();
        assert_eq!(v, rat(-1, 2));
        assert!(matches!(gamma_quotient(&g(&[int(0)]), &g(&[int(3)])), Err(RatError::Pole(_))));
    }

    #[test]
    fn unpairable_is_rejected() {
        let r = gamma_quotient(&g(&[int(1)]), &g(&[rat(1, 2)]));
        assert!(matches!(r, Err(RatError::Unpairable(_))));
    }

    #[test]
    fn half_integer_gammas() {
        assert_eq!(gamma_half_integer(&rat(1, 2)).unwrap(), PiRational { coeff: int(1), half_pi_power: 1 });
        assert_eq!(gamma_half_integer(&rat(5, 2)).unwrap(), PiRational { coeff: rat(3, 4), half_pi_power: 1 });
        assert_eq!(gamma_half_integer(&int(5)).unwrap(), PiRational::rational(int(24)));
        assert!(gamma_half_integer(&rat(1, 3)).is_err());
    }
}
