//! The Stieltjes function `ψ_s(x) = ∫₀^∞ w^s e^{-w} / (x+w) dw`, by two routes.
//!
//! Route A is the incomplete-gamma identity
//! `ψ_s(x) = Γ(s+1) x^s e^x Γ(-s, x)`. Route B is a double-exponential
//! quadrature, taken in `w` when `x >= 1` and in `v = w/x` otherwise so the pole
//! at `w = -x` stays at unit distance from the contour. Every value is returned
//! only after both routes agree to 10 ulps at the working precision.

use std::sync::RwLock;

use rug::ops::Pow;
use rug::Float;

use crate::quad::{lower_cut, node, upper_cut};
use crate::KernelError;

/// Extra bits carried by both routes before the comparison.
pub const GUARD_BITS: u32 = 32;

/// Allowed route disagreement, in units in the last place at working precision.
pub const ULP_TOLERANCE: u32 = 10;

struct PsiNode {
    r: Float,
    /// `w r^α e^{-r}`.
    big: Float,
    /// `w r^α / (1 + r)`.
    small: Float,
}

/// `ψ_{α+j}(x)` for `j = 0..count` at one precision.
pub struct PsiFamily {
    prec: u32,
    wp: u32,
    alpha: Float,
    count: usize,
    h: Float,
    k_lo: i64,
    k_big: i64,
    target: f64,
    nodes: RwLock<Vec<PsiNode>>,
}

impl PsiFamily {
    /// `alpha` must exceed -1.
    pub fn new(alpha: &Float, count: usize, prec: u32) -> Self {
        let wp = prec + GUARD_BITS;
        let target = wp as f64 * std::f64::consts::LN_2 + 10.0;
        let hf = 2.0 * std::f64::consts::PI * 0.8 / target;
        let a = alpha.to_f64();
        let k_lo = (lower_cut(a, target) / hf).floor() as i64;
        let k_big = (upper_cut(1.0, a + count as f64, target) / hf).ceil() as i64;
        PsiFamily {
            prec,
            wp,
            alpha: Float::with_val(wp, alpha),
            count,
            h: Float::with_val(wp, hf),
            k_lo,
            k_big,
            target,
            nodes: RwLock::new(Vec::new()),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn ensure(&self, k_hi: i64) {
        let need = (k_hi - self.k_lo + 1) as usize;
        if self.nodes.read().unwrap().len() >= need {
            return;
        }
        let mut g = self.nodes.write().unwrap();
        while g.len() < need {
            let k = self.k_lo + g.len() as i64;
            let (r, w) = node(k, &self.h, self.wp);
            let ra = Float::with_val(self.wp, (&r).pow(&self.alpha)) * &w;
            let big = Float::with_val(self.wp, -&r).exp() * &ra;
            let small = ra / Float::with_val(self.wp, &r + 1u32);
            g.push(PsiNode { r, big, small });
        }
    }

    /// Route A at the guarded precision.
    pub fn route_a(&self, x: &Float) -> Result<Vec<Float>, KernelError> {
        let wp = self.wp;
        let x = Float::with_val(wp, x);
        (0..self.count)
            .map(|j| {
                let s = Float::with_val(wp, &self.alpha + j as u32);
                let gs = Float::with_val(wp, &s + 1u32).gamma();
                Ok(scaled_upper_gamma(&Float::with_val(wp, -&s), &x)? * gs)
            })
            .collect()
    }

    /// Route B at the guarded precision.
    pub fn route_b(&self, x: &Float) -> Vec<Float> {
        let wp = self.wp;
        let x = Float::with_val(wp, x);
        let mut acc = vec![Float::new(wp); self.count];
        if x >= 1 {
            self.ensure(self.k_big);
            let g = self.nodes.read().unwrap();
            for n in g.iter().take((self.k_big - self.k_lo + 1) as usize) {
                let mut t = Float::with_val(wp, &x + &n.r);
                t.recip_mut();
                t *= &n.big;
                for a in acc.iter_mut() {
                    *a += &t;
                    t *= &n.r;
                }
            }
            return acc;
        }
        let a = self.alpha.to_f64();
        let hf = self.h.to_f64();
        let k_hi = (upper_cut(x.to_f64(), a + self.count as f64 - 1.0, self.target) / hf).ceil() as i64;
        self.ensure(k_hi);
        let g = self.nodes.read().unwrap();
        for n in g.iter().take((k_hi - self.k_lo + 1) as usize) {
            let mut t = Float::with_val(wp, &x * &n.r);
            t = -t;
            t.exp_mut();
            t *= &n.small;
            for a in acc.iter_mut() {
                *a += &t;
                t *= &n.r;
            }
        }
        let mut xs = Float::with_val(wp, (&x).pow(&self.alpha));
        for a in acc.iter_mut() {
            *a *= &xs;
            xs *= &x;
        }
        acc
    }

    /// Both routes, compared to [`ULP_TOLERANCE`] and rounded to working precision.
    pub fn eval(&self, x: &Float) -> Result<Vec<Float>, KernelError> {
        if *x <= 0 {
            return Err(KernelError::Domain(format!("psi needs x > 0, got {}", x.to_f64())));
        }
        let a = self.route_a(x)?;
        let b = self.route_b(x);
        let mut out = Vec::with_capacity(self.count);
        for (j, (u, v)) in a.iter().zip(&b).enumerate() {
            let diff = Float::with_val(self.wp, u - v).abs();
            let tol = ulp(u, self.prec) * ULP_TOLERANCE;
            if !u.is_finite() || !v.is_finite() || diff > tol {
                return Err(KernelError::Precision(format!(
                    "psi routes disagree at s = alpha + {j}, x = {:e}: {:e} vs {:e}",
                    x.to_f64(),
                    u.to_f64(),
                    v.to_f64()
                )));
            }
            out.push(Float::with_val(self.prec, u));
        }
        Ok(out)
    }
}

/// Above this argument the continued fraction replaces MPFR's series, whose cost
/// grows quickly with `x`.
pub const CF_THRESHOLD: f64 = 30.0;

/// `e^x x^{-a} Γ(a, x)` at the precision of `x`.
pub fn scaled_upper_gamma(a: &Float, x: &Float) -> Result<Float, KernelError> {
    let wp = x.prec();
    if x.to_f64() <= CF_THRESHOLD {
        let g = Float::with_val(wp, a).gamma_inc(x);
        let xa = Float::with_val(wp, x.pow(a));
        return Ok(g * Float::with_val(wp, x.exp_ref()) / xa);
    }
    // Legendre's continued fraction, modified Lentz.
    let eps = Float::with_val(wp, 1u32) >> (wp as i32 - 2);
    let tiny = Float::with_val(wp, 1u32) >> (wp as i32 * 4);
    let mut b = Float::with_val(wp, x + 1u32) - a;
    let mut c = Float::with_val(wp, 1u32) / &tiny;
    let mut d = Float::with_val(wp, 1u32) / &b;
    let mut h = d.clone();
    for i in 1..20_000u32 {
        let an = Float::with_val(wp, a - i) * i;
        b += 2u32;
        d = Float::with_val(wp, &an * &d) + &b;
        if d.is_zero() {
            d = tiny.clone();
        }
        c = Float::with_val(wp, &an / &c) + &b;
        if c.is_zero() {
            c = tiny.clone();
        }
        d.recip_mut();
        let del = Float::with_val(wp, &d * &c);
        h *= &del;
        if Float::with_val(wp, &del - 1u32).abs() < eps {
            return Ok(h);
        }
    }
    Err(KernelError::Precision(format!("upper gamma continued fraction stalled at x = {:e}", x.to_f64())))
}

/// One unit in the last place of `v` at `prec` bits.
pub fn ulp(v: &Float, prec: u32) -> Float {
    let e = v.get_exp().unwrap_or(0);
    Float::with_val(v.prec(), 1u32) << (e - prec as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree_across_scales() {
        for (a, prec) in [(-0.5, 200u32), (1.5, 200), (0.0, 128), (-1.0 / 3.0, 160)] {
            let fam = PsiFamily::new(&Float::with_val(prec, a), 6, prec);
            for x in [1e-40, 1e-9, 0.03, 0.5, 1.0, 2.7, 40.0, 300.0] {
                let v = fam.eval(&Float::with_val(prec, x));
                assert!(v.is_ok(), "alpha={a} x={x}: {:?}", v.err());
            }
        }
    }

    #[test]
    fn psi_zero_at_one() {
        let fam = PsiFamily::new(&Float::with_val(200, 0), 1, 200);
        let v = fam.eval(&Float::with_val(200, 1)).unwrap()[0].to_f64();
        assert!(v > 0.0 && v < 1.0);
        assert!((v - 0.596_347_362_323_194_1).abs() < 1e-15);
    }

    #[test]
    fn large_argument_limit() {
        let fam = PsiFamily::new(&Float::with_val(200, 0.5), 3, 200);
        let x = Float::with_val(200, 1e8);
        for (j, v) in fam.eval(&x).unwrap().iter().enumerate() {
            let lim = Float::with_val(200, 1.5 + j as f64).gamma().to_f64();
            assert!(((v.to_f64() * 1e8) / lim - 1.0).abs() < 1e-6);
        }
    }
}
