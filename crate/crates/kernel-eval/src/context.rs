//! Pointwise evaluation of the biorthogonal system and the correlation kernels.

use rug::ops::Pow;
use rug::Float;

use purity_core::kernel_integrals::KernelKind;

use crate::terms::density_terms;
use purity_core::ratcore::{gamma_half_integer, int, rising_factorial, PiRational, RatError, Rational};
use purity_core::recurrence::{normalized_h, CoeffTables, EnsembleParams};

use crate::psi::{scaled_upper_gamma, PsiFamily, GUARD_BITS};
use crate::KernelError;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 200;

/// Lowest accepted working precision.
pub const MIN_PRECISION: u32 = 128;

/// Exact value of a finite float.
pub fn float_to_rational(x: &Float) -> Rational {
    let (mant, exp) = x.to_integer_exp().expect("finite float");
    let mant: Rational = mant.to_string().parse().expect("integer literal");
    mant * Rational::from_integer(2.into()).pow(exp)
}

/// Exact rational as a float at `prec` bits.
pub fn rat_to_float(x: &Rational, prec: u32) -> Float {
    let n = Float::with_val(prec, Float::parse(x.numer().to_string()).expect("integer literal"));
    let d = Float::with_val(prec, Float::parse(x.denom().to_string()).expect("integer literal"));
    n / d
}

/// `Γ(i+α+1) Γ(j+α+2) / (i+j+2α+2)`, the bimoment of the weight `W`.
///
/// Exact as rational times a power of `√π` whenever `2α` is an integer.
pub fn bimoment(i: usize, j: usize, params: &EnsembleParams) -> Result<PiRational, RatError> {
    let a = &params.alpha;
    let gi = gamma_half_integer(&(a + int(i as i64 + 1)))?;
    let gj = gamma_half_integer(&(a + int(j as i64 + 2)))?;
    let den = a * int(2) + int((i + j) as i64 + 2);
    Ok(PiRational { coeff: gi.coeff * gj.coeff / den, half_pi_power: gi.half_pi_power + gj.half_pi_power })
}

/// Which biorthogonal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `p_k`, or its Cauchy transform `P_k`.
    P,
    /// `q_k`, or its Cauchy transform `Q_k`.
    Q,
}

/// Everything the kernels need at one abscissa.
#[derive(Debug, Clone)]
pub struct NodeValues {
    pub x: Float,
    pub p: Vec<Float>,
    pub q: Vec<Float>,
    /// `-x^α e^{-x} Q_k(-x)`.
    pub phi: Vec<Float>,
    /// `-x^{α+1} e^{-x} P_k(-x)`.
    pub chi: Vec<Float>,
    /// `x^α e^{-x}`.
    pub wa: Float,
    /// `x^{α+1} e^{-x}`.
    pub wb: Float,
}

/// Coefficient tables and normalizations at one working precision.
pub struct KernelContext {
    pub params: EnsembleParams,
    pub tables: CoeffTables,
    pub precision_bits: u32,
    /// `h_k / (Γ(α+1)Γ(α+2))`, exact.
    pub h_ratio: Vec<Rational>,
    alpha: Float,
    z: Float,
    inv_h: Vec<Float>,
    a: Vec<Vec<Float>>,
    a_hat: Vec<Vec<Float>>,
    psi: PsiFamily,
}

impl KernelContext {
    pub fn new(params: &EnsembleParams, precision_bits: u32) -> Result<Self, KernelError> {
        if precision_bits < MIN_PRECISION {
            return Err(KernelError::Domain(format!("precision must be at least {MIN_PRECISION} bits")));
        }
        let prec = precision_bits;
        let m = params.m;
        let tables = CoeffTables::new(params, m - 1, 0)?;
        let h_ratio: Vec<Rational> = (0..m).map(|k| normalized_h(k, &tables)).collect();
        let alpha = rat_to_float(&params.alpha, prec + GUARD_BITS);
        let z = Float::with_val(prec, &alpha + 1u32).gamma() * Float::with_val(prec, &alpha + 2u32).gamma();
        let inv_h = h_ratio.iter().map(|r| Float::with_val(prec, rat_to_float(r, prec) * &z).recip()).collect();
        let conv = |t: &Vec<Vec<Rational>>| -> Vec<Vec<Float>> {
            t.iter().map(|row| row.iter().map(|c| rat_to_float(c, prec)).collect()).collect()
        };
        let a = conv(&tables.a);
        let a_hat = conv(&tables.a_hat);
        let psi = PsiFamily::new(&alpha, m + 1, prec);
        Ok(KernelContext {
            params: params.clone(),
            tables,
            precision_bits,
            h_ratio,
            alpha: Float::with_val(prec, &alpha),
            z,
            inv_h,
            a,
            a_hat,
            psi,
        })
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn prec(&self) -> u32 {
        self.precision_bits
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.prec(), v)
    }

    /// `h_k` as rational times a power of `√π`, when `2α` is an integer.
    pub fn norm_h(&self, k: usize) -> Result<PiRational, KernelError> {
        let mut coeff = Rational::from_integer(0.into());
        let mut power = None;
        for (i, ai) in self.tables.a[k].iter().enumerate() {
            for (j, bj) in self.tables.a_hat[k].iter().enumerate() {
                let b = bimoment(i, j, &self.params)?;
                power = Some(b.half_pi_power);
                coeff += ai * bj * b.coeff;
            }
        }
        Ok(PiRational { coeff, half_pi_power: power.unwrap_or(0) })
    }

    /// `h_k` at working precision.
    pub fn norm_h_float(&self, k: usize) -> Float {
        Float::with_val(self.prec(), self.inv_h[k].recip_ref())
    }

    /// `Γ(α+1)Γ(α+2)`.
    pub fn weight_mass(&self) -> &Float {
        &self.z
    }

    /// `p_k(x)` or `q_k(x)` by Horner's rule.
    pub fn eval_poly(&self, family: Family, k: usize, x: &Float) -> Float {
        let c = match family {
            Family::P => &self.a[k],
            Family::Q => &self.a_hat[k],
        };
        let mut acc = Float::new(self.prec());
        for cj in c.iter().rev() {
            acc *= x;
            acc += cj;
        }
        acc
    }

    /// `ψ_{α+j}(x)` for `j = 0..=m`, both routes checked.
    pub fn psi(&self, x: &Float) -> Result<Vec<Float>, KernelError> {
        self.psi.eval(x)
    }

    /// `P_k(-x) = -Σ a_{k,j} ψ_{j+α}(x)` or `Q_k(-x) = -Σ â_{k,j} ψ_{j+α+1}(x)`.
    pub fn eval_cauchy(&self, family: Family, k: usize, x: &Float) -> Result<Float, KernelError> {
        let psi = self.psi(x)?;
        Ok(self.cauchy_from_psi(family, k, &psi))
    }

    fn cauchy_from_psi(&self, family: Family, k: usize, psi: &[Float]) -> Float {
        let (c, shift) = match family {
            Family::P => (&self.a[k], 0),
            Family::Q => (&self.a_hat[k], 1),
        };
        let mut acc = Float::new(self.prec());
        for (j, cj) in c.iter().enumerate() {
            acc -= Float::with_val(self.prec(), cj * &psi[j + shift]);
        }
        acc
    }

    /// All per-abscissa data for the kernels.
    pub fn node_values(&self, x: &Float) -> Result<NodeValues, KernelError> {
        let prec = self.prec();
        let m = self.m();
        let x = Float::with_val(prec, x);
        let psi = self.psi(&x)?;
        let ex = Float::with_val(prec, -&x).exp();
        let wa = Float::with_val(prec, (&x).pow(&self.alpha)) * &ex;
        let wb = Float::with_val(prec, &wa * &x);
        let p = (0..m).map(|k| self.eval_poly(Family::P, k, &x)).collect();
        let q = (0..m).map(|k| self.eval_poly(Family::Q, k, &x)).collect();
        let phi = (0..m).map(|k| -self.cauchy_from_psi(Family::Q, k, &psi) * &wa).collect();
        let chi = (0..m).map(|k| -self.cauchy_from_psi(Family::P, k, &psi) * &wb).collect();
        Ok(NodeValues { x, p, q, phi, chi, wa, wb })
    }

    /// `K_kind(x, y)` from precomputed node data.
    pub fn kernel_at(&self, kind: KernelKind, x: &NodeValues, y: &NodeValues) -> Float {
        let prec = self.prec();
        let (f, g) = match kind {
            KernelKind::K00 => (&x.p, &y.q),
            KernelKind::K01 => (&x.phi, &y.p),
            KernelKind::K10 => (&x.q, &y.chi),
            KernelKind::K11 => (&x.phi, &y.chi),
        };
        let mut acc = Float::new(prec);
        for k in 0..self.m() {
            acc += Float::with_val(prec, &f[k] * &g[k]) * &self.inv_h[k];
        }
        if kind == KernelKind::K11 {
            acc -= self.weight_at(x, y);
        }
        acc
    }

    /// `W(x, y) = x^α y^{α+1} e^{-x-y} / (x+y)`.
    pub fn weight_at(&self, x: &NodeValues, y: &NodeValues) -> Float {
        let prec = self.prec();
        Float::with_val(prec, &x.wa * &y.wb) / Float::with_val(prec, &x.x + &y.x)
    }

    /// `K_kind(x, y)` at two points.
    pub fn eval_kernel(&self, kind: KernelKind, x: &Float, y: &Float) -> Result<Float, KernelError> {
        check_positive(x)?;
        check_positive(y)?;
        let nx = self.node_values(x)?;
        let ny = if x == y { nx.clone() } else { self.node_values(y)? };
        Ok(self.kernel_at(kind, &nx, &ny))
    }

    /// `Γ(i+m+2α+2) / (Γ(i+2α+2) Γ(m-i) Γ(i+1))`, exact.
    fn ell_rational(&self, i: usize) -> Result<Rational, RatError> {
        let m = self.m() as i64;
        let i = i as i64;
        let top = rising_factorial(&(&self.params.alpha * int(2) + int(i + 2)), m)?;
        let f = rising_factorial(&int(1), m - i - 1)? * rising_factorial(&int(1), i)?;
        Ok(top / f)
    }

    fn eval_ell_one(&self, x: &Float) -> Result<Float, KernelError> {
        let xr = float_to_rational(x);
        let shift = &self.params.alpha + int(2);
        let mut acc = Rational::from_integer(0.into());
        for i in (0..self.m()).rev() {
            let r = self.ell_rational(i)? / rising_factorial(&shift, i as i64)?;
            acc = acc * -&xr + r;
        }
        let prec = self.prec();
        let g = Float::with_val(prec + GUARD_BITS, &self.alpha + 2u32).gamma();
        Ok(Float::with_val(prec, rat_to_float(&acc, prec + GUARD_BITS) / g))
    }

    /// `ℓ₁(x)` (which = 1) or `ℓ₂(x)` (which = 2).
    ///
    /// `ℓ₁` is a polynomial with rational coefficients over `Γ(α+2)`; it is
    /// summed exactly at the dyadic value of `x`, so its genuine zeros come out
    /// as zero. `ℓ₂` fails with a precision error when its alternating sum
    /// cancels more than half of the working bits.
    pub fn eval_ell(&self, which: u8, x: &Float) -> Result<Float, KernelError> {
        if which == 1 {
            if *x < 0 || !x.is_finite() {
                return Err(KernelError::Domain("ell_1 needs finite x >= 0".into()));
            }
            return self.eval_ell_one(x);
        }
        check_positive(x)?;
        let prec = self.prec();
        let wp = prec + GUARD_BITS;
        let x = Float::with_val(wp, x);
        let al = Float::with_val(wp, &self.alpha);
        let mut acc = Float::new(wp);
        let mut largest = Float::new(wp);
        let mut power = Float::with_val(wp, 1u32);
        for i in 0..self.m() {
            let a = -Float::with_val(wp, &al + i as u32);
            // Γ(a, x) = e^{-x} x^a · scaled
            let g = scaled_upper_gamma(&a, &x)? * Float::with_val(wp, (&x).pow(&a)) * Float::with_val(wp, -&x).exp();
            let t = rat_to_float(&self.ell_rational(i)?, wp) * &power * g / Float::with_val(wp, &al + (i as u32 + 1));
            if Float::with_val(wp, t.abs_ref()) > largest {
                largest = Float::with_val(wp, t.abs_ref());
            }
            acc += &t;
            power *= &x;
            power = -power;
        }
        let x2 = Float::with_val(wp, (&x).pow(Float::with_val(wp, &al * 2u32) + 1u32));
        let mut out = -acc * &x2;
        largest *= &x2;
        let tail = Float::with_val(wp, (&x).pow(&al)) * Float::with_val(wp, -&x).exp();
        if Float::with_val(wp, tail.abs_ref()) > largest {
            largest = Float::with_val(wp, tail.abs_ref());
        }
        out += tail;
        if !largest.is_zero() {
            let lost = largest.get_exp().unwrap_or(0) - out.get_exp().unwrap_or(i32::MIN / 2);
            if out.is_zero() || lost > (prec / 2) as i32 {
                return Err(KernelError::Precision(format!("ell_2 cancels {lost} bits at x = {:e}", x.to_f64())));
            }
        }
        Ok(Float::with_val(prec, out))
    }

    /// The `order`-point density `h_order` at `points`.
    pub fn eval_density(&self, points: &[Float]) -> Result<Float, KernelError> {
        let order = points.len();
        let m = self.m();
        if order == 0 || order > 3 || order > m {
            return Err(KernelError::Domain(format!("density of order {order} needs 1 <= order <= min(3, m), m = {m}")));
        }
        for p in points {
            check_positive(p)?;
        }
        let nodes = points.iter().map(|p| self.node_values(p)).collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&NodeValues> = nodes.iter().collect();
        Ok(self.density_at(&refs))
    }

    /// Density from precomputed node data.
    pub fn density_at(&self, n: &[&NodeValues]) -> Float {
        let prec = self.prec();
        let (terms, norm) = density_terms(n.len(), self.m());
        let mut acc = Float::new(prec);
        for t in &terms {
            let mut v = rat_to_float(&t.coeff, prec);
            for f in &t.factors {
                v *= self.kernel_at(f.kind, n[f.u], n[f.v]);
            }
            acc += v;
        }
        acc / rat_to_float(&norm, prec)
    }
}

fn check_positive(x: &Float) -> Result<(), KernelError> {
    if *x > 0 {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("kernel arguments must be positive, got {}", x.to_f64())))
    }
}
