//! Double-exponential quadrature on `(0, ∞)`.
//!
//! Nodes are `r(t) = exp(t - e^{-t})` on the grid `t = k h`. The lower end
//! clusters double-exponentially at 0, so algebraic endpoint behavior `r^γ` with
//! any `γ > -1` is integrated without special weights; the upper end is tuned for
//! integrands that decay like `e^{-c r}`.

use rug::Float;

/// Parameters that fix an [`ExpSinhRule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleSpec {
    /// Target accuracy in bits.
    pub bits: u32,
    /// Integrand behaves like `r^gamma` at 0.
    pub gamma: f64,
    /// Integrand decays like `r^degree e^{-decay·r}` at infinity.
    pub decay: f64,
    pub degree: f64,
    /// Step in `t`.
    pub h: f64,
}

impl RuleSpec {
    /// A spec whose step is chosen for `bits` of accuracy on integrands analytic in
    /// a strip of half-width about one around the real `t` axis.
    pub fn for_bits(bits: u32, gamma: f64, degree: f64) -> Self {
        let h = 2.0 * std::f64::consts::PI * 0.8 / (bits as f64 * std::f64::consts::LN_2 + 10.0);
        RuleSpec { bits, gamma, decay: 1.0, degree, h }
    }

    /// Same truncation with the step halved.
    pub fn refined(&self) -> Self {
        RuleSpec { h: self.h / 2.0, ..*self }
    }

    /// Grid index range `[k_lo, k_hi]`.
    pub fn index_range(&self) -> (i64, i64) {
        let target = self.bits as f64 * std::f64::consts::LN_2 + 5.0;
        (
            (lower_cut(self.gamma, target) / self.h).floor() as i64,
            (upper_cut(self.decay, self.degree, target) / self.h).ceil() as i64,
        )
    }
}

/// Smallest `t <= 0` past which `r^{γ+1}(1+e^{-t})` stays below `e^{-target}`.
pub fn lower_cut(gamma: f64, target: f64) -> f64 {
    let g = (gamma + 1.0).max(1e-3);
    let mut t = 0.0f64;
    loop {
        let ln_r = t - (-t).exp();
        if g * ln_r + (1.0 + (-t).exp()).ln() < -target {
            return t;
        }
        t -= 0.125;
    }
}

/// Smallest `t >= 0` past which `r^{degree+1} e^{-c r}` stays below `e^{-target}`.
pub fn upper_cut(decay: f64, degree: f64, target: f64) -> f64 {
    let mut t = 0.0f64;
    loop {
        let ln_r = t - (-t).exp();
        let r = ln_r.exp();
        if (degree + 1.0) * ln_r - decay * r < -target && (degree <= -1.0 || decay * r > degree + 1.0) {
            return t;
        }
        t += 0.125;
    }
}

/// Nodes and weights of one double-exponential rule at a fixed precision.
#[derive(Debug, Clone)]
pub struct ExpSinhRule {
    pub spec: RuleSpec,
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl ExpSinhRule {
    pub fn new(spec: RuleSpec, prec: u32) -> Self {
        let (lo, hi) = spec.index_range();
        let h = Float::with_val(prec, spec.h);
        let (nodes, weights) = (lo..=hi).map(|k| node(k, &h, prec)).unzip();
        ExpSinhRule { spec, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.nodes.first().map_or(64, Float::prec)
    }

    /// `Σ w_k f(r_k)` summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(&Float) -> Float) -> Float {
        let mut acc = Float::new(self.prec());
        for (r, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(r) * w;
        }
        acc
    }
}

/// `(r(kh), h r'(kh))`.
pub fn node(k: i64, h: &Float, prec: u32) -> (Float, Float) {
    let t = Float::with_val(prec, h * k);
    let e = Float::with_val(prec, -&t).exp();
    let r = Float::with_val(prec, &t - &e).exp();
    let w = Float::with_val(prec, &e + 1u32) * &r * h;
    (r, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn rel(a: &Float, b: &Float) -> f64 {
        Float::with_val(a.prec(), a - b).abs().to_f64() / b.to_f64().abs()
    }

    #[test]
    fn gamma_integrals() {
        let prec = 256;
        for (gamma, bits) in [(-0.5, 120u32), (0.0, 120), (2.5, 200)] {
            let rule = ExpSinhRule::new(RuleSpec::for_bits(bits, gamma, gamma), prec);
            let g = Float::with_val(prec, gamma);
            let v = rule.integrate(|r| Float::with_val(prec, r.pow(&g)) * Float::with_val(prec, -r).exp());
            let want = Float::with_val(prec, &g + 1u32).gamma();
            assert!(rel(&v, &want) < 2f64.powi(-(bits as i32) + 4), "gamma={gamma}: {}", rel(&v, &want));
        }
    }

    #[test]
    fn refinement_is_nested() {
        let s = RuleSpec::for_bits(64, 0.0, 0.0);
        let a = ExpSinhRule::new(s, 128);
        let b = ExpSinhRule::new(s.refined(), 128);
        assert!(b.len() + 3 >= 2 * a.len());
        assert!(b.nodes.iter().any(|x| *x == a.nodes[a.len() / 2]));
    }
}
