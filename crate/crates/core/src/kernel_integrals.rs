//! Exact integrals of products of correlation kernels against monomials.
//!
//! Three routes are provided. [`g_cross`] is the reduced double sum for
//! `∫∫ x^β₁ y^β₂ K₀₀(x,y) K₁₁(x,y)`. [`pair_trace`] and [`triple_trace`]
//! contract moment matrices. [`kernel_product_integral`] is a general engine
//! that writes every kernel in separable form and reduces each one-variable
//! integral to a bimoment of the weight, which covers cycles of any length.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::ratcore::{gamma_quotient, int, GammaArg, Rational};
use crate::recurrence::{normalized_bimoment, normalized_h, CoeffTables, EnsembleParams, MatrixKind, RatMatrix, RecurrenceError};

fn ga(x: Rational) -> GammaArg {
    GammaArg(x)
}

fn parity(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `∫∫ x^β₁ y^β₂ K₀₀(x,y) K₁₁(x,y) dx dy` by the reduced double sum.
///
/// The summand factorizes as `f(i) g(k) / ((2α+i+k+2)(2α+β₁+β₂+i+k+2))`, and
/// the reciprocal gammas at non-positive integers restrict the range to
/// `i >= m-β₁`, `k >= m-β₂` automatically.
pub fn g_cross(beta1: usize, beta2: usize, params: &EnsembleParams) -> Result<Rational, RecurrenceError> {
    let m = params.m as i64;
    let a = &params.alpha;
    let two_a = a * int(2);
    let (b1, b2) = (int(beta1 as i64), int(beta2 as i64));
    let mm = int(m);
    let one = || ga(int(1));

    let mut f = Vec::with_capacity(params.m);
    let mut g = Vec::with_capacity(params.m);
    for i in 0..m {
        let i_ = int(i);
        let num = [
            ga(&two_a + &i_ + &mm + int(2)),
            ga(&b1 + &i_ + int(1)),
            ga(a + &b1 + &i_ + int(1)),
            ga(&two_a + &b1 + &i_ + int(2)),
            one(),
            one(),
        ];
        let den = [
            ga(&i_ + int(1)),
            ga(&mm - &i_),
            ga(a + &i_ + int(1)),
            ga(&two_a + &i_ + int(2)),
            ga(&b1 + &i_ - &mm + int(1)),
            ga(&two_a + &b1 + &i_ + &mm + int(2)),
        ];
        f.push(gamma_quotient(&num, &den)?);
        let num = [
            ga(&two_a + &i_ + &mm + int(2)),
            ga(&b2 + &i_ + int(1)),
            ga(a + &b2 + &i_ + int(2)),
            ga(&two_a + &b2 + &i_ + int(2)),
            one(),
            one(),
        ];
        let den = [
            ga(&i_ + int(1)),
            ga(&mm - &i_),
            ga(a + &i_ + int(2)),
            ga(&two_a + &i_ + int(2)),
            ga(&b2 + &i_ - &mm + int(1)),
            ga(&two_a + &b2 + &i_ + &mm + int(2)),
        ];
        g.push(gamma_quotient(&num, &den)?);
    }

    let mut acc = Rational::zero();
    for (i, fi) in f.iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        for (k, gk) in g.iter().enumerate() {
            if gk.is_zero() {
                continue;
            }
            let s = int((i + k) as i64);
            let den = (&two_a + &s + int(2)) * (&two_a + &b1 + &b2 + &s + int(2));
            acc += parity((i + k) as i64 - 1) * fi * gk / den;
        }
    }
    Ok(acc)
}

/// `tr(M₁^(β₁) M₂^(β₂))`.
///
/// With both kinds [`MatrixKind::Plain`] this is `∫∫ x^β₁ y^β₂ K₀₁(x,y) K₀₁(y,x)`;
/// with both [`MatrixKind::Hatted`] it is the `K₁₀` analogue.
pub fn pair_trace(beta1: usize, beta2: usize, kinds: (MatrixKind, MatrixKind), tables: &CoeffTables) -> Rational {
    let a = tables.moment_matrix(beta1, kinds.0);
    let b = tables.moment_matrix(beta2, kinds.1);
    a.entries.mul(&b.entries).trace()
}

/// `tr(M₁^(β₁) M₂^(β₂) M₃^(β₃))`.
pub fn triple_trace(betas: (usize, usize, usize), kinds: (MatrixKind, MatrixKind, MatrixKind), tables: &CoeffTables) -> Rational {
    let a = tables.moment_matrix(betas.0, kinds.0);
    let b = tables.moment_matrix(betas.1, kinds.1);
    let c = tables.moment_matrix(betas.2, kinds.2);
    a.entries.mul(&b.entries).mul(&c.entries).trace()
}

/// Index sets for the two summation lemmas behind the reduced double sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaIndices {
    /// `(i, s, m)`: the finite sum over `j` in the `K₀₀` factor.
    A { i: usize, s: usize, m: usize },
    /// `(i, s, β₁, β₂, m)`: the finite sum over `k` in the `K₁₁` factor.
    B { i: usize, s: usize, beta1: usize, beta2: usize, m: usize },
}

/// Both sides of a summation lemma, each computed on its own.
///
/// Kind A is divided through by `Γ(2α+i+2)Γ(2α+s+2)` and kind B multiplied by
/// `Γ(2α+β₁+i+2)Γ(2α+β₂+s+2)` so that both sides are rational for every α.
pub fn lemma_sum(idx: LemmaIndices, alpha: &Rational) -> Result<(Rational, Rational), RecurrenceError> {
    let two_a = alpha * int(2);
    let one = || ga(int(1));
    match idx {
        LemmaIndices::A { i, s, m } => {
            let (i_, s_, m_) = (int(i as i64), int(s as i64), int(m as i64));
            let mut lhs = Rational::zero();
            for j in i..m {
                let j_ = int(j as i64);
                let q = gamma_quotient(
                    &[ga(&two_a + &i_ + &j_ + int(2)), ga(&two_a + &j_ + &s_ + int(2)), one(), one()],
                    &[ga(&two_a + &i_ + int(2)), ga(&two_a + &s_ + int(2)), ga(&j_ - &i_ + int(1)), ga(&j_ - &s_ + int(1))],
                )?;
                lhs += (alpha + &j_ + int(1)) * q;
            }
            let q = gamma_quotient(
                &[ga(&i_ + &m_ + &two_a + int(2)), ga(&s_ + &m_ + &two_a + int(2)), one(), one()],
                &[ga(&two_a + &i_ + int(2)), ga(&two_a + &s_ + int(2)), ga(&m_ - &i_), ga(&m_ - &s_)],
            )?;
            let rhs = q / (int(2) * (&two_a + &i_ + &s_ + int(2)));
            Ok((lhs, rhs))
        }
        LemmaIndices::B { i, s, beta1, beta2, m } => {
            let (i_, s_, m_) = (int(i as i64), int(s as i64), int(m as i64));
            let (b1, b2) = (int(beta1 as i64), int(beta2 as i64));
            let top1 = &two_a + &b1 + &i_ + int(2);
            let top2 = &two_a + &b2 + &s_ + int(2);
            let mut lhs = Rational::zero();
            for k in 0..m {
                let k_ = int(k as i64);
                let q = gamma_quotient(
                    &[ga(top1.clone()), ga(top2.clone()), one(), one()],
                    &[
                        ga(&top1 + &k_ + int(1)),
                        ga(&top2 + &k_ + int(1)),
                        ga(&b1 + &i_ - &k_ + int(1)),
                        ga(&b2 - &k_ + &s_ + int(1)),
                    ],
                )?;
                lhs += (alpha + &k_ + int(1)) * q;
            }
            let first = gamma_quotient(&[one(), one()], &[ga(&i_ + &b1 + int(1)), ga(&s_ + &b2 + int(1))])?;
            let second = gamma_quotient(
                &[ga(top1.clone()), ga(top2.clone()), one(), one()],
                &[ga(&i_ - &m_ + &b1 + int(1)), ga(&s_ - &m_ + &b2 + int(1)), ga(&top1 + &m_), ga(&top2 + &m_)],
            )?;
            let rhs = (first - second) / (int(2) * (&two_a + &b1 + &b2 + &i_ + &s_ + int(2)));
            Ok((lhs, rhs))
        }
    }
}

/// One of the four correlation kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    K00,
    K01,
    K10,
    K11,
}

/// `K_kind(x_u, x_v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelFactor {
    pub kind: KernelKind,
    pub u: usize,
    pub v: usize,
}

/// `coeff · Π factors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelTerm {
    pub coeff: Rational,
    pub factors: Vec<KernelFactor>,
}

impl KernelTerm {
    /// Parses a compact form such as `"00xy 01yz 11xz"`: two kind digits then two variable letters.
    /// Variables `x, y, z, w` map to indices `0..4`.
    pub fn parse(coeff: Rational, spec: &str) -> KernelTerm {
        let var = |c: char| "xyzw".find(c).unwrap_or_else(|| panic!("unknown variable `{c}`"));
        let factors = spec
            .split_whitespace()
            .map(|t| {
                let c: Vec<char> = t.chars().collect();
                assert_eq!(c.len(), 4, "bad kernel token `{t}`");
                let kind = match (c[0], c[1]) {
                    ('0', '0') => KernelKind::K00,
                    ('0', '1') => KernelKind::K01,
                    ('1', '0') => KernelKind::K10,
                    ('1', '1') => KernelKind::K11,
                    _ => panic!("bad kernel kind in `{t}`"),
                };
                KernelFactor { kind, u: var(c[2]), v: var(c[3]) }
            })
            .collect();
        KernelTerm { coeff, factors }
    }
}

/// The function a kernel contributes in one of its two arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// `p_k`
    P,
    /// `q_k`
    Q,
    /// `φ_k(u) = ∫ W(u,w) q_k(w) dw`
    Phi,
    /// `χ_k(v) = ∫ W(w,v) p_k(w) dw`
    Chi,
}

fn slots(kind: KernelKind) -> (Slot, Slot) {
    match kind {
        KernelKind::K00 => (Slot::P, Slot::Q),
        KernelKind::K01 => (Slot::Phi, Slot::P),
        KernelKind::K10 => (Slot::Q, Slot::Chi),
        KernelKind::K11 => (Slot::Phi, Slot::Chi),
    }
}

/// Precomputed data for [`kernel_product_integral`] at one parameter point.
#[derive(Debug, Clone)]
pub struct BilinearContext {
    m: usize,
    p: Vec<Vec<Rational>>,
    q: Vec<Vec<Rational>>,
    inv_h: Vec<Rational>,
    mu: Vec<Vec<Rational>>,
}

impl BilinearContext {
    /// Supports monomial powers up to `max_power` per variable.
    pub fn new(tables: &CoeffTables, max_power: usize) -> Self {
        let m = tables.params.m;
        let p: Vec<Vec<Rational>> = (0..m).map(|k| tables.a[k].clone()).collect();
        let q: Vec<Vec<Rational>> = (0..m).map(|k| tables.a_hat[k].clone()).collect();
        let inv_h = (0..m).map(|k| normalized_h(k, tables).recip()).collect();
        let dim = m + 2 * max_power + 1;
        let al = &tables.params.alpha;
        let mu = (0..dim).map(|i| (0..dim).map(|j| normalized_bimoment(i, j, al)).collect()).collect();
        BilinearContext { m, p, q, inv_h, mu }
    }

    fn poly(&self, s: Slot, k: usize) -> &[Rational] {
        match s {
            Slot::P | Slot::Chi => &self.p[k],
            Slot::Q | Slot::Phi => &self.q[k],
        }
    }

    /// `Σ f_i g_j μ_{i+sf, j+sg}`: `f` in the first argument of `W`, `g` in the second.
    fn pairing(&self, f: &[Rational], sf: usize, g: &[Rational], sg: usize) -> Rational {
        let mut acc = Rational::zero();
        for (i, fi) in f.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in g.iter().enumerate() {
                if !gj.is_zero() {
                    acc += fi * gj * &self.mu[i + sf][j + sg];
                }
            }
        }
        acc
    }

    /// `∫ x^β s1_{k1}(x) s2_{k2}(x) dx / Z` over all `(k1, k2)`.
    fn var_node(&self, s1: Slot, s2: Slot, beta: usize) -> Result<RatMatrix, String> {
        let m = self.m;
        let mut out = RatMatrix::zeros(m);
        for k1 in 0..m {
            for k2 in 0..m {
                let v = match (s1, s2) {
                    (Slot::P | Slot::Q, Slot::Phi) => self.pairing(self.poly(s1, k1), beta, &self.q[k2], 0),
                    (Slot::Phi, Slot::P | Slot::Q) => self.pairing(self.poly(s2, k2), beta, &self.q[k1], 0),
                    (Slot::P | Slot::Q, Slot::Chi) => self.pairing(&self.p[k2], 0, self.poly(s1, k1), beta),
                    (Slot::Chi, Slot::P | Slot::Q) => self.pairing(&self.p[k1], 0, self.poly(s2, k2), beta),
                    _ => return Err(format!("unsupported slot pair {s1:?} x {s2:?}")),
                };
                out.set(k1, k2, v);
            }
        }
        Ok(out)
    }

    /// `-∫∫ x^βx y^βy sx_{k1}(x) sy_{k2}(y) W(x,y) / Z` over all `(k1, k2)`.
    fn w_node(&self, sx: Slot, bx: usize, sy: Slot, by: usize) -> Result<RatMatrix, String> {
        if !matches!(sx, Slot::P | Slot::Q) || !matches!(sy, Slot::P | Slot::Q) {
            return Err(format!("W factor next to a transform ({sx:?}, {sy:?})"));
        }
        let m = self.m;
        let mut out = RatMatrix::zeros(m);
        for k1 in 0..m {
            for k2 in 0..m {
                out.set(k1, k2, -self.pairing(self.poly(sx, k1), bx, self.poly(sy, k2), by));
            }
        }
        Ok(out)
    }
}

/// A node of the contraction graph: its matrix and the two edge endpoints it joins.
struct Node {
    mat: RatMatrix,
    ends: [usize; 2],
}

/// Exact `∫ Π_v x_v^{β_v} Σ_t coeff_t Π K(·,·) dx`.
///
/// Every variable must occur in exactly two kernel arguments. `K₁₁` is split
/// into its separable sum and the `-W` term; the latter merges its two variables
/// into one node. The remaining graph is a union of cycles, each of which
/// contracts to a trace with `diag(1/h)` on every kernel edge.
pub fn kernel_product_integral(terms: &[KernelTerm], betas: &[usize], ctx: &BilinearContext) -> Result<Rational, String> {
    let mut total = Rational::zero();
    for t in terms {
        let k11: Vec<usize> = (0..t.factors.len()).filter(|&i| t.factors[i].kind == KernelKind::K11).collect();
        for mask in 0..(1u32 << k11.len()) {
            let w_set: Vec<usize> = k11.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
            total += &t.coeff * contract(&t.factors, &w_set, betas, ctx)?;
        }
    }
    Ok(total)
}

fn contract(factors: &[KernelFactor], w_set: &[usize], betas: &[usize], ctx: &BilinearContext) -> Result<Rational, String> {
    // Endpoint id 2*e (first argument) or 2*e+1 (second argument) of factor e.
    let mut at_var: HashMap<usize, Vec<usize>> = HashMap::new();
    for (e, f) in factors.iter().enumerate() {
        at_var.entry(f.u).or_default().push(2 * e);
        at_var.entry(f.v).or_default().push(2 * e + 1);
    }
    for (v, ends) in &at_var {
        if ends.len() != 2 {
            return Err(format!("variable {v} occurs {} times", ends.len()));
        }
    }
    let slot_of = |end: usize| {
        let (a, b) = slots(factors[end / 2].kind);
        if end % 2 == 0 {
            a
        } else {
            b
        }
    };
    let other = |v: usize, end: usize| at_var[&v].iter().copied().find(|&x| x != end).unwrap();

    let mut nodes: Vec<Node> = Vec::new();
    let mut used = vec![false; betas.len().max(at_var.keys().max().map_or(0, |x| x + 1))];
    for &e in w_set {
        let f = factors[e];
        if f.u == f.v {
            return Err("W factor on a diagonal".into());
        }
        let ex = other(f.u, 2 * e);
        let ey = other(f.v, 2 * e + 1);
        let mat = ctx.w_node(slot_of(ex), betas[f.u], slot_of(ey), betas[f.v])?;
        nodes.push(Node { mat, ends: [ex, ey] });
        used[f.u] = true;
        used[f.v] = true;
    }
    let mut vars: Vec<usize> = at_var.keys().copied().collect();
    vars.sort();
    for v in vars {
        if used[v] {
            continue;
        }
        let [e1, e2] = [at_var[&v][0], at_var[&v][1]];
        let mat = ctx.var_node(slot_of(e1), slot_of(e2), betas[v])?;
        nodes.push(Node { mat, ends: [e1, e2] });
    }

    // Endpoint -> (node, side).
    let mut owner: HashMap<usize, (usize, usize)> = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        owner.insert(n.ends[0], (i, 0));
        owner.insert(n.ends[1], (i, 1));
    }
    let is_w = |e: usize| w_set.contains(&e);
    let mut visited = vec![false; nodes.len()];
    let mut value = Rational::one();
    for start in 0..nodes.len() {
        if visited[start] {
            continue;
        }
        let mut acc = RatMatrix::identity(ctx.m);
        let (mut cur, mut side_in) = (start, 0usize);
        loop {
            visited[cur] = true;
            let n = &nodes[cur];
            let oriented = if side_in == 0 { n.mat.clone() } else { n.mat.transpose() };
            let out_end = n.ends[1 - side_in];
            debug_assert!(!is_w(out_end / 2));
            acc = acc.mul(&oriented).scale_cols(&ctx.inv_h);
            let partner = out_end ^ 1;
            let (next, side) = owner[&partner];
            if next == start && side == 0 {
                break;
            }
            cur = next;
            side_in = side;
        }
        value *= acc.trace();
    }
    Ok(value)
}

impl RatMatrix {
    /// `self · diag(d)`.
    pub fn scale_cols(&self, d: &[Rational]) -> RatMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.data[i * self.n + j] *= &d[j];
            }
        }
        out
    }
}

/// The eight `K₀₀ K₀₁/K₁₀ K₁₁` cycles of the three-point C block, in order `C₁..C₈`.
pub const C_CYCLES: [&str; 8] = [
    "00xy 01yz 11xz",
    "00yz 01yx 11xz",
    "00xy 01xz 11yz",
    "00yz 01zx 11xy",
    "00xy 10zx 11zy",
    "00yz 10xz 11yx",
    "00xy 10zy 11zx",
    "00yz 10xy 11zx",
];

/// Weights of `C₁..C₈` in `2 m(m-1)(m-2) C`.
pub const C_WEIGHTS: [i64; 8] = [2, 1, -2, -1, 2, 1, -2, -1];

/// The four `K₀₁/K₁₀` triangles of the D block, in order `D₁..D₄`.
pub const D_CYCLES: [&str; 4] = ["01xy 01yz 01zx", "01xz 01zy 10xy", "01xy 10xz 10zy", "10xy 10yz 10zx"];

/// Weights of `D₁..D₄` in `4 m(m-1)(m-2) D`.
pub const D_WEIGHTS: [i64; 4] = [1, 3, 3, 1];

/// `m(m-1)(m-2)·C` from the eight weighted cycles at `x²y²z²`.
pub fn c_block(ctx: &BilinearContext) -> Result<Rational, String> {
    let terms: Vec<KernelTerm> =
        C_CYCLES.iter().zip(C_WEIGHTS).map(|(s, w)| KernelTerm::parse(int(w), s)).collect();
    Ok(kernel_product_integral(&terms, &[2, 2, 2], ctx)? / int(2))
}

/// `D₁..D₄` as moment-matrix triple traces at `β = 2`.
///
/// With `M` plain, `M̂` hatted, `N` mixed and `Ň` mixed-hat:
/// `D₁ = tr(M M M)`, `D₂ = tr(M Ň N)`, `D₃ = tr(M̂ N Ň)`, `D₄ = tr(M̂ M̂ M̂)`.
pub fn d_traces(tables: &CoeffTables) -> [Rational; 4] {
    use MatrixKind::*;
    [
        triple_trace((2, 2, 2), (Plain, Plain, Plain), tables),
        triple_trace((2, 2, 2), (Plain, MixedHat, Mixed), tables),
        triple_trace((2, 2, 2), (Hatted, Mixed, MixedHat), tables),
        triple_trace((2, 2, 2), (Hatted, Hatted, Hatted), tables),
    ]
}

/// `m(m-1)(m-2)·D = (D₁ + 3D₂ + 3D₃ + D₄)/4`.
pub fn d_block(tables: &CoeffTables) -> Rational {
    let d = d_traces(tables);
    d.iter().zip(D_WEIGHTS).map(|(x, w)| x * int(w)).sum::<Rational>() / int(4)
}
