//! Tensor-product quadrature of kernel products on a shared node set.

use std::sync::OnceLock;

use rayon::prelude::*;
use rug::Float;

use purity_core::kernel_integrals::{KernelKind, KernelTerm};

use crate::context::{rat_to_float, KernelContext, NodeValues};
use crate::quad::{ExpSinhRule, RuleSpec};
use crate::KernelError;

const KINDS: [KernelKind; 4] = [KernelKind::K00, KernelKind::K01, KernelKind::K10, KernelKind::K11];

fn kind_index(k: KernelKind) -> usize {
    KINDS.iter().position(|&x| x == k).unwrap()
}

/// Node data and kernel matrices `K(x_i, x_j)` on one rule.
pub struct KernelGrid<'a> {
    pub ctx: &'a KernelContext,
    pub rule: ExpSinhRule,
    pub nodes: Vec<NodeValues>,
    mats: [OnceLock<Vec<Float>>; 4],
    weight_mat: OnceLock<Vec<Float>>,
}

/// Rule for kernel integrals targeting `bits` of accuracy.
pub fn default_spec(ctx: &KernelContext, bits: u32) -> RuleSpec {
    let a = purity_core::ratcore::to_f64(&ctx.params.alpha);
    RuleSpec::for_bits(bits, a.min(0.0), 2.0 * ctx.m() as f64 + 8.0)
}

impl<'a> KernelGrid<'a> {
    pub fn new(ctx: &'a KernelContext, spec: RuleSpec) -> Result<Self, KernelError> {
        let rule = ExpSinhRule::new(spec, ctx.prec());
        let nodes = rule.nodes.par_iter().map(|x| ctx.node_values(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(KernelGrid { ctx, rule, nodes, mats: Default::default(), weight_mat: OnceLock::new() })
    }

    /// Grid with [`default_spec`].
    pub fn with_bits(ctx: &'a KernelContext, bits: u32) -> Result<Self, KernelError> {
        Self::new(ctx, default_spec(ctx, bits))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row-major `K_kind(x_i, x_j)`.
    pub fn matrix(&self, kind: KernelKind) -> &[Float] {
        self.mats[kind_index(kind)].get_or_init(|| {
            let n = self.len();
            (0..n * n)
                .into_par_iter()
                .map(|ij| self.ctx.kernel_at(kind, &self.nodes[ij / n], &self.nodes[ij % n]))
                .collect()
        })
    }

    /// Row-major `W(x_i, x_j)`.
    pub fn weight_matrix(&self) -> &[Float] {
        self.weight_mat.get_or_init(|| {
            let n = self.len();
            (0..n * n).into_par_iter().map(|ij| self.ctx.weight_at(&self.nodes[ij / n], &self.nodes[ij % n])).collect()
        })
    }

    /// Quadrature weights times `x_i^β`.
    fn weights(&self, beta: usize) -> Vec<Float> {
        self.rule
            .weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, nv)| {
                let mut v = w.clone();
                for _ in 0..beta {
                    v *= &nv.x;
                }
                v
            })
            .collect()
    }

    /// `∫ Π_u x_u^{β_u} Σ_terms coeff Π K(...)` over `betas.len()` variables (1 to 3).
    pub fn integrate(&self, terms: &[KernelTerm], betas: &[usize]) -> Float {
        let prec = self.ctx.prec();
        let nv = betas.len();
        assert!((1..=3).contains(&nv), "grid integrals cover one to three variables");
        let base: Vec<Vec<Float>> = betas.iter().map(|&b| self.weights(b)).collect();
        let mut total = Float::new(prec);
        for t in terms {
            total += self.integrate_term(t, &base) * rat_to_float(&t.coeff, prec);
        }
        total
    }

    fn integrate_term(&self, t: &KernelTerm, base: &[Vec<Float>]) -> Float {
        let prec = self.ctx.prec();
        let n = self.len();
        let nv = base.len();
        let mut omega: Vec<Vec<Float>> = base.to_vec();
        // pair[a][b] for a < b, as (matrix, transposed) factors
        let mut pairs: Vec<Vec<Vec<(&[Float], bool)>>> = vec![vec![Vec::new(); nv]; nv];
        for f in &t.factors {
            assert!(f.u < nv && f.v < nv, "factor refers to an unbound variable");
            let m = self.matrix(f.kind);
            if f.u == f.v {
                for (i, o) in omega[f.u].iter_mut().enumerate() {
                    *o *= &m[i * n + i];
                }
            } else if f.u < f.v {
                pairs[f.u][f.v].push((m, false));
            } else {
                pairs[f.v][f.u].push((m, true));
            }
        }
        let entry = |a: usize, b: usize, i: usize, j: usize| -> Option<Float> {
            let fs = &pairs[a][b];
            if fs.is_empty() {
                return None;
            }
            let mut v = Float::with_val(prec, 1u32);
            for (m, tr) in fs {
                v *= if *tr { &m[j * n + i] } else { &m[i * n + j] };
            }
            Some(v)
        };
        let mul = |mut v: Float, e: Option<Float>| {
            if let Some(e) = e {
                v *= e;
            }
            v
        };
        let partial: Vec<Float> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = Float::new(prec);
                match nv {
                    1 => acc += &omega[0][i],
                    2 => {
                        for j in 0..n {
                            acc += mul(Float::with_val(prec, &omega[1][j]), entry(0, 1, i, j));
                        }
                        acc *= &omega[0][i];
                    }
                    _ => {
                        // inner[k] = Σ_j M_xy[i][j] ω_y[j] M_yz[j][k]
                        let mut inner = vec![Float::new(prec); n];
                        for j in 0..n {
                            let a = mul(Float::with_val(prec, &omega[1][j]), entry(0, 1, i, j));
                            if a.is_zero() {
                                continue;
                            }
                            for (k, slot) in inner.iter_mut().enumerate() {
                                *slot += mul(a.clone(), entry(1, 2, j, k));
                            }
                        }
                        for (k, v) in inner.into_iter().enumerate() {
                            acc += mul(v * &omega[2][k], entry(0, 2, i, k));
                        }
                        acc *= &omega[0][i];
                    }
                }
                acc
            })
            .collect();
        let mut total = Float::new(prec);
        for p in partial {
            total += p;
        }
        total
    }

    /// `∫ x^β f(x) dx` for a function of the node data.
    pub fn integrate_1d(&self, beta: usize, f: impl Fn(&NodeValues) -> Float + Sync) -> Float {
        let w = self.weights(beta);
        let vals: Vec<Float> = self.nodes.par_iter().map(&f).collect();
        let mut acc = Float::new(self.ctx.prec());
        for (wi, v) in w.iter().zip(vals) {
            acc += v * wi;
        }
        acc
    }

    /// `∫∫ g(x_i, x_j) dx dy` with `g` given by its row-major node values.
    pub fn integrate_2d_values(&self, vals: &[Float]) -> Float {
        let n = self.len();
        let w = &self.rule.weights;
        let rows: Vec<Float> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = Float::new(self.ctx.prec());
                for j in 0..n {
                    acc += Float::with_val(self.ctx.prec(), &vals[i * n + j] * &w[j]);
                }
                acc * &w[i]
            })
            .collect();
        let mut acc = Float::new(self.ctx.prec());
        for r in rows {
            acc += r;
        }
        acc
    }
}
