//! Registered quadrature checks of kernel identities and exact kernel integrals.

use rug::Float;

use purity_core::closed_forms::FormulaCatalog;
use purity_core::kernel_integrals::{
    g_cross, kernel_product_integral, pair_trace, BilinearContext, KernelKind, KernelTerm, C_CYCLES, C_WEIGHTS,
    D_CYCLES, D_WEIGHTS,
};
use purity_core::ratcore::{int, parse_polyfrac, polyfrac_eval, Rational};
use purity_core::recurrence::{CoeffTables, MatrixKind};

use crate::context::{rat_to_float, KernelContext};
use crate::grid::KernelGrid;
use crate::terms::density_terms;
use crate::KernelError;

/// Sample point for the pointwise identities.
pub const SAMPLE_XZ: (f64, f64) = (0.7, 1.9);

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub value: Float,
    pub expected: Float,
    /// `|value - expected|`, divided by `|expected|` unless that is zero.
    pub error: f64,
}

impl CheckResult {
    pub fn passes(&self, tol: f64) -> bool {
        self.error.is_finite() && self.error <= tol
    }
}

/// Identities from the normalization argument, available for every `m` they make sense for.
pub const APPENDIX_CHECKS: &[&str] = &[
    "k01_diag",
    "k10_diag",
    "h1_norm",
    "k00_w",
    "k01_k01",
    "k10_k10",
    "k01_k10",
    "k00_k11",
    "k00_k11_swapped",
    "reproducing_k01",
    "k00_k11_pointwise",
    "h2_norm",
    "h3_norm",
];

/// Oracles for the exact kernel integrals.
pub const EXACT_CHECKS: &[&str] = &[
    "g_cross_22",
    "pair_trace_42",
    "C1",
    "C2",
    "C3",
    "C4",
    "C5",
    "C6",
    "C7",
    "C8",
    "D1",
    "D2",
    "D3",
    "D4",
    "C_block",
    "D_block",
];

/// Smallest `m` for which a check is defined.
pub fn min_m(name: &str) -> usize {
    match name {
        "h2_norm" => 2,
        "h3_norm" => 3,
        _ => 1,
    }
}

fn result(name: &str, value: Float, expected: Float) -> CheckResult {
    let prec = value.prec();
    let diff = Float::with_val(prec, &value - &expected).abs();
    let error = if expected.is_zero() { diff.to_f64() } else { (diff / expected.clone().abs()).to_f64() };
    CheckResult { name: name.to_string(), value, expected, error }
}

fn terms(specs: &[&str]) -> Vec<KernelTerm> {
    specs.iter().map(|s| KernelTerm::parse(int(1), s)).collect()
}

fn exact_cycle(spec: &str, tables: &CoeffTables) -> Result<Rational, KernelError> {
    let ctx = BilinearContext::new(tables, 2);
    kernel_product_integral(&[KernelTerm::parse(int(1), spec)], &[2, 2, 2], &ctx).map_err(KernelError::Domain)
}

/// `m(m-1)(m-2)·X` for catalog entry `X`, with the `m = 2` limit taken exactly.
fn scaled_catalog(entry: &str, ctx: &KernelContext) -> Result<Rational, KernelError> {
    let cat = FormulaCatalog::global().get(entry).expect("catalog entry");
    let f = parse_polyfrac("m*(m-1)*(m-2)")?.mul(cat);
    let p = &ctx.params;
    Ok(polyfrac_eval(&f, &[("m", int(p.m as i64)), ("alpha", p.alpha.clone())])?)
}

/// Runs the named check on `grid`.
pub fn quad_check(name: &str, grid: &KernelGrid) -> Result<CheckResult, KernelError> {
    let ctx = grid.ctx;
    let prec = ctx.prec();
    let m = ctx.m();
    let mf = Float::with_val(prec, m as u32);
    let zero = Float::new(prec);
    let one = Float::with_val(prec, 1u32);
    if m < min_m(name) {
        return Err(KernelError::Domain(format!("check `{name}` needs m >= {}", min_m(name))));
    }
    let exact = |r: Rational| rat_to_float(&r, prec);
    let density = |order: usize| {
        let (t, norm) = density_terms(order, m);
        grid.integrate(&t, &vec![0; order]) / rat_to_float(&norm, prec)
    };
    let tables = || CoeffTables::for_moments(&ctx.params);
    let r = match name {
        "k01_diag" => result(name, grid.integrate(&terms(&["01xx"]), &[0]), mf),
        "k10_diag" => result(name, grid.integrate(&terms(&["10xx"]), &[0]), mf),
        "h1_norm" => result(name, density(1), one),
        "h2_norm" => result(name, density(2), one),
        "h3_norm" => result(name, density(3), one),
        "k00_w" => {
            let n = grid.len();
            let k = grid.matrix(KernelKind::K00);
            let w = grid.weight_matrix();
            let vals: Vec<Float> = (0..n * n).map(|ij| Float::with_val(prec, &k[ij] * &w[ij])).collect();
            result(name, grid.integrate_2d_values(&vals), mf)
        }
        "k01_k01" => result(name, grid.integrate(&terms(&["01xy 01yx"]), &[0, 0]), mf),
        "k10_k10" => result(name, grid.integrate(&terms(&["10xy 10yx"]), &[0, 0]), mf),
        "k01_k10" => result(name, grid.integrate(&terms(&["01xy 10xy"]), &[0, 0]), mf),
        "k00_k11" => result(name, grid.integrate(&terms(&["00xy 11xy"]), &[0, 0]), zero),
        "k00_k11_swapped" => result(name, grid.integrate(&terms(&["00xy 11yx"]), &[0, 0]), zero),
        "reproducing_k01" | "k00_k11_pointwise" => {
            let x = ctx.node_values(&ctx.float(SAMPLE_XZ.0))?;
            let z = ctx.node_values(&ctx.float(SAMPLE_XZ.1))?;
            if name == "reproducing_k01" {
                let v = grid.integrate_1d(0, |y| {
                    ctx.kernel_at(KernelKind::K01, &x, y) * ctx.kernel_at(KernelKind::K01, y, &z)
                });
                result(name, v, ctx.kernel_at(KernelKind::K01, &x, &z))
            } else {
                let v = grid.integrate_1d(0, |y| {
                    ctx.kernel_at(KernelKind::K00, &x, y) * ctx.kernel_at(KernelKind::K11, &z, y)
                });
                result(name, v, zero)
            }
        }
        "g_cross_22" => {
            let v = grid.integrate(&terms(&["00xy 11xy"]), &[2, 2]);
            result(name, v, exact(g_cross(2, 2, &ctx.params)?))
        }
        "pair_trace_42" => {
            let v = grid.integrate(&terms(&["01xy 01yx"]), &[4, 2]);
            let t = tables()?;
            result(name, v, exact(pair_trace(4, 2, (MatrixKind::Plain, MatrixKind::Plain), &t)))
        }
        "C_block" | "D_block" => {
            let (cycles, weights, entry, scale): (&[&str], &[i64], &str, i64) = if name == "C_block" {
                (&C_CYCLES, &C_WEIGHTS, "C", 2)
            } else {
                (&D_CYCLES, &D_WEIGHTS, "D", 4)
            };
            let ts: Vec<KernelTerm> =
                cycles.iter().zip(weights).map(|(s, w)| KernelTerm::parse(int(*w), s)).collect();
            let v = grid.integrate(&ts, &[2, 2, 2]) / Float::with_val(prec, scale);
            result(name, v, exact(scaled_catalog(entry, ctx)?))
        }
        _ => {
            let (list, idx): (&[&str], Option<usize>) = match name.split_at(1) {
                ("C", i) => (&C_CYCLES, i.parse::<usize>().ok()),
                ("D", i) => (&D_CYCLES, i.parse::<usize>().ok()),
                _ => (&[], None),
            };
            let spec = idx
                .and_then(|i| i.checked_sub(1))
                .and_then(|i| list.get(i))
                .ok_or_else(|| KernelError::Domain(format!("unknown check `{name}`")))?;
            let v = grid.integrate(&terms(&[spec]), &[2, 2, 2]);
            result(name, v, exact(exact_cycle(spec, &tables()?)?))
        }
    };
    Ok(r)
}
