//! Verification suites behind `purity verify`.

use rug::Float;

use purity_core::closed_forms::{catalog_eval, purity_moment_with, ClosedFormError, MomentEngine, Route};
use purity_core::kernel_integrals::{g_cross, lemma_sum, LemmaIndices};
use purity_core::ratcore::{rat, RatError, Rational};
use purity_core::recurrence::{bcon_identity, coeff_b_closed, coeff_b_recursive, EnsembleParams};
use purity_kernels::checks::{min_m, quad_check, APPENDIX_CHECKS};
use purity_kernels::grid::KernelGrid;
use purity_kernels::{with_precision_retry, KernelContext, KernelError, KernelKind};

use crate::report::{Check, SuiteReport};

/// α values covered by the exact suites.
pub fn suite_alphas() -> Vec<Rational> {
    vec![rat(-1, 2), rat(1, 2), rat(3, 2), rat(5, 2), rat(7, 3), rat(-1, 3)]
}

/// Tolerance of the appendix quadrature checks (absolute).
pub const APPENDIX_TOLERANCE: f64 = 1e-12;

fn decimal(x: &Float) -> String {
    x.to_string_radix(10, Some(25))
}

/// Closed-form vs recursive `b` coefficients for `β <= k_max`, `i <= min(β, i_max)`,
/// and both sides of the `b` consistency identity for `1 <= i <= min(k+1, i_max)`.
pub fn recurrence(k_max: usize, i_max: usize) -> SuiteReport {
    let mut checks = Vec::new();
    for a in suite_alphas() {
        let p = EnsembleParams::with_alpha(1, a.clone()).expect("alpha > -1");
        for k in 0..=k_max {
            for i in 0..=k.min(i_max) {
                for hat in [false, true] {
                    let name = format!("b{} alpha={a} k={k} i={i}", if hat { "_hat" } else { "" });
                    checks.push(match (coeff_b_closed(k as i64, i as i64, &p, hat), coeff_b_recursive(k, i, &p, hat)) {
                        (Ok(c), Ok(r)) => Check::exact(name, c, r),
                        (Err(e), _) | (_, Err(e)) => Check::failed(name, e),
                    });
                }
            }
            for i in 1..=(k + 1).min(i_max) {
                let name = format!("bcon alpha={a} k={k} i={i}");
                checks.push(match bcon_identity(i, k, &p) {
                    Ok((l, r)) => Check::exact(name, l, r),
                    Err(e) => Check::failed(name, e),
                });
            }
        }
    }
    SuiteReport::new("recurrence", checks)
}

/// Assembled `E[P^k]`, `k = 1..=3`, against the catalog for `1 <= m <= n <= m_max`.
pub fn identities(m_max: usize) -> SuiteReport {
    let mut checks = Vec::new();
    for n in 1..=m_max {
        for m in 1..=n {
            let p = EnsembleParams::physical(m, n).expect("m <= n");
            let engine = match MomentEngine::new(&p) {
                Ok(e) => e,
                Err(e) => {
                    checks.push(Check::failed(format!("engine m={m} n={n}"), e));
                    continue;
                }
            };
            for k in 1..=3 {
                let name = format!("E[P^{k}] m={m} n={n}");
                checks.push(match purity_moment_with(k, &engine) {
                    Ok(r) => match r.route {
                        Route::Catalog(entry) => match catalog_eval(entry, &p) {
                            Ok(c) => Check::exact(format!("{name} ({entry})"), &r.purity, c),
                            Err(e) => Check::failed(name, e),
                        },
                        Route::Assembled => Check::failed(name, "no catalog entry applies"),
                    },
                    Err(ClosedFormError::Consistency { entry, assembled, catalog }) => {
                        Check::exact(format!("{name} ({entry})"), assembled, catalog)
                    }
                    Err(e) => Check::failed(name, e),
                });
            }
            if m == n {
                let name = format!("E[P^2] square m={m}");
                checks.push(match (purity_moment_with(2, &engine), catalog_eval("mP2_mn", &p)) {
                    (Ok(r), Ok(c)) => Check::exact(name, r.purity, c),
                    (Err(e), _) => Check::failed(name, e),
                    (_, Err(e)) => Check::failed(name, e),
                });
            }
        }
    }
    SuiteReport::new("identities", checks)
}

/// Exact `x²y² K₀₀K₁₁` integral against its printed closed form (where that
/// form has a nonzero denominator) for `m <= m_max`, and the two summation lemmas.
pub fn kernel_identities(m_max: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for a in suite_alphas() {
        for m in 1..=m_max {
            let p = EnsembleParams::with_alpha(m, a.clone()).expect("alpha > -1");
            let name = format!("g_cross(2,2) alpha={a} m={m}");
            match (g_cross(2, 2, &p), catalog_eval("cross_22", &p)) {
                (Ok(g), Ok(c)) => checks.push(Check::exact(name, g, c)),
                (_, Err(ClosedFormError::Rat(RatError::TruePole(_)))) => {}
                (Err(e), _) => checks.push(Check::failed(name, e)),
                (_, Err(e)) => checks.push(Check::failed(name, e)),
            }
        }
        for m in 1..=m_max {
            for i in 0..=4 {
                for s in 0..=4 {
                    let mut idx = Vec::new();
                    if i < m && s < m {
                        idx.push(LemmaIndices::A { i, s, m });
                    }
                    for beta1 in [1, 2, 4] {
                        for beta2 in [1, 2, 4] {
                            idx.push(LemmaIndices::B { i, s, beta1, beta2, m });
                        }
                    }
                    for ix in idx {
                        let name = format!("lemma {ix:?} alpha={a}");
                        checks.push(match lemma_sum(ix, &a) {
                            Ok((l, r)) => Check::exact(name, l, r),
                            Err(e) => Check::failed(name, e),
                        });
                    }
                }
            }
        }
    }
    checks
}

/// Pointwise factorization identities of the kernels on a log grid, relative
/// to the size of the summands.
pub fn factorization(ctx: &KernelContext, points: &[f64], tolerance: f64) -> Result<Vec<Check>, KernelError> {
    let prec = ctx.prec();
    let xs: Vec<Float> = points.iter().map(|&x| ctx.float(x)).collect();
    let nodes = xs.iter().map(|x| ctx.node_values(x)).collect::<Result<Vec<_>, _>>()?;
    let l1 = xs.iter().map(|x| ctx.eval_ell(1, x)).collect::<Result<Vec<_>, _>>()?;
    let l2 = xs.iter().map(|x| ctx.eval_ell(2, x)).collect::<Result<Vec<_>, _>>()?;
    let mut checks = Vec::new();
    let abs = |v: &Float| Float::with_val(prec, v.abs_ref());
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let (x, y) = (&nodes[i], &nodes[j]);
            let k = |kind, u, v| ctx.kernel_at(kind, u, v);
            let cases = [
                ("K00+K00^T=l1 l1", k(KernelKind::K00, x, y), k(KernelKind::K00, y, x), Float::with_val(prec, &l1[i] * &l1[j])),
                ("K01-K10^T=l2 l1", k(KernelKind::K01, x, y), -k(KernelKind::K10, y, x), Float::with_val(prec, &l2[i] * &l1[j])),
                ("K11+K11^T=-l2 l2", k(KernelKind::K11, x, y), k(KernelKind::K11, y, x), -Float::with_val(prec, &l2[i] * &l2[j])),
            ];
            for (label, u, v, want) in cases {
                let scale = abs(&u).max(&abs(&v)).max(&abs(&want));
                let got = Float::with_val(prec, &u + &v);
                let err = if scale.is_zero() { 0.0 } else { (Float::with_val(prec, &got - &want).abs() / scale).to_f64() };
                let name = format!("{label} m={} alpha={} x={} y={}", ctx.m(), ctx.params.alpha, points[i], points[j]);
                checks.push(Check::numeric(name, decimal(&got), decimal(&want), err, tolerance));
            }
        }
    }
    Ok(checks)
}

/// Exact kernel identities for `m <= m_max` plus the pointwise factorization
/// at `prec` bits for `m <= min(m_max, 4)`.
pub fn kernels(m_max: usize, prec: u32) -> Result<SuiteReport, KernelError> {
    let mut checks = kernel_identities(m_max);
    let points = [1e-3, 0.3, 2.0, 25.0, 100.0];
    for m in 1..=m_max.min(4) {
        for a in [rat(-1, 2), rat(3, 2), rat(7, 3)] {
            let p = EnsembleParams::with_alpha(m, a).expect("alpha > -1");
            checks.extend(with_precision_retry(&p, prec, |ctx| factorization(ctx, &points, 1e-20))?);
        }
    }
    Ok(SuiteReport::new("kernels", checks))
}

/// Appendix quadrature checks at one parameter point, as absolute errors.
pub fn appendix_at(params: &EnsembleParams, prec: u32, quad_bits: u32) -> Result<Vec<Check>, KernelError> {
    with_precision_retry(params, prec, |ctx| {
        let grid = KernelGrid::with_bits(ctx, quad_bits)?;
        let mut checks = Vec::new();
        for name in APPENDIX_CHECKS.iter().filter(|n| min_m(n) <= ctx.m()) {
            let r = quad_check(name, &grid)?;
            let err = Float::with_val(prec, &r.value - &r.expected).abs().to_f64();
            checks.push(Check::numeric(
                format!("{name} m={} alpha={}", ctx.m(), ctx.params.alpha),
                decimal(&r.value),
                decimal(&r.expected),
                err,
                APPENDIX_TOLERANCE,
            ));
        }
        Ok(checks)
    })
}

pub fn appendix(points: &[EnsembleParams], prec: u32, quad_bits: u32) -> Result<SuiteReport, KernelError> {
    let mut checks = Vec::new();
    for p in points {
        checks.extend(appendix_at(p, prec, quad_bits)?);
    }
    Ok(SuiteReport::new("appendix", checks))
}
