//! Subcommand implementations. Each returns the text for standard output.

use std::fmt::Write as _;

use rug::Float;
use serde::Serialize;

use purity_core::closed_forms::{purity_moment_with, MomentEngine, MomentResult, Route};
use purity_core::ratcore::{to_decimal, to_f64, Rational};
use purity_core::recurrence::EnsembleParams;
use purity_kernels::export::{tabulate, to_csv as kernel_csv};
use purity_kernels::{with_precision_retry, KernelContext, KernelError, KernelKind};
use purity_sampler::export::{sidecar_json, to_csv as sample_csv};
use purity_sampler::{
    estimate_moments, sample_eigen_mcmc, sample_matrix_model, McmcConfig, MomentEstimate, SampleBatch, WeightMode,
};

use crate::args::{
    ensemble, Figure1Args, Format, KernelsArgs, Layout, McArgs, MethodArg, MomentsArgs, SamplingArgs, Suite, VerifyArgs,
    WeightArg,
};
use crate::report::SuiteReport;
use crate::{suites, CliError};

/// Digits after the point in decimal renderings of exact values.
pub const DECIMAL_DIGITS: usize = 30;

/// Fraction of the sample count below which the weighted ESS triggers a warning.
pub const ESS_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Serialize)]
struct Provenance {
    route: &'static str,
    catalog: Option<&'static str>,
}

#[derive(Debug, Serialize)]
struct MomentsJson {
    m: usize,
    n: Option<usize>,
    alpha: String,
    k: u32,
    numerator: String,
    denominator: String,
    decimal: String,
    induced_numerator: String,
    induced_denominator: String,
    provenance: Provenance,
}

fn provenance(r: &MomentResult) -> Provenance {
    match r.route {
        Route::Catalog(e) => Provenance { route: "assembled+catalog", catalog: Some(e) },
        Route::Assembled => Provenance { route: "assembled", catalog: None },
    }
}

pub fn moments(a: &MomentsArgs) -> Result<String, CliError> {
    let p = a.ensemble.params()?;
    let engine = MomentEngine::for_order(&p, a.k)?;
    let r = purity_moment_with(a.k, &engine)?;
    match a.format {
        Format::Json => {
            let j = MomentsJson {
                m: p.m,
                n: p.implied_n(),
                alpha: p.alpha.to_string(),
                k: a.k,
                numerator: r.purity.numer().to_string(),
                denominator: r.purity.denom().to_string(),
                decimal: to_decimal(&r.purity, DECIMAL_DIGITS),
                induced_numerator: r.induced.numer().to_string(),
                induced_denominator: r.induced.denom().to_string(),
                provenance: provenance(&r),
            };
            Ok(serde_json::to_string_pretty(&j).expect("serializable") + "\n")
        }
        Format::Plain | Format::Csv => {
            let mut out = format!("{}\n{}\n", r.purity, to_decimal(&r.purity, DECIMAL_DIGITS));
            match r.route {
                Route::Catalog(e) => writeln!(out, "provenance: trace assembly equals catalog entry {e}").unwrap(),
                Route::Assembled => writeln!(out, "provenance: trace assembly (no catalog entry applies)").unwrap(),
            }
            Ok(out)
        }
    }
}

pub fn verify(a: &VerifyArgs, prec: u32) -> Result<(String, bool), CliError> {
    let mut reports: Vec<SuiteReport> = Vec::new();
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    if want(Suite::Recurrence) {
        reports.push(suites::recurrence(a.m_max + 2, a.m_max));
    }
    if want(Suite::Identities) {
        reports.push(suites::identities(a.m_max));
    }
    if want(Suite::Kernels) {
        reports.push(suites::kernels(a.m_max, prec)?);
    }
    if want(Suite::Appendix) {
        let ms: Vec<usize> = match a.m {
            Some(m) => vec![m],
            None => (1..=a.m_max.min(4)).collect(),
        };
        let mut points = Vec::new();
        for m in ms {
            let n = match (a.n, a.alpha.as_deref()) {
                (None, None) => Some(m),
                (n, _) => n,
            };
            points.push(ensemble(m, n, a.alpha.as_deref())?);
        }
        reports.push(suites::appendix(&points, prec, a.quad_bits)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let out = match a.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({ "passed": passed, "suites": reports }))
            .expect("serializable")
            + "\n",
        _ => reports.iter().map(|r| r.plain()).collect(),
    };
    Ok((out, passed))
}

/// Runs the sampler selected by `s`, warning on stderr when importance weights degenerate.
pub fn run_sampler(p: &EnsembleParams, s: &SamplingArgs) -> Result<SampleBatch, CliError> {
    if s.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let method = s.method.unwrap_or(if p.is_physical() { MethodArg::Matrix } else { MethodArg::Mcmc });
    let batch = match method {
        MethodArg::Matrix => {
            let mode = match s.weight {
                WeightArg::Modulus => WeightMode::Modulus,
                WeightArg::RealPart => WeightMode::RealPart,
            };
            sample_matrix_model(p, s.samples, s.seed, s.streams, mode)?
        }
        MethodArg::Mcmc if p.m == 1 => {
            return Err(CliError::Usage("m = 1 has purity identically 1; use --method matrix".into()))
        }
        MethodArg::Mcmc => {
            let base = McmcConfig::for_m(p.m);
            let cfg = McmcConfig {
                step_scale: s.step_scale,
                burn_in: s.burn_in.unwrap_or(base.burn_in),
                thinning: s.thinning.unwrap_or(base.thinning),
                streams: s.streams,
            };
            sample_eigen_mcmc(p, s.samples, s.seed, &cfg)?
        }
    };
    if method == MethodArg::Matrix && batch.weight_ess() < ESS_WARNING_FRACTION * batch.len() as f64 {
        eprintln!(
            "warning: importance-weight ESS {:.0} is below {}% of {} samples; consider --method mcmc",
            batch.weight_ess(),
            ESS_WARNING_FRACTION * 100.0,
            batch.len()
        );
    }
    Ok(batch)
}

#[derive(Debug, Serialize)]
struct EstimateJson {
    k: u32,
    mean: f64,
    stderr: f64,
    ess: f64,
    exact_numerator: Option<String>,
    exact_denominator: Option<String>,
    exact_float: Option<f64>,
    z: Option<f64>,
}

fn estimate_row(e: &MomentEstimate, exact: Option<&Rational>) -> EstimateJson {
    let exact_float = exact.map(to_f64);
    EstimateJson {
        k: e.k,
        mean: e.mean,
        stderr: e.stderr,
        ess: e.ess,
        exact_numerator: exact.map(|x| x.numer().to_string()),
        exact_denominator: exact.map(|x| x.denom().to_string()),
        exact_float,
        z: exact_float.filter(|_| e.stderr > 0.0).map(|x| (e.mean - x) / e.stderr),
    }
}

/// Exact `E[P^k]` for `k = 1..=k_max`, or `None` where no exact route applies.
pub fn exact_moments(p: &EnsembleParams, k_max: u32) -> Result<Vec<Option<Rational>>, CliError> {
    let engine = MomentEngine::for_order(p, k_max)?;
    Ok((1..=k_max).map(|k| purity_moment_with(k, &engine).ok().map(|r| r.purity)).collect())
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

pub fn mc(a: &McArgs) -> Result<String, CliError> {
    let p = a.ensemble.params()?;
    let batch = run_sampler(&p, &a.sampling)?;
    if let Some(path) = &a.samples_out {
        std::fs::write(path, sample_csv(&batch))?;
        std::fs::write(path.with_extension("json"), sidecar_json(&batch) + "\n")?;
    }
    let exact = exact_moments(&p, a.k)?;
    let rows: Vec<EstimateJson> =
        estimate_moments(&batch, a.k).iter().zip(&exact).map(|(e, x)| estimate_row(e, x.as_ref())).collect();
    Ok(match a.format {
        Format::Json => {
            let j = serde_json::json!({
                "m": p.m,
                "n": p.implied_n(),
                "alpha": p.alpha.to_string(),
                "method": batch.method,
                "samples": batch.len(),
                "seed": batch.seed,
                "streams": batch.streams,
                "weight_ess": batch.weight_ess(),
                "mcmc": batch.mcmc_meta,
                "estimates": rows,
            });
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "exact_num", "exact_den", "exact_float", "mean", "stderr", "ess", "z"]).unwrap();
            for r in &rows {
                w.write_record([
                    r.k.to_string(),
                    opt(&r.exact_numerator),
                    opt(&r.exact_denominator),
                    opt(&r.exact_float),
                    r.mean.to_string(),
                    r.stderr.to_string(),
                    r.ess.to_string(),
                    opt(&r.z),
                ])
                .unwrap();
            }
            String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
        }
        Format::Plain => {
            let mut out = format!("m={} alpha={} method={:?} samples={}\n", p.m, p.alpha, batch.method, batch.len());
            for r in &rows {
                writeln!(
                    out,
                    "k={} mean={:.8} stderr={:.2e} exact={} z={}",
                    r.k,
                    r.mean,
                    r.stderr,
                    r.exact_float.map(|x| format!("{x:.8}")).unwrap_or_else(|| "-".into()),
                    r.z.map(|z| format!("{z:.2}")).unwrap_or_else(|| "-".into())
                )
                .unwrap();
            }
            out
        }
    })
}

/// One row of the `figure1` table.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Figure1Row {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub exact_num: String,
    pub exact_den: String,
    pub exact_float: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

pub fn figure1_rows(a: &Figure1Args) -> Result<Vec<Figure1Row>, CliError> {
    if a.m_list.is_empty() || a.k_list.is_empty() {
        return Err(CliError::Usage("--m-list and --k-list must be non-empty".into()));
    }
    if let Some(k) = a.k_list.iter().find(|k| !(1..=3).contains(*k)) {
        return Err(CliError::Usage(format!("k must be 1, 2 or 3, got {k}")));
    }
    let k_max = *a.k_list.iter().max().unwrap();
    let mut rows = Vec::new();
    for &m in &a.m_list {
        for n in [m, 2 * m] {
            let p = EnsembleParams::physical(m, n)?;
            let exact = exact_moments(&p, k_max)?;
            let est = if a.sampling.samples > 0 {
                Some(estimate_moments(&run_sampler(&p, &a.sampling)?, k_max))
            } else {
                None
            };
            for &k in &a.k_list {
                let x = exact[k as usize - 1]
                    .clone()
                    .ok_or_else(|| CliError::Usage(format!("no exact value at m={m} n={n} k={k}")))?;
                let e = est.as_ref().map(|v| &v[k as usize - 1]);
                rows.push(Figure1Row {
                    m,
                    n,
                    k,
                    exact_num: x.numer().to_string(),
                    exact_den: x.denom().to_string(),
                    exact_float: to_f64(&x),
                    mc_mean: e.map(|e| e.mean),
                    mc_stderr: e.map(|e| e.stderr),
                    samples: if e.is_some() { a.sampling.samples } else { 0 },
                    seed: a.sampling.seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn figure1(a: &Figure1Args) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in figure1_rows(a)? {
        w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

fn grid_points(a: &KernelsArgs) -> Result<Vec<f64>, CliError> {
    let pts = match &a.points {
        Some(p) => p.clone(),
        None => {
            if a.count == 0 {
                return Err(CliError::Usage("--count must be positive".into()));
            }
            if a.count == 1 {
                vec![a.x_min]
            } else {
                let t = |i: usize| i as f64 / (a.count - 1) as f64;
                if a.log {
                    if a.x_min <= 0.0 {
                        return Err(CliError::Usage("--log needs --x-min > 0".into()));
                    }
                    (0..a.count).map(|i| a.x_min * (a.x_max / a.x_min).powf(t(i))).collect()
                } else {
                    (0..a.count).map(|i| a.x_min + (a.x_max - a.x_min) * t(i)).collect()
                }
            }
        }
    };
    if pts.is_empty() || pts.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(CliError::Usage("grid points must be positive".into()));
    }
    Ok(pts)
}

const KINDS: [KernelKind; 4] = [KernelKind::K00, KernelKind::K01, KernelKind::K10, KernelKind::K11];

fn kernels_wide(ctx: &KernelContext, pts: &[f64], digits: usize) -> Result<String, KernelError> {
    let prec = ctx.prec();
    let s = |v: &Float| v.to_string_radix(10, Some(digits));
    let xs: Vec<Float> = pts.iter().map(|&x| ctx.float(x)).collect();
    let nodes = xs.iter().map(|x| ctx.node_values(x)).collect::<Result<Vec<_>, _>>()?;
    let l1 = xs.iter().map(|x| ctx.eval_ell(1, x)).collect::<Result<Vec<_>, _>>()?;
    let l2 = xs.iter().map(|x| ctx.eval_ell(2, x)).collect::<Result<Vec<_>, _>>()?;
    let h1: Vec<Float> = nodes.iter().map(|n| ctx.density_at(&[n])).collect();
    let mut out = String::from("x,y,K00,K01,K10,K11,K00_sym,l1x_l1y,l1_x,l2_x,h1_x\n");
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let (a, b) = (&nodes[i], &nodes[j]);
            let k: Vec<Float> = KINDS.iter().map(|&kind| ctx.kernel_at(kind, a, b)).collect();
            let sym = Float::with_val(prec, &k[0] + &ctx.kernel_at(KernelKind::K00, b, a));
            let ll = Float::with_val(prec, &l1[i] * &l1[j]);
            let cols = [&xs[i], &xs[j], &k[0], &k[1], &k[2], &k[3], &sym, &ll, &l1[i], &l2[i], &h1[i]];
            out.push_str(&cols.iter().map(|v| s(v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn kernels(a: &KernelsArgs, prec: u32) -> Result<String, CliError> {
    let p = a.ensemble.params()?;
    let pts = grid_points(a)?;
    let out = with_precision_retry(&p, prec, |ctx| match a.layout {
        Layout::Wide => kernels_wide(ctx, &pts, a.digits),
        Layout::Long => {
            let xs: Vec<Float> = pts.iter().map(|&x| ctx.float(x)).collect();
            Ok(kernel_csv(&tabulate(ctx, &KINDS, &xs, &xs)?, a.digits))
        }
    })?;
    Ok(out)
}
