//! Weighted moment estimates with autocorrelation-aware errors.

use serde::{Deserialize, Serialize};

use crate::{Method, SampleBatch};

/// Estimate of `E[P^k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: u32,
    pub mean: f64,
    pub stderr: f64,
    /// Kish size for weighted batches, `N / τ` for MCMC batches.
    pub ess: f64,
}

/// Self-normalized estimates of `E[P^k]` for `k = 1..=k_max`.
///
/// Errors use the delta method for the ratio estimator, scaled by `N/(N-1)`
/// so equal weights reproduce the plain sample standard error. MCMC errors are
/// inflated by `√τ`, the integrated autocorrelation time of `P^k`.
pub fn estimate_moments(batch: &SampleBatch, k_max: u32) -> Vec<MomentEstimate> {
    let n = batch.len();
    let w = &batch.weights;
    let sw: f64 = w.iter().sum();
    let kish = batch.weight_ess();
    (1..=k_max)
        .map(|k| {
            let x: Vec<f64> = batch.purities.iter().map(|p| p.powi(k as i32)).collect();
            if n == 0 {
                return MomentEstimate { k, mean: f64::NAN, stderr: f64::NAN, ess: 0.0 };
            }
            if x.iter().all(|v| *v == x[0]) {
                return MomentEstimate { k, mean: x[0], stderr: 0.0, ess: kish };
            }
            let mean = x.iter().zip(w).map(|(v, w)| v * w).sum::<f64>() / sw;
            let var: f64 = x.iter().zip(w).map(|(v, w)| (w * (v - mean)).powi(2)).sum::<f64>() / (sw * sw);
            let var = if n > 1 { var * n as f64 / (n - 1) as f64 } else { var };
            let (stderr, ess) = match batch.method {
                Method::EigenMcmc => {
                    let tau = integrated_autocorrelation(&x, &batch.stream_lengths, mean);
                    ((var * tau).sqrt(), n as f64 / tau)
                }
                Method::MatrixModel => (var.sqrt(), kish),
            };
            MomentEstimate { k, mean, stderr, ess: ess.min(n as f64) }
        })
        .collect()
}

/// Integrated autocorrelation time of `x`, made of consecutive chains of the
/// given lengths, truncated at the first non-positive pair sum of
/// autocorrelations (initial positive sequence).
pub fn integrated_autocorrelation(x: &[f64], chains: &[usize], mean: f64) -> f64 {
    let mut spans = Vec::with_capacity(chains.len());
    let mut start = 0;
    for &len in chains {
        if len > 0 {
            spans.push(&x[start..start + len]);
        }
        start += len;
    }
    let total: usize = spans.iter().map(|s| s.len()).sum();
    let autocov = |lag: usize| -> f64 {
        let s: f64 = spans
            .iter()
            .filter(|c| c.len() > lag)
            .map(|c| c.iter().zip(&c[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>())
            .sum();
        s / total as f64
    };
    let c0 = autocov(0);
    if c0 <= 0.0 {
        return 1.0;
    }
    let max_lag = spans.iter().map(|c| c.len()).max().unwrap_or(0) / 2;
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < max_lag.max(2) {
        let pair = (autocov(lag) + autocov(lag + 1)) / c0;
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    tau.max(f64::MIN_POSITIVE)
}
