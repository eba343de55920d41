//! Monte Carlo purity samples of the Bures-Hall ensemble.
//!
//! Two independent samplers produce [`SampleBatch`]es: the matrix model
//! ([`matrix::sample_matrix_model`]), an importance-weighted construction from
//! Ginibre and Haar matrices, and a Metropolis walk on the eigenvalue simplex
//! ([`mcmc::sample_eigen_mcmc`]). [`estimate::estimate_moments`] turns a batch
//! into weighted moment estimates.
//!
//! Every sampler splits its work into `streams` ChaCha streams keyed by
//! `(seed, stream index)` and concatenates them in index order, so the output
//! does not depend on the number of worker threads.

pub mod estimate;
pub mod export;
pub mod matrix;
pub mod mcmc;

use purity_core::recurrence::EnsembleParams;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

pub use estimate::{estimate_moments, MomentEstimate};
pub use matrix::{sample_matrix_model, WeightMode};
pub use mcmc::{sample_eigen_mcmc, McmcConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("degenerate ensemble: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MatrixModel,
    EigenMcmc,
}

/// Chain settings and diagnostics recorded by the MCMC sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcMeta {
    pub burn_in: usize,
    pub thinning: usize,
    pub step_scale: f64,
    pub acceptance_rate: f64,
}

/// Purity samples with their importance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub params: EnsembleParams,
    pub method: Method,
    pub purities: Vec<f64>,
    /// All 1 for unweighted methods.
    pub weights: Vec<f64>,
    pub seed: u64,
    pub streams: usize,
    /// Samples contributed by each stream, in concatenation order.
    pub stream_lengths: Vec<usize>,
    pub mcmc_meta: Option<McmcMeta>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.purities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.purities.is_empty()
    }

    /// Kish effective sample size `(Σw)² / Σw²`.
    pub fn weight_ess(&self) -> f64 {
        let s: f64 = self.weights.iter().sum();
        let s2: f64 = self.weights.iter().map(|w| w * w).sum();
        if s2 == 0.0 {
            0.0
        } else {
            s * s / s2
        }
    }
}

/// Deterministic RNG for one stream.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `count` into `streams` near-equal parts, larger parts first.
pub(crate) fn split_counts(count: usize, streams: usize) -> Vec<usize> {
    let streams = streams.max(1);
    (0..streams).map(|i| count / streams + usize::from(i < count % streams)).collect()
}
