//! CSV and JSON sidecar output for sample batches.

use serde::{Deserialize, Serialize};

use crate::{McmcMeta, Method, SampleBatch};

/// Metadata written next to the sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub m: usize,
    pub n: Option<usize>,
    /// Exact `α` as `p/q` text.
    pub alpha: String,
    pub method: Method,
    pub seed: u64,
    pub streams: usize,
    pub count: usize,
    pub weight_ess: f64,
    pub mcmc: Option<McmcMeta>,
}

/// `purity,weight` rows in shortest round-trip decimal form.
pub fn to_csv(batch: &SampleBatch) -> String {
    let mut out = String::with_capacity(32 * batch.len() + 16);
    out.push_str("purity,weight\n");
    for (p, w) in batch.purities.iter().zip(&batch.weights) {
        out.push_str(&format!("{p},{w}\n"));
    }
    out
}

pub fn sidecar(batch: &SampleBatch) -> Sidecar {
    Sidecar {
        m: batch.params.m,
        n: batch.params.implied_n(),
        alpha: batch.params.alpha.to_string(),
        method: batch.method,
        seed: batch.seed,
        streams: batch.streams,
        count: batch.len(),
        weight_ess: batch.weight_ess(),
        mcmc: batch.mcmc_meta.clone(),
    }
}

pub fn sidecar_json(batch: &SampleBatch) -> String {
    serde_json::to_string_pretty(&sidecar(batch)).expect("sidecar serializes")
}
