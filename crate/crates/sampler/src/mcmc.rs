//! Metropolis walk on the eigenvalue simplex.

use rand::Rng;
use rayon::prelude::*;

use purity_core::ratcore::to_f64;
use purity_core::recurrence::EnsembleParams;

use crate::{split_counts, stream_rng, McmcMeta, Method, SampleBatch, SamplerError};

/// Chain settings. `step_scale: None` tunes the step on a pilot run.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub step_scale: Option<f64>,
    pub burn_in: usize,
    pub thinning: usize,
    pub streams: usize,
}

impl McmcConfig {
    /// Defaults scaled with the number of coordinates.
    pub fn for_m(m: usize) -> Self {
        McmcConfig { step_scale: None, burn_in: 2000 * m * m, thinning: 2 * m * m, streams: 16 }
    }
}

/// Acceptance band the pilot run aims for.
const TUNE_BAND: (f64, f64) = (0.3, 0.5);
const PILOT_STEPS: usize = 4000;
const PILOT_ROUNDS: usize = 40;
/// Stream index reserved for the pilot run.
const PILOT_STREAM: u64 = u64::MAX;

struct Chain {
    lambda: Vec<f64>,
    alpha: f64,
    step: f64,
    accepted: u64,
    proposed: u64,
}

impl Chain {
    fn new<R: Rng>(rng: &mut R, m: usize, alpha: f64, step: f64) -> Self {
        // uniform point of the simplex
        let mut lambda: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= s);
        Chain { lambda, alpha, step, accepted: 0, proposed: 0 }
    }

    /// Log density terms that involve coordinates `i` or `j`, at `li`, `lj`.
    fn local(&self, i: usize, j: usize, li: f64, lj: f64) -> f64 {
        let pair = |a: f64, b: f64| 2.0 * (a - b).abs().ln() - (a + b).ln();
        let mut s = pair(li, lj) + self.alpha * (li.ln() + lj.ln());
        for (k, &lk) in self.lambda.iter().enumerate() {
            if k != i && k != j {
                s += pair(li, lk) + pair(lj, lk);
            }
        }
        s
    }

    fn step<R: Rng>(&mut self, rng: &mut R) {
        let m = self.lambda.len();
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let delta = self.step * (2.0 * rng.random::<f64>() - 1.0);
        let u = rng.random::<f64>();
        self.proposed += 1;
        let (li, lj) = (self.lambda[i], self.lambda[j]);
        let (ni, nj) = (li - delta, lj + delta);
        if ni <= 0.0 || nj <= 0.0 {
            return;
        }
        let log_ratio = self.local(i, j, ni, nj) - self.local(i, j, li, lj);
        if log_ratio >= 0.0 || u.ln() < log_ratio {
            self.lambda[i] = ni;
            self.lambda[j] = nj;
            self.accepted += 1;
        }
    }

    fn purity(&self) -> f64 {
        let s: f64 = self.lambda.iter().sum();
        self.lambda.iter().map(|l| l * l).sum::<f64>() / (s * s)
    }

    fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Step size whose acceptance rate falls in [`TUNE_BAND`], found on a pilot chain.
fn tune_step(m: usize, alpha: f64, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, PILOT_STREAM);
    let mut step = 0.5 / m as f64;
    let mut chain = Chain::new(&mut rng, m, alpha, step);
    for _ in 0..PILOT_STEPS {
        chain.step(&mut rng);
    }
    for _ in 0..PILOT_ROUNDS {
        chain.step = step;
        chain.accepted = 0;
        chain.proposed = 0;
        for _ in 0..PILOT_STEPS {
            chain.step(&mut rng);
        }
        let a = chain.acceptance();
        if a < TUNE_BAND.0 {
            step *= 0.7;
        } else if a > TUNE_BAND.1 {
            step = (step * 1.4).min(1.0);
        } else {
            break;
        }
    }
    step
}

/// Samples purities from the eigenvalue density on the simplex for any `α > -1`.
///
/// Each stream runs an independent chain with its own burn-in and keeps
/// every `thinning`-th state; `count` kept samples are split across streams.
pub fn sample_eigen_mcmc(
    params: &EnsembleParams,
    count: usize,
    seed: u64,
    config: &McmcConfig,
) -> Result<SampleBatch, SamplerError> {
    let m = params.m;
    let alpha = to_f64(&params.alpha);
    if alpha <= -1.0 {
        return Err(SamplerError::Param(format!("alpha must exceed -1, got {}", params.alpha)));
    }
    if m < 2 {
        return Err(SamplerError::Degenerate("m = 1 has purity identically 1".into()));
    }
    if config.thinning == 0 {
        return Err(SamplerError::Param("thinning must be positive".into()));
    }
    let step = match config.step_scale {
        Some(s) if s > 0.0 => s,
        Some(s) => return Err(SamplerError::Param(format!("step scale must be positive, got {s}"))),
        None => tune_step(m, alpha, seed),
    };
    let lengths = split_counts(count, config.streams);
    let parts: Vec<(Vec<f64>, u64, u64)> = lengths
        .par_iter()
        .enumerate()
        .map(|(s, &len)| {
            let mut rng = stream_rng(seed, s as u64);
            let mut chain = Chain::new(&mut rng, m, alpha, step);
            for _ in 0..config.burn_in {
                chain.step(&mut rng);
            }
            chain.accepted = 0;
            chain.proposed = 0;
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                for _ in 0..config.thinning {
                    chain.step(&mut rng);
                }
                out.push(chain.purity());
            }
            (out, chain.accepted, chain.proposed)
        })
        .collect();
    let (mut acc, mut prop) = (0u64, 0u64);
    let mut purities = Vec::with_capacity(count);
    for (p, a, n) in parts {
        purities.extend(p);
        acc += a;
        prop += n;
    }
    Ok(SampleBatch {
        params: params.clone(),
        method: Method::EigenMcmc,
        weights: vec![1.0; purities.len()],
        purities,
        seed,
        streams: lengths.len(),
        stream_lengths: lengths,
        mcmc_meta: Some(McmcMeta {
            burn_in: config.burn_in,
            thinning: config.thinning,
            step_scale: step,
            acceptance_rate: if prop == 0 { 0.0 } else { acc as f64 / prop as f64 },
        }),
    })
}
