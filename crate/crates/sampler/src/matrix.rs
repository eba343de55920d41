//! Matrix-model sampler: `ρ ∝ (I+U) Z Z† (I+U)†` with importance weights.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use purity_core::recurrence::EnsembleParams;

use crate::{split_counts, stream_rng, Method, SampleBatch, SamplerError};

/// How the importance weight of `U` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// `|det(I+U)|^{2(n-m)}`.
    #[default]
    Modulus,
    /// `Re det(I+U)^{2(n-m)}`, for comparison only; may be negative.
    RealPart,
}

fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar unitary from the QR factorization of a Ginibre matrix.
///
/// `Q` alone is Haar only when the factorization makes `R_jj` real positive.
/// Multiplying column `j` by the phase of `R_jj` removes that dependence.
pub fn haar_unitary<R: Rng>(rng: &mut R, m: usize) -> DMatrix<Complex<f64>> {
    let qr = complex_gaussian(rng, m, m).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// One purity sample and its weight.
fn draw<R: Rng>(rng: &mut R, m: usize, n: usize, mode: WeightMode) -> (f64, f64) {
    let z = complex_gaussian(rng, m, n);
    let mut b = haar_unitary(rng, m);
    for i in 0..m {
        b[(i, i)] += Complex::new(1.0, 0.0);
    }
    let g = &b * z;
    let a = &g * g.adjoint();
    let tr: f64 = (0..m).map(|i| a[(i, i)].re).sum();
    let frob: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let purity = frob / (tr * tr);
    let p = (n - m) as i32;
    let weight = if p == 0 {
        1.0
    } else {
        let det = b.determinant();
        match mode {
            WeightMode::Modulus => det.norm_sqr().powi(p),
            WeightMode::RealPart => det.powi(2 * p).re,
        }
    };
    (purity, weight)
}

/// Draws `count` weighted purity samples for physical `(m, n)`.
///
/// Moments are the self-normalized averages `Σ w P^k / Σ w`.
pub fn sample_matrix_model(
    params: &EnsembleParams,
    count: usize,
    seed: u64,
    streams: usize,
    mode: WeightMode,
) -> Result<SampleBatch, SamplerError> {
    let n = params
        .implied_n()
        .ok_or_else(|| SamplerError::Param(format!("matrix model needs alpha = n - m - 1/2, got {}", params.alpha)))?;
    let m = params.m;
    let lengths = split_counts(count, streams);
    let parts: Vec<(Vec<f64>, Vec<f64>)> = lengths
        .par_iter()
        .enumerate()
        .map(|(s, &len)| {
            let mut rng = stream_rng(seed, s as u64);
            (0..len).map(|_| draw(&mut rng, m, n, mode)).unzip()
        })
        .collect();
    let mut purities = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for (p, w) in parts {
        purities.extend(p);
        weights.extend(w);
    }
    Ok(SampleBatch {
        params: params.clone(),
        method: Method::MatrixModel,
        purities,
        weights,
        seed,
        streams: lengths.len(),
        stream_lengths: lengths,
        mcmc_meta: None,
    })
}
