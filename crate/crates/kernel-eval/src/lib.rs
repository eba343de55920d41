//! High-precision correlation kernels of the Bures-Hall ensemble.
//!
//! [`context::KernelContext`] evaluates the biorthogonal polynomials, their
//! Cauchy transforms, the four correlation kernels, `ℓ₁`, `ℓ₂` and the
//! 1-, 2- and 3-point densities at a chosen binary precision. [`grid`] integrates
//! kernel products on double-exponential tensor grids, and [`checks`] registers the
//! quadrature oracles used to confirm the exact integrals.

pub mod checks;
pub mod context;
pub mod export;
pub mod grid;
pub mod psi;
pub mod quad;
pub mod terms;

pub use context::{bimoment, Family, KernelContext, NodeValues, DEFAULT_PRECISION};
pub use purity_core::kernel_integrals::KernelKind;

/// Errors from numeric kernel evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum KernelError {
    #[error("precision: {0}")]
    Precision(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Rat(#[from] purity_core::ratcore::RatError),
    #[error(transparent)]
    Recurrence(#[from] purity_core::recurrence::RecurrenceError),
}

/// Number of precision doublings tried by [`with_precision_retry`].
pub const MAX_DOUBLINGS: u32 = 2;

/// Runs `f` on a context at `bits`, doubling the precision after each
/// [`KernelError::Precision`] up to [`MAX_DOUBLINGS`] times.
pub fn with_precision_retry<T>(
    params: &purity_core::recurrence::EnsembleParams,
    bits: u32,
    f: impl Fn(&KernelContext) -> Result<T, KernelError>,
) -> Result<T, KernelError> {
    let mut prec = bits;
    let mut last = None;
    for _ in 0..=MAX_DOUBLINGS {
        let ctx = KernelContext::new(params, prec)?;
        match f(&ctx) {
            Err(KernelError::Precision(e)) => last = Some(e),
            other => return other,
        }
        prec *= 2;
    }
    Err(KernelError::Precision(last.unwrap_or_default()))
}
