//! Command-line front end for exact and simulated purity moments.
//!
//! The binary `purity` is a thin layer over [`commands`]; the verification
//! suites in [`suites`] are also usable as a library.

pub mod args;
pub mod commands;
pub mod report;
pub mod suites;

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}\nhint: raise --precision-bits (or PURITY_PRECISION_BITS)")]
    Precision(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Precision(_) => 3,
        }
    }
}

impl From<purity_kernels::KernelError> for CliError {
    fn from(e: purity_kernels::KernelError) -> Self {
        match e {
            purity_kernels::KernelError::Precision(s) => CliError::Precision(s),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<purity_core::closed_forms::ClosedFormError> for CliError {
    fn from(e: purity_core::closed_forms::ClosedFormError) -> Self {
        use purity_core::closed_forms::ClosedFormError;
        match e {
            ClosedFormError::Consistency { .. } => CliError::Verification(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<purity_core::recurrence::RecurrenceError> for CliError {
    fn from(e: purity_core::recurrence::RecurrenceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<purity_sampler::SamplerError> for CliError {
    fn from(e: purity_sampler::SamplerError) -> Self {
        CliError::Usage(e.to_string())
    }
}
