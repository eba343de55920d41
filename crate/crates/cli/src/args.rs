//! Command-line flags.

use clap::{Args, Parser, Subcommand, ValueEnum};

use purity_core::ratcore::parse_rational;
use purity_core::recurrence::EnsembleParams;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "purity", version, about = "Exact and simulated moments of the Bures-Hall purity")]
pub struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = "PURITY_THREADS")]
    pub threads: Option<usize>,
    /// Working precision of the numeric kernels, in bits.
    #[arg(long, global = true, env = "PURITY_PRECISION_BITS", default_value_t = 200)]
    pub precision_bits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact E[P^k] as a fraction.
    Moments(MomentsArgs),
    /// Run a verification suite; exit 1 on any failure.
    Verify(VerifyArgs),
    /// Monte Carlo estimates compared with the exact moments.
    Mc(McArgs),
    /// Exact and simulated moments for n = m and n = 2m.
    Figure1(Figure1Args),
    /// Tabulate kernels, l1, l2 and h1 on a grid.
    Kernels(KernelsArgs),
}

/// Ensemble selection: `--m` with exactly one of `--n` or `--alpha`.
#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
    pub n: Option<usize>,
    /// Exact rational such as `7/3` or `-1/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
}

impl EnsembleArgs {
    pub fn params(&self) -> Result<EnsembleParams, CliError> {
        ensemble(self.m, self.n, self.alpha.as_deref())
    }
}

/// Parameters from `m` and at most one of `n`, `alpha`; `n = m` when both are absent.
pub fn ensemble(m: usize, n: Option<usize>, alpha: Option<&str>) -> Result<EnsembleParams, CliError> {
    match (n, alpha) {
        (Some(_), Some(_)) => Err(CliError::Usage("--n and --alpha are mutually exclusive".into())),
        (Some(n), None) => Ok(EnsembleParams::physical(m, n)?),
        (None, Some(a)) => {
            let a = parse_rational(a).map_err(|e| CliError::Usage(format!("bad --alpha: {e}")))?;
            Ok(EnsembleParams::with_alpha(m, a)?)
        }
        (None, None) => Ok(EnsembleParams::physical(m, m)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Recurrence,
    Identities,
    Kernels,
    Appendix,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Largest dimension covered by the exact suites.
    #[arg(long, default_value_t = 6)]
    pub m_max: usize,
    /// Single `m` for the appendix suite (default: every m up to min(m-max, 4)).
    #[arg(long)]
    pub m: Option<usize>,
    /// Larger dimension for the appendix suite (default n = m).
    #[arg(long, conflicts_with = "alpha")]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Target accuracy, in bits, of the quadrature rule used by the appendix suite.
    #[arg(long, default_value_t = 60)]
    pub quad_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Matrix,
    Mcmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Modulus,
    RealPart,
}

/// Sampler settings shared by `mc` and `figure1`.
#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent RNG streams (chains for MCMC).
    #[arg(long, default_value_t = 16)]
    pub streams: usize,
    /// Default: matrix for physical alpha, mcmc otherwise.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    /// Fixed MCMC step; tuned on a pilot chain when absent.
    #[arg(long)]
    pub step_scale: Option<f64>,
    /// Importance weight of the matrix model (`real-part` is for comparison only).
    #[arg(long, value_enum, default_value_t = WeightArg::Modulus, hide = true)]
    pub weight: WeightArg,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub k: u32,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Write the `purity,weight` samples here, with a `.json` sidecar next to it.
    #[arg(long)]
    pub samples_out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6])]
    pub m_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    pub k_list: Vec<u32>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// One row per (x, y) with every quantity as a column.
    Wide,
    /// `x,y,kernel_ab,value` rows for the four kernels.
    Long,
}

#[derive(Debug, Args)]
pub struct KernelsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Explicit grid points; overrides the range flags.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Space the range points logarithmically.
    #[arg(long)]
    pub log: bool,
    /// Significant digits per value.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
    #[arg(long, value_enum, default_value_t = Layout::Wide)]
    pub layout: Layout,
}
