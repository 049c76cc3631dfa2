use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "projlog", version, about = "Projective logarithmic potentials on P^n: kernels, scans, Monge-Ampere diagnostics")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples, or number of sampled evaluation points.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Grid points per real axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Finite-difference step.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Regularization parameters, comma separated and strictly decreasing.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Vec<f64>,
    /// Affine chart index; defaults to each point's best chart.
    #[arg(long, global = true)]
    pub chart: Option<usize>,
    /// Dimension n of P^n when no measure file is given.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Measure JSON file; defaults to a Dirac mass at [1:0:...:0].
    #[arg(long, global = true)]
    pub measure: Option<PathBuf>,
    /// Point-set JSON file; defaults to FS-uniform samples.
    #[arg(long, global = true)]
    pub points: Option<PathBuf>,
    /// Directory for artifacts; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "PROJLOG_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// G between consecutive points, with the distance and chart identities.
    Kernel,
    /// G_mu, its smoothings and the chart lift at points.
    Potential,
    /// Atoms, partition-of-unity weights and chart masses of a measure.
    Measure,
    /// Monte Carlo L^p norms of the FS gradient of G_mu.
    Sobolev(ScanArgs),
    /// L^p norms of the Riesz potential of the chart measure over a ball.
    Riesz(RieszArgs),
    /// Monge-Ampere density at points.
    MaDensity,
    /// Total Monge-Ampere mass over P^n.
    MaMass,
    /// Monge-Ampere mass of geodesic balls about the first atom.
    BallProfile(BallArgs),
    /// Multilinear expansion of det(sum_i w_i H_i) at points.
    Prop25Check,
    /// Area constant, normalization constant and related closed forms.
    Constants,
    /// FS-uniform points.
    Sample(SampleArgs),
    /// Identity and property checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Exponents, comma separated; defaults to 1 and 2n-1.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Report the near-atom contribution at each refinement level instead.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RieszArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Radius of the ball about the chart origin.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    /// Geodesic radii, comma separated and strictly decreasing.
    #[arg(long, value_delimiter = ',', default_value = "1,0.3,0.1")]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Emit a point-set JSON file instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run every check.
    #[arg(long)]
    pub all: bool,
    /// Names of checks to run.
    pub checks: Vec<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Potential => "potential",
            Command::Measure => "measure",
            Command::Sobolev(_) => "sobolev",
            Command::Riesz(_) => "riesz",
            Command::MaDensity => "ma-density",
            Command::MaMass => "ma-mass",
            Command::BallProfile(_) => "ball-profile",
            Command::Prop25Check => "prop25-check",
            Command::Constants => "constants",
            Command::Sample(_) => "sample",
            Command::Verify(_) => "verify",
        }
    }
}
