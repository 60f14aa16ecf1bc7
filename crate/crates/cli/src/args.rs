use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kg_galerkin::critical;

#[derive(Parser, Debug)]
#[command(
    name = "kg-galerkin",
    version,
    about = "Spectral Galerkin solver for the 1+1D nonlinear Klein-Gordon equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact elliptic-function stationary solutions and their mode coefficients
    Stationary(StationaryArgs),
    /// Integrate the N-mode truncated system from initial data
    Evolve(EvolveArgs),
    /// Critical points of the truncated potential U^(N)
    Critical(CriticalArgs),
    /// Local and total truncation residual of a coefficient state
    Residual(ResidualArgs),
    /// Dump nonzero coupling coefficients D_nmpq
    Tensor(TensorArgs),
    /// U^(3) on an (A_1, A_3) grid with A_2 = 0
    Landscape(LandscapeArgs),
}

/// Either `--lambda` or the physical triple `--beta --phi0 --ell`.
#[derive(Args, Debug, Clone)]
pub struct Physics {
    /// Dimensionless coupling, lambda = -beta phi0^2 ell^2 / pi^2
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta")]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["phi0", "ell"])]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "beta")]
    pub phi0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "beta")]
    pub ell: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Directory receiving output files
    #[arg(long, env = "KG_GALERKIN_OUT", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Number of Fourier modes per solution
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    /// Maximum number of solutions (default: all for lambda < 0, 3 for lambda > 0)
    #[arg(long)]
    pub branches: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    MinimumError,
    Verlet,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Number of modes kept
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Initial coefficients, e.g. "A=1,1,-1,1" and/or "V=0,0.5" (repeatable or ';'-joined)
    #[arg(long, allow_hyphen_values = true)]
    pub init: Vec<String>,
    /// Initial field u(xi) as a two-column (xi, value) CSV on a uniform grid over [0, pi]
    #[arg(long, conflicts_with = "init")]
    pub field: Option<PathBuf>,
    /// Initial field velocity, same layout as --field
    #[arg(long, requires = "field")]
    pub field_velocity: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Write every k-th step (the final step is always written)
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::MinimumError)]
    pub scheme: SchemeArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Half-width of the square (A_1, A_3) window
    #[arg(long, default_value_t = 4.0)]
    pub range: f64,
    /// Samples per axis
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of nontrivial points reported
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    /// Seed of the random multistart batch
    #[arg(long, default_value_t = critical::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = critical::DEFAULT_DRAWS)]
    pub draws: usize,
    /// Also write the U^(3) landscape grid
    #[arg(long)]
    pub landscape: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    /// Coefficients, e.g. "A=1,0"
    #[arg(long, allow_hyphen_values = true, conflicts_with = "state_file")]
    pub state: Option<String>,
    /// State CSV with columns n, A[, V], as written by `evolve`
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Zero-pad the state to this many modes
    #[arg(long)]
    pub n: Option<usize>,
    /// Quadrature intervals on [0, pi] (default 32 N)
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    /// Largest mode index
    #[arg(long, default_value_t = 4)]
    pub max_index: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: Output,
}
