use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "faddeev",
    version,
    about = "Scattering eigenfunctions, Green functions and spectral singularities for point potentials"
)]
pub struct Cli {
    /// Worker threads for grid scans and sweeps.
    #[arg(long, global = true, env = "FADDEEV_WORKERS")]
    pub workers: Option<usize>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub rel_tol: f64,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub abs_tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenfunction, coefficients and optional scattering data at one point.
    Eval(EvalArgs),
    /// Reduced or full Green function at one point.
    Green(GreenArgs),
    /// Determinant scan and zero curves in the lambda plane (d = 2).
    Curves(CurvesArgs),
    /// `curves` with a built-in preset potential and grid.
    Figures(FiguresArgs),
    /// Convergence of cutoff coefficients to the point-interaction limit.
    Converge(ConvergeArgs),
    /// Numerical checks of the analytic identities.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Complex,
    Gamma,
    Plus,
}

/// A momentum on the variety. d = 2 prefers `--lambda`; d = 3 takes `--a-dir`, `--b-dir`, `--beta`.
#[derive(Debug, Clone, Args)]
pub struct MomentumArgs {
    /// Chart coordinate: real part and optional imaginary part.
    #[arg(long, num_args = 1..=2, allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,

    #[arg(long, num_args = 2..=3, allow_negative_numbers = true)]
    pub k_re: Option<Vec<f64>>,

    #[arg(long, num_args = 2..=3, allow_negative_numbers = true)]
    pub k_im: Option<Vec<f64>>,

    /// Direction of `Re k` (d = 3).
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    pub a_dir: Option<Vec<f64>>,

    /// Direction of `Im k` (d = 3).
    #[arg(long, num_args = 3, allow_negative_numbers = true)]
    pub b_dir: Option<Vec<f64>>,

    /// `|Im k|` (d = 3).
    #[arg(long)]
    pub beta: Option<f64>,

    /// Defaults to `complex` when `Im k != 0` and `plus` otherwise.
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,

    /// Limit direction for the gamma regime.
    #[arg(long, num_args = 2..=3, allow_negative_numbers = true)]
    pub gamma: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: PathBuf,

    /// Overrides the energy in the config.
    #[arg(long)]
    pub energy: Option<f64>,

    #[arg(long, num_args = 2..=3, required = true, allow_negative_numbers = true)]
    pub x: Vec<f64>,

    #[command(flatten)]
    pub momentum: MomentumArgs,

    /// Real part of `l` for `h(k, l)`; `Im l` is taken equal to `Im k`.
    #[arg(long, num_args = 2..=3, allow_negative_numbers = true)]
    pub l: Option<Vec<f64>>,

    /// Real `p` for `H(k, p)`.
    #[arg(long, num_args = 2..=3, allow_negative_numbers = true)]
    pub p: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreenKind {
    /// `g = e^{-ikx} G`.
    Reduced,
    /// `G`.
    Full,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long)]
    pub energy: f64,

    /// Evaluation point; its length fixes the dimension.
    #[arg(long, num_args = 2..=3, required = true, allow_negative_numbers = true)]
    pub x: Vec<f64>,

    #[command(flatten)]
    pub momentum: MomentumArgs,

    #[arg(long, value_enum, default_value_t = GreenKind::Reduced)]
    pub kind: GreenKind,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub n_r: Option<usize>,
    #[arg(long)]
    pub n_theta: Option<usize>,

    /// Target `|det A|` at refined vertices.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Also write the sampled grid as CSV.
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long)]
    pub config: PathBuf,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Preset number, 1 to 4.
    pub id: u8,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub config: PathBuf,

    #[command(flatten)]
    pub momentum: MomentumArgs,

    #[arg(long, num_args = 1.., default_values_t = [25.0, 50.0, 100.0, 200.0, 400.0])]
    pub cutoffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Dbar,
    Limit,
    Helmholtz,
    Asymptotic,
    Reality,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Potential configs; the built-in presets plus a three-dimensional pair when absent.
    #[arg(long)]
    pub config: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,

    /// Multiplies every error threshold.
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random sample points per config.
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
}
