use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "reslab", version, about = "Restriction-estimate laboratory for discretized fractal measures")]
pub struct Cli {
    /// JSON experiment config (seed, tolerances, probe settings, budgets).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Global seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for relative output paths. Falls back to RESLAB_OUT_DIR,
    /// then the config file, then the working directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or transform measure files.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Regularity exponents of a measure.
    Analyze(AnalyzeArgs),
    /// Density norms of convolution powers across resolutions.
    Conv(ConvArgs),
    /// Exact exponent ranges.
    Exponents(ExponentsArgs),
    /// Lower bound for one restriction operator norm.
    Probe(ProbeArgs),
    /// Growth classification over a (p, q) grid.
    Sweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Markdown summary of a sweep and an analysis.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeasureCommand {
    /// Construct a measure.
    New(NewArgs),
    /// Reflect a measure through the origin.
    Reflect(ReflectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Dirac,
    Uniform,
    Interval,
    Cantor,
    RandomFlat,
    Circle,
}

#[derive(Debug, Args)]
pub struct NewArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Grid resolution (ignored by cantor, which uses base^stage).
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Atom position for dirac, one coordinate per dimension.
    #[arg(long, value_delimiter = ',')]
    pub index: Option<Vec<usize>>,
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub base: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,3")]
    pub digits: Vec<usize>,
    #[arg(long)]
    pub stage: Option<u32>,
    /// Support size for random-flat.
    #[arg(long)]
    pub m: Option<usize>,
    /// Flatness certificate constant for random-flat.
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, default_value_t = 200)]
    pub max_retries: usize,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value = "measure.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReflectArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long, default_value = "reflected.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value = "measure.json")]
    pub measure: PathBuf,
    #[arg(long)]
    pub alpha: bool,
    /// Fourier decay estimate from frequencies |k| <= K.
    #[arg(long, value_name = "K")]
    pub beta: Option<usize>,
    #[arg(long)]
    pub gamma: bool,
    /// Dyadic radii; defaults to 1/4 down to eight cells.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Annulus ratio for the decay fit.
    #[arg(long, default_value_t = 2.0)]
    pub annulus_base: f64,
    #[arg(long, default_value = "analysis.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvArgs {
    #[arg(long, default_value = "measure.json")]
    pub measure: PathBuf,
    /// Convolution power.
    #[arg(short = 'n', default_value_t = 2)]
    pub n: u32,
    /// Density exponent, a rational or `inf`.
    #[arg(short = 'r', default_value = "inf")]
    pub r: String,
    /// Rebuild the measure at these resolutions.
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,
    /// Also write the table to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub d: Option<i64>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value = "measure.json")]
    pub measure: PathBuf,
    #[arg(short = 'p')]
    pub p: String,
    #[arg(short = 'q')]
    pub q: String,
    /// Lattice half-width.
    #[arg(short = 'X')]
    pub x: usize,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value = "probe.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "measure.json")]
    pub measure: PathBuf,
    /// `a:b:step` or a comma separated list.
    #[arg(long)]
    pub p_grid: String,
    #[arg(long)]
    pub q_grid: String,
    #[arg(long = "X", value_delimiter = ',', default_value = "64,128,256,512")]
    pub x: Vec<usize>,
    /// Convolution power of the overlaid theorem region.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Density exponent of the overlaid theorem region.
    #[arg(long, default_value = "inf")]
    pub r: String,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Hy,
    Chain,
    #[value(name = "prop1")]
    RegularityTransfer,
    #[value(name = "prop2")]
    FourierSums,
    #[value(name = "prop3")]
    AutocorrelationGrowth,
    Knapp,
    Bilinear,
    Expid,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Mollifier half-widths in cells.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub s_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub k_values: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub hy_n: Option<usize>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "sweep.csv")]
    pub sweep: PathBuf,
    #[arg(long)]
    pub analysis: Option<PathBuf>,
    /// Write the markdown here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
