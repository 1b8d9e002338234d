//! Front end for the foliation crates.  Commands return a [`CliError`]
//! whose [`CliError::exit_code`] is what the binary exits with.

pub mod commands;
pub mod input;
pub mod render;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;
pub use input::{differential, parse_coeffs, parse_complex, SurfaceArg};
pub use render::{render_svg, RenderOptions, RenderStats};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("extraction failed: {0}")]
    Extraction(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Extraction(_) | CliError::Check(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qd_core::QdError> for CliError {
    fn from(e: qd_core::QdError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<foliation_extractor::ExtractError> for CliError {
    fn from(e: foliation_extractor::ExtractError) -> Self {
        match e {
            foliation_extractor::ExtractError::Qd(q) => CliError::Input(q.to_string()),
            e => CliError::Extraction(e.to_string()),
        }
    }
}

impl From<foliation_space::SpaceError> for CliError {
    fn from(e: foliation_space::SpaceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<graph_moduli::GraphError> for CliError {
    fn from(e: graph_moduli::GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("schema: {e}"))
    }
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "foliate", version, about = "Measured foliations of quadratic differentials on C and C*")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice; same seed, same output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance of the leaf integrator.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

#[derive(Debug, Args, Clone)]
pub struct DiffArgs {
    #[arg(long, value_enum, default_value_t = SurfaceArg::Punctured)]
    pub surface: SurfaceArg,
    /// Pole order at infinity.
    #[arg(long)]
    pub n: Option<usize>,
    /// Pole order at the origin.
    #[arg(long)]
    pub m: Option<usize>,
    /// Coefficients of the monic numerator, highest degree first, e.g. "1,-i,i".
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    H,
    V,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartDir {
    ToCoords,
    ToGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartSpace {
    /// Foliations of C* with given pole orders, coordinates in R^{n+m-4}.
    Fnm,
    /// Same chart with the base written as (twist, τ) or (ring height, 0).
    Folded,
    /// Pairs of foliations off the diagonal, R^{2n+2m-8}.
    Pair,
    /// Planar trees with k rays, R^{k-3}.
    Tree,
    /// Cycle graphs with k rays and cycle length τ, R^{k-1}.
    Cycle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract both foliations and write their descriptors.
    Analyze {
        #[command(flatten)]
        diff: DiffArgs,
        /// Directory for horizontal.json and vertical.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw leaves, critical graph, zeros and pole directions.
    Render {
        #[command(flatten)]
        diff: DiffArgs,
        #[arg(long, value_enum, default_value_t = KindArg::H)]
        kind: KindArg,
        #[arg(long)]
        svg: PathBuf,
        /// Launch points per side of the sampling grid.
        #[arg(long, default_value_t = 9)]
        grid: usize,
    },
    /// Convert between chart coordinates and graphs.
    Chart {
        #[arg(long = "chart-dir", value_enum)]
        chart_dir: ChartDir,
        #[arg(long, value_enum, default_value_t = ChartSpace::Fnm)]
        space: ChartSpace,
        /// Graph file to convert (to-coords).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma separated coordinates (to-graph).
        #[arg(long, allow_hyphen_values = true)]
        coords: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        tau: Option<f64>,
        /// Instead of converting, run this many random round trips.
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract, rebuild the flat surface and extract again.
    Roundtrip {
        /// A differential to check; without it, random pairs are used.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long, value_enum, default_value_t = SurfaceArg::Punctured)]
        surface: SurfaceArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Largest accepted descriptor discrepancy.
        #[arg(long, value_parser = positive)]
        accept: Option<f64>,
    },
    /// List the trivalent planar tree types with k rays.
    Enumerate {
        #[arg(long)]
        k: usize,
        /// Print every bracketing, not just the count.
        #[arg(long)]
        list: bool,
    },
}
