//! `necklace`: densities, profiles and the polynomial reduction from the
//! command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "necklace", version, about = "Homomorphism densities, necklace profiles and the polynomial reduction")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// p(1/n_2, ..., 1/n_l) for 1 <= n_i <= n-max.
    Reciprocal,
    /// p(n_2, ..., n_l) for 1 <= n_i <= n-max.
    Integer,
    /// The transformed polynomial on sample points of the region.
    Region,
}

/// A polynomial from a JSON file or an inline expression in x2, ..., x_l.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PolyInput {
    /// Polynomial JSON file.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Inline polynomial such as "2*x2 - 1" in the variables x2..x_l.
    #[arg(long)]
    pub expr: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// t(H, W) for a graph H and a step kernel W.
    Density {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
    },
    /// hom(H, G) for a graph H and a weighted graph G.
    Hom {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weighted: PathBuf,
    },
    /// The necklace N(c, q) as graph JSON.
    Necklace {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        q: usize,
    },
    /// Replace every edge of a graph by a q-clique.
    Qify {
        /// Graph JSON file.
        #[arg(long, conflicts_with = "base", required_unless_present = "base")]
        graph: Option<PathBuf>,
        /// Built-in base graph: c5, petersen or hoffman-singleton.
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        q: usize,
    },
    /// Profile points (x_q, y_q), q = 2..=l, of one or more kernels.
    Profile {
        /// A kernel JSON object or an array of them.
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, default_value_t = 2)]
        ell: usize,
    },
    /// Whether (x, y) lies in the region bounded by the envelope and the diagonal.
    RegionCheck {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, default_value_t = necklace_core::config::FLOAT_REL_TOL)]
        tolerance: f64,
    },
    /// Kernel of a disjoint union of q-ified base graphs with its predicted profile.
    Realize {
        /// Multiplicities r_2, ..., r_l.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        #[arg(long, default_value = "petersen")]
        base: String,
        /// Per-part masses summing to 1; defaults to equal mass per vertex.
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<String>>,
        /// Rooted graphs to glue along edges instead of cliques, one per part.
        #[arg(long)]
        rooted: Vec<PathBuf>,
    },
    /// The transformed polynomial whose nonnegativity on the region matches p.
    Pbar {
        #[command(flatten)]
        input: PolyInput,
        /// Profile length for --expr; defaults to 2.
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Compile p into a quantum graph of necklaces.
    Reduce {
        #[command(flatten)]
        input: PolyInput,
        /// Profile length l; defaults to one more than the number of variables, or 2 for --expr.
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Check the compiled quantum graph against substitution on sampled kernels.
    Verify {
        #[command(flatten)]
        input: PolyInput,
        /// Profile length l; defaults to one more than the number of variables, or 2 for --expr.
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = necklace_core::config::REDUCTION_REL_TOL)]
        tol: f64,
    },
    /// Search a grid for a point where p is negative.
    Scan {
        #[command(flatten)]
        input: PolyInput,
        /// Profile length l; defaults to one more than the number of variables, or 2 for --expr.
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, value_enum, default_value = "reciprocal")]
        grid: Grid,
        /// Grid bound for reciprocal and integer scans, resolution for region scans.
        #[arg(long, default_value_t = 100)]
        n_max: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
