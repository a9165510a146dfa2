//! `cospec`: Ising spectral invariants of graphs from the command line.
//!
//! Each subcommand writes its machine-readable result to `--out` (atomically)
//! or to stdout, and a one-line summary to stderr. Exit status is 0 on
//! success, 1 when a computation is refused (size budget, convergence,
//! overflow) and 2 on usage or input errors.

mod commands;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::{CouplingArgs, GraphArgs, QuantumArgs};

pub const THREADS_ENV: &str = "COSPECTRAL_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "cospec",
    version,
    about = "Classical and transverse-field Ising spectral invariants of graphs",
    after_help = "Couplings are in energy units, inverse temperatures in inverse energy units.\n\
                  Set COSPECTRAL_THREADS to cap the worker thread count (default: all cores)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    /// Spectrum of H (energy multiset).
    CoIsing,
    /// Joint (e, m) polynomial.
    Longitudinal,
    /// Polynomial over --observables.
    Multivariate,
    /// Lowest and highest H_T eigenvalue at --J --h --Delta.
    QuantumExtremal,
    /// Full dense H_T spectrum (n <= 13).
    QuantumFull,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Characteristic polynomial, energy marginal and signature polynomial of one graph.
    Invariants {
        #[command(flatten)]
        graphs: GraphArgs,
        /// Observables, comma separated: e, m, omega1..omega4.
        #[arg(long, value_name = "LIST", default_value = "e,m")]
        observables: String,
        /// Output file (JSON). No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Compare two graphs on every classical invariant level.
    Compare {
        #[command(flatten)]
        graphs: GraphArgs,
        /// Observables, comma separated: e, m, omega1..omega4.
        #[arg(long, value_name = "LIST", default_value = "e,m")]
        observables: String,
        /// Also compare transverse-field spectra at --J --h --Delta.
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        quantum: QuantumArgs,
        /// Eigenvalue difference treated as distinguishing (energy units).
        #[arg(long, value_name = "ENERGY", default_value_t = 1e-8)]
        tol: f64,
        /// Output file (JSON). No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Spectrum of the transverse-field (or, with --s, annealing) Hamiltonian.
    Qspectrum {
        #[command(flatten)]
        graphs: GraphArgs,
        #[command(flatten)]
        quantum: QuantumArgs,
        /// Annealing schedule value in [0, 1] (dimensionless). No default: transverse-field H_T.
        #[arg(long, value_name = "FRACTION")]
        s: Option<f64>,
        /// Lowest k eigenvalues by the Krylov solver. No default: full dense spectrum (n <= 13).
        #[arg(long, value_name = "COUNT")]
        k: Option<usize>,
        /// Krylov residual tolerance (energy units).
        #[arg(long, value_name = "ENERGY", default_value_t = 1e-10)]
        tol: f64,
        /// Krylov start-vector seed.
        #[arg(long, value_name = "INTEGER", default_value_t = 0x5eed)]
        seed: u64,
        /// Output format.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output file. No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Lowest k eigenvalues of the annealing Hamiltonian over a uniform s grid.
    Sweep {
        #[command(flatten)]
        graphs: GraphArgs,
        #[command(flatten)]
        quantum: QuantumArgs,
        /// Eigenvalues per grid point (count).
        #[arg(long, value_name = "COUNT", default_value_t = 20)]
        k: usize,
        /// Number of s points from 0 to 1 inclusive (count).
        #[arg(long, value_name = "POINTS", default_value_t = 101)]
        grid: usize,
        /// Krylov residual tolerance (energy units).
        #[arg(long, value_name = "ENERGY", default_value_t = 1e-10)]
        tol: f64,
        /// Krylov start-vector seed.
        #[arg(long, value_name = "INTEGER", default_value_t = 0x5eed)]
        seed: u64,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file. No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Metropolis signature histogram, or the exact Gibbs distribution with --exact.
    Sample {
        #[command(flatten)]
        graphs: GraphArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Inverse temperature beta (1/energy units).
        #[arg(long, value_name = "RATIONAL", default_value = "1")]
        beta: cospec::Coupling,
        /// Observables, comma separated: e, m, omega1..omega4.
        #[arg(long, value_name = "LIST", default_value = "e,m")]
        observables: String,
        /// Recorded sweeps per chain (count; one sweep = n proposals).
        #[arg(long, value_name = "COUNT", default_value_t = 100_000)]
        sweeps: usize,
        /// Independent chains (count).
        #[arg(long, value_name = "COUNT", default_value_t = 10)]
        chains: usize,
        /// Unrecorded sweeps per chain (count). No default: sweeps/10.
        #[arg(long, value_name = "COUNT")]
        burn_in: Option<usize>,
        /// Bootstrap resamples for per-bin intervals (count; 0 disables).
        #[arg(long, value_name = "COUNT", default_value_t = 0)]
        bootstrap: usize,
        /// Random seed. No default: required unless --exact.
        #[arg(long, value_name = "INTEGER", required_unless_present = "exact")]
        seed: Option<u64>,
        /// Print the exact Boltzmann distribution instead of sampling.
        #[arg(long)]
        exact: bool,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file. No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Fit the Gibbs inverse temperature to a histogram CSV written by `sample`.
    Fit {
        #[command(flatten)]
        graphs: GraphArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Histogram CSV; observables are read from its header. No default.
        #[arg(long, value_name = "PATH")]
        target: PathBuf,
        /// Beta grid as START:STOP:STEP or a comma list (1/energy units).
        #[arg(long = "beta-grid", value_name = "GRID", default_value = "0:3:0.01")]
        beta_grid: String,
        /// Output file (JSON). No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Search a graph family for non-isomorphic pairs sharing an invariant.
    Scan {
        /// graph6 file, one record per line; `-` reads stdin. No default.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["trees", "all_graphs"])]
        input: Option<PathBuf>,
        /// Built-in family: all trees on this many vertices (2..=10). No default.
        #[arg(long, value_name = "VERTICES", conflicts_with = "all_graphs")]
        trees: Option<usize>,
        /// Built-in family: all graphs on this many vertices (1..=6). No default.
        #[arg(long = "graphs", value_name = "VERTICES")]
        all_graphs: Option<usize>,
        /// Invariant compared across the family.
        #[arg(long, value_enum, default_value = "co-ising")]
        level: LevelArg,
        /// Observables for the multivariate level, comma separated.
        #[arg(long, value_name = "LIST", default_value = "e,m,omega2")]
        observables: String,
        #[command(flatten)]
        quantum: QuantumArgs,
        /// Eigenvalue agreement threshold for quantum levels (energy units).
        #[arg(long, value_name = "ENERGY", default_value_t = 1e-8)]
        tol: f64,
        /// Output file (JSON). No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// List the built-in graphs.
    Fixtures {
        /// Output file (JSON). No default: stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// A failed run: message plus exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 2, msg: format!("{}: {e}", path.display()) }
    }
}

impl From<cospec::Error> for Failure {
    fn from(e: cospec::Error) -> Self {
        Failure { code: if e.is_refusal() { 1 } else { 2 }, msg: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
