//! `lnd-forge`: build, verify and explore kernel elements of the
//! Roberts–Kuroda derivation. All results are JSON on stdout (or `--out`);
//! progress goes to stderr with `--verbose`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lnd-forge", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Progress on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleTarget {
    /// Kernel of δ on polynomials of bounded degree.
    Kernel,
    /// Kernel of δ_M on the differential module, coefficients of bounded degree.
    M0,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the kernel element x1*y_(n+1)^ell + ... with its elimination trace.
    Invariant {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u32,
    },
    /// Recheck a certificate written by `invariant`.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decompose a kernel polynomial of k[x2..xn, y2..yn] into generator products.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Degree-truncated kernel basis of δ or δ_M.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        deg: u32,
        #[arg(long, value_enum, default_value = "kernel")]
        target: OracleTarget,
        /// Comma-separated variables to allow, e.g. `x2,x3,y2,y3` (kernel only).
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Differential of the constructed kernel element and its M0 membership.
    M0 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u32,
    },
    /// Apply δ to a polynomial file, or δ_M to a module-element file.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    commands::execute(&cli)
}
