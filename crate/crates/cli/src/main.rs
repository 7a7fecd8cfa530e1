//! `superell`: batch front end for division polynomials, sigma functions and heights.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "superell", version, about = "Division polynomials, sigma functions and canonical heights")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// curve file: {"N": 2, "f": ["a0", "a1", ..., "1"]}
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    /// working precision in bits
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// a single index n
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// upper bound for n
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    /// places: inf or a prime; repeat or separate by commas
    #[arg(long, global = true, value_delimiter = ',')]
    pub place: Vec<String>,
    /// write here instead of stdout (atomic rename)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// directory for cached division polynomials
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// rayon worker threads
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weierstrass gap sequence of y^N = f(x), deg f = m
    Gaps {
        #[arg(value_name = "N")]
        big_n: u32,
        m: usize,
    },
    /// sigma_{N,m} in the power sums, with a(u)
    SigmaPoly {
        #[arg(value_name = "N")]
        big_n: u32,
        m: usize,
    },
    /// psi_n of the curve (--n)
    Divpoly,
    /// psi_n(alpha)^2 against b0(n)^2 f'(alpha)^{2d*} at rational roots, n <= --n-max
    EvalBranch,
    /// Hankel determinants of Catalan numbers against the product formula
    Catalan {
        #[arg(long = "l-max", default_value_t = 12)]
        l_max: usize,
        #[arg(long = "m-max", default_value_t = 12)]
        m_max: usize,
    },
    /// division averages at x = beta against their limits
    Equidist {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// explicit list of n (default: g..=n-max)
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<usize>,
    },
    /// period matrices, tau and Legendre residuals
    Periods,
    /// local height lambda_v at a point
    Lambda {
        #[command(flatten)]
        at: PointArgs,
    },
    /// canonical height with per-place terms
    Height {
        #[command(flatten)]
        at: PointArgs,
        /// duplication steps of the elliptic oracle (0 disables it)
        #[arg(long = "oracle-steps", default_value_t = 8)]
        oracle_steps: usize,
    },
    /// the invariant chi and the quadrature checks behind it
    Chi {
        /// also run the quadrature report (sigma-based columns for g <= 2)
        #[arg(long)]
        report: bool,
        /// finer outer quadrature grid
        #[arg(long)]
        fine: bool,
    },
    /// the g = 1 division identity at x = beta
    Identity {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long = "n-list", value_delimiter = ',', default_value = "3,5,7")]
        n_list: Vec<usize>,
    },
}

#[derive(Args, Debug)]
pub struct PointArgs {
    /// "x,y" with rational coordinates, or "o"
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// x-coordinate only (y = sqrt f(x), either sheet)
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
}

fn fail(code: u8, value: serde_json::Value) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&value).expect("serializable"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail(2, json!({"error": "UsageError", "module": "cli", "message": e.to_string().trim()}));
        }
    };
    match commands::run(&cli.run, cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Usage(msg)) => fail(2, json!({"error": "UsageError", "module": "cli", "message": msg})),
        Err(commands::CliError::Compute(e)) => {
            fail(1, json!({"error": e.name(), "module": e.module(), "message": e.to_string()}))
        }
    }
}
