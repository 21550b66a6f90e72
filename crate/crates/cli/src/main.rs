mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clr_lab::error::Error;
use clr_lab::report::Format;

use config::{CliConfig, FileConfig, Overrides};

/// Constants of semiclassical bound-state estimates: tables, optimizer,
/// kinetic bounds and self-checks.
#[derive(Debug, Parser)]
#[command(name = "clr-lab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format: md, csv or json.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Seed for the optimizer's restart points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Significant digits in md and csv output (default 6).
    #[arg(long, global = true)]
    digits: Option<usize>,
    /// Append the formula or table source of every column.
    #[arg(long, global = true)]
    provenance: bool,
    /// JSON config file.
    #[arg(long, global = true, env = "CLR_LAB_CONFIG")]
    config: Option<PathBuf>,
    /// Relative tolerance of every quadrature.
    #[arg(long, global = true)]
    quad_rel_tol: Option<f64>,
    /// Optimizer restarts per cell.
    #[arg(long, global = true)]
    restarts: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Constant report for a range of dimensions.
    Table {
        /// Dimensions, e.g. `3..9`, `5` or `3,5,7`.
        #[arg(long)]
        dims: String,
        /// Kinetic order α in |P|^{2α}.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Largest n entering the operator-valued minimum.
        #[arg(long)]
        n_cap: Option<u32>,
    },
    /// Optimize the Gamma trial pair at one γ.
    Optimize {
        #[arg(long)]
        gamma: f64,
        /// Cells `p,q`; repeat the flag for several. Default: all of {1..4}².
        #[arg(long = "cells", value_parser = parse_cell)]
        cells: Vec<(u32, u32)>,
    },
    /// Bounds on M_γ.
    Mgamma {
        #[arg(long)]
        gamma: f64,
    },
    /// C_γ for a given value of M_γ (default: the best upper bound).
    Constant {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        m: Option<f64>,
    },
    /// Weak-trace-ideal constants.
    Cwikel {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        /// Tail functional R_p(m); default is the simple choice.
        #[arg(long)]
        tail: Option<f64>,
    },
    /// Bound on the number of bound states of T(P) + V.
    Bound {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Evaluate at this λ instead of optimizing.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run the invariant suites.
    Check {
        /// Restrict to these suites.
        #[arg(long)]
        only: Vec<String>,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cell(s: &str) -> Result<(u32, u32), String> {
    let (p, q) = s.split_once(',').ok_or_else(|| format!("cell {s:?} is not of the form p,q"))?;
    let p = p.trim().parse().map_err(|_| format!("bad p in {s:?}"))?;
    let q = q.trim().parse().map_err(|_| format!("bad q in {s:?}"))?;
    Ok((p, q))
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::Schema { .. } | Error::UnsupportedOrder { .. } => 2,
            Error::Convergence { .. } | Error::Bracket(_) | Error::Divergence(_) | Error::Resolution(_) => 3,
        };
        Self { code, msg: e.to_string() }
    }
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = CliConfig::resolve(
        file,
        Overrides {
            format: g.format,
            seed: g.seed,
            digits: g.digits,
            provenance: g.provenance,
            quad_rel_tol: g.quad_rel_tol,
            restarts: g.restarts,
        },
    )?;
    match cli.command {
        Command::Table { dims, alpha, n_cap } => commands::table(&dims, alpha, n_cap, &cfg),
        Command::Optimize { gamma, cells } => commands::optimize(gamma, &cells, &cfg),
        Command::Mgamma { gamma } => commands::mgamma(gamma, &cfg),
        Command::Constant { gamma, m } => commands::constant(gamma, m, &cfg),
        Command::Cwikel { p, mu, tail } => commands::cwikel(p, mu, tail, &cfg),
        Command::Bound { symbol, profile, lambda } => commands::bound(&symbol, &profile, lambda, &cfg),
        Command::Check { only } => commands::check(&only, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
