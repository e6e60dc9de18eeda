//! `mollifier`: scans, identity checks and distance-integral reports as CSV.

mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, Format, Output};
use mollifier_core::SeriesKind;

#[derive(Parser, Debug)]
#[command(name = "mollifier", version, about = "Moebius and von Mangoldt series experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partial sums of one series at increasing N.
    Scan {
        /// U, V, Vstar, W, Tsum or S.
        #[arg(long)]
        kind: String,
        /// Point a/q, decimal, or sqrt2 / golden / pi_frac. Repeatable.
        #[arg(long, required = true)]
        alpha: Vec<String>,
        /// Comma-separated cut-offs, e.g. 1e3,1e4,1e5.
        #[arg(long)]
        schedule: String,
        /// Sieve size; defaults to the largest cut-off.
        #[arg(long)]
        sieve_limit: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Character identities for every modulus up to q-max.
    Identities {
        #[arg(long, default_value_t = 40)]
        q_max: u64,
        /// Replace every per-identity tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Perturb one residual to exercise the failure path.
        #[arg(long, hide = true)]
        inject_failure: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distance integral for each mollifier length.
    Criterion {
        /// Comma-separated mollifier lengths.
        #[arg(long, default_value = "2,3,5,8")]
        n: String,
        #[arg(long, default_value_t = 1000.0)]
        u_max: f64,
        /// Also integrate along the critical line (N <= 64).
        #[arg(long)]
        with_lhs: bool,
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        lhs_precision: f64,
        /// Cross-check against the pair expansion up to this N.
        #[arg(long, default_value_t = 16)]
        pairs_max_n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// One-sided estimates of T near rational points.
    Jump {
        /// Rational point a/q. Repeatable.
        #[arg(long, required = true)]
        point: Vec<String>,
        /// Comma-separated decreasing offsets.
        #[arg(long, default_value = "1e-2,1e-3,1e-4")]
        eps: String,
        #[arg(long, default_value = "1e6")]
        n_max: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Supremum of partial sums over a grid of points.
    Monitor {
        /// Vstar, V or Tsum (Tsum is reported divided by pi).
        #[arg(long)]
        kind: String,
        #[arg(long)]
        alpha: Vec<String>,
        /// Number of random points in [0, 1).
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Add every reduced a/q with q up to this.
        #[arg(long, default_value_t = 0)]
        rational_grid: u64,
        #[arg(long, default_value = "1e6")]
        n_max: String,
        /// Exit 1 if the supremum exceeds this.
        #[arg(long)]
        ceiling: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn output(o: &OutputArgs) -> Output {
    Output {
        path: o.output.clone(),
        format: o.format,
    }
}

fn alphas(texts: &[String]) -> Result<Vec<parse::AlphaSpec>, Failure> {
    texts
        .iter()
        .map(|t| parse::parse_alpha(t).map_err(Failure::from))
        .collect()
}

fn kind(text: &str) -> Result<SeriesKind, Failure> {
    text.parse::<SeriesKind>().map_err(Failure::from)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan {
            kind: k,
            alpha,
            schedule,
            sieve_limit,
            out,
        } => {
            let args = commands::ScanArgs {
                kind: kind(&k)?,
                alphas: alphas(&alpha)?,
                schedule: parse::parse_schedule(&schedule)?,
                sieve_limit: sieve_limit.as_deref().map(parse::parse_count).transpose()?,
            };
            commands::scan(args, &output(&out))
        }
        Command::Identities {
            q_max,
            tolerance,
            inject_failure,
            out,
        } => commands::identities(
            commands::IdentityArgs {
                q_max,
                tolerance,
                inject_failure,
            },
            &output(&out),
        ),
        Command::Criterion {
            n,
            u_max,
            with_lhs,
            t_max,
            lhs_precision,
            pairs_max_n,
            out,
        } => commands::criterion(
            commands::CriterionArgs {
                n_values: parse::parse_schedule(&n)?,
                u_max,
                with_lhs,
                t_max,
                lhs_precision,
                pairs_max_n,
            },
            &output(&out),
        ),
        Command::Jump {
            point,
            eps,
            n_max,
            out,
        } => commands::jump(
            commands::JumpArgs {
                points: alphas(&point)?,
                eps: parse::parse_eps_list(&eps)?,
                n_max: parse::parse_count(&n_max)?,
            },
            &output(&out),
        ),
        Command::Monitor {
            kind: k,
            alpha,
            random,
            seed,
            rational_grid,
            n_max,
            ceiling,
            out,
        } => commands::monitor(
            commands::MonitorArgs {
                kind: kind(&k)?,
                alphas: alphas(&alpha)?,
                random,
                seed,
                rational_q_max: rational_grid,
                n_max: parse::parse_count(&n_max)?,
                ceiling,
            },
            &output(&out),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
