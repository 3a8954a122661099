//! `taubound`: recompute constants, tables, and verification reports.

mod compute;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use taubound::search::tables::{compute_table, needs_long_running, published_table, TableData};
use taubound::search::{brute_check, verify_thm1, verify_thm2, verify_thm3, verify_thm4, verify_thm5};
use taubound::search::{Phase, Status, Thm5Options, VerificationReport};
use taubound::bounds::Inequality;
use taubound::{Error, PrecisionContext, PrimeTable};

/// Primes held in the working table.
const TABLE_PRIMES: usize = 1000;

const EXIT_CONFIRMED: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "taubound", version, about = "Explicit divisor-count bounds: constants, tables, and verifications")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Working precision in decimal digits (default: TAUBOUND_DIGITS or 60).
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at high precision.
    Compute {
        /// tau, omega, log, lambda, t, r, upsilon, r1, eta2, eta3, nicolas-robin, margin
        function: String,
        args: Vec<String>,
    },
    /// Run a theorem verification.
    Verify {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        theorem: u8,
        /// Stage number (theorem 4) or phase name (theorem 5).
        #[arg(long)]
        stage: Option<String>,
        /// Interval index (theorem 5).
        #[arg(long)]
        j: Option<u32>,
        /// Bucket index of the final phase (theorem 5).
        #[arg(long)]
        bucket: Option<u32>,
        #[arg(long)]
        long_running: bool,
        /// Append-only NDJSON log; finished boxes are skipped on rerun.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Recompute a table as CSV.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=10))]
        id: u8,
        /// CSV output (the default in text mode).
        #[arg(long)]
        csv: bool,
        /// Compare against a golden CSV file.
        #[arg(long)]
        check: Option<PathBuf>,
        /// Print the stored reference values instead of recomputing.
        #[arg(long, conflicts_with = "check")]
        reference: bool,
        #[arg(long)]
        long_running: bool,
    },
    /// Check an inequality for every n <= nmax.
    Brute {
        inequality: String,
        #[arg(long, default_value_t = 1_000_000)]
        nmax: u64,
        #[arg(long)]
        long_running: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CONFIRMED };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CardinalityGuard { .. }) => EXIT_PARTIAL,
        Some(Error::Parse(_) | Error::Domain { .. } | Error::Factorization(_) | Error::Precision(_)) => EXIT_USAGE,
        Some(Error::TableTooSmall { .. } | Error::TooLarge { .. }) => EXIT_USAGE,
        Some(_) => EXIT_FAILURE,
        None if e.downcast_ref::<Usage>().is_some() => EXIT_USAGE,
        None => EXIT_FAILURE,
    }
}

/// A command-line mistake caught after parsing.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn context(digits: Option<u32>) -> anyhow::Result<PrecisionContext> {
    Ok(match digits {
        Some(d) => PrecisionContext::new(d)?,
        None => PrecisionContext::from_env()?,
    })
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("worker pool")?;
    }
    let ctx = context(cli.digits)?;
    match &cli.command {
        Command::Compute { function, args } => {
            let table = PrimeTable::new(TABLE_PRIMES, &ctx);
            let out = compute::evaluate(&table, function, args)?;
            render::emit_value(&out, cli.json);
            Ok(EXIT_CONFIRMED)
        }
        Command::Verify { theorem, stage, j, bucket, long_running, checkpoint } => {
            if *theorem != 5 && (j.is_some() || bucket.is_some() || checkpoint.is_some()) {
                return Err(usage("--j, --bucket and --checkpoint apply to theorem 5 only"));
            }
            let table = PrimeTable::new(TABLE_PRIMES, &ctx);
            let rep = match theorem {
                1 => verify_thm1(&table)?,
                2 => verify_thm2(&table)?,
                3 => verify_thm3(&table)?,
                4 => {
                    let s = stage
                        .as_deref()
                        .map(|s| s.parse::<u8>().ok().filter(|s| (1..=4).contains(s)))
                        .map(|s| s.ok_or_else(|| usage("theorem 4 stages are 1 to 4")))
                        .transpose()?;
                    verify_thm4(&table, s, *long_running)?
                }
                _ => {
                    let phase = stage.as_deref().map(str::parse::<Phase>).transpose()?;
                    let opts = Thm5Options {
                        phase,
                        j: *j,
                        bucket: *bucket,
                        long_running: *long_running,
                        checkpoint: checkpoint.clone(),
                        ..Default::default()
                    };
                    verify_thm5(&table, &opts)?
                }
            };
            finish(&rep, cli.json)
        }
        Command::Table { id, csv: _, check, reference, long_running } => {
            if *reference {
                render::emit_table(&published_table(*id)?, cli.json);
                return Ok(EXIT_CONFIRMED);
            }
            if needs_long_running(*id) && !long_running {
                eprintln!("table {id} runs the interval pipeline; rerun with --long-running");
                return Ok(EXIT_PARTIAL);
            }
            let table = PrimeTable::new(TABLE_PRIMES, &ctx);
            let data = compute_table(&table, *id)?;
            match check {
                None => {
                    render::emit_table(&data, cli.json);
                    Ok(EXIT_CONFIRMED)
                }
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let golden = TableData::from_csv(*id, &text)?;
                    let diffs = data.compare(&golden);
                    render::emit_comparison(&data, &diffs, cli.json);
                    Ok(if diffs.is_empty() { EXIT_CONFIRMED } else { EXIT_COUNTEREXAMPLE })
                }
            }
        }
        Command::Brute { inequality, nmax, long_running } => {
            let ineq = Inequality::parse(inequality)?;
            let rep = brute_check(&ctx, ineq, *nmax, *long_running)?;
            finish(&rep, cli.json)
        }
    }
}

fn finish(rep: &VerificationReport, json: bool) -> anyhow::Result<u8> {
    render::emit_report(rep, json)?;
    Ok(match rep.status {
        Status::Confirmed => EXIT_CONFIRMED,
        Status::Counterexample => EXIT_COUNTEREXAMPLE,
        Status::Partial => EXIT_PARTIAL,
    })
}
