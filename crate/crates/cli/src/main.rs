//! `incidence`: exact incidence statistics for `A×A` over a prime field.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use incidence_core::harness::{self, ExperimentConfig};
use incidence_core::{PrimeModulus, SetDescriptor, Strategy};

#[derive(Parser)]
#[command(name = "incidence", version, about = "Exact collinear triple and quadruple statistics for A×A over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Histogram, moments and bound checks for one set.
    Moments(Common),
    /// As `moments`, plus strategy equivalence and brute-force oracles.
    Verify(Common),
    /// Monte Carlo trials over one or more primes.
    Sweep(Common),
    /// Product-representation support census.
    Support {
        #[command(flatten)]
        common: Common,
        /// Examine this many random (a1, a3) pairs instead of all n².
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Naive,
    SlopeDirect,
    SlopeFast,
}

#[derive(Args)]
struct Common {
    #[arg(short = 'p', long, conflicts_with = "primes")]
    prime: Option<u64>,
    /// Comma-separated list of primes.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Set descriptor, e.g. `list:0,1`, `bernoulli:0.3`, `uniform:8:7`, `paper-interval`.
    #[arg(long)]
    set: String,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Worker threads; defaults to all available cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Include wall-clock timings (output is then no longer reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let raw: Vec<u64> = match self.prime {
            Some(p) => vec![p],
            None => self.primes.clone(),
        };
        let primes = raw
            .into_iter()
            .map(|p| PrimeModulus::new(p).with_context(|| format!("invalid prime {p}")))
            .collect::<Result<Vec<_>>>()?;
        let set: SetDescriptor = self.set.parse().context("invalid --set")?;
        let mut cfg = ExperimentConfig::new(primes, set);
        cfg.strategy = match self.strategy {
            StrategyArg::Auto => None,
            StrategyArg::Naive => Some(Strategy::Naive),
            StrategyArg::SlopeDirect => Some(Strategy::SlopeDirect),
            StrategyArg::SlopeFast => Some(Strategy::SlopeFast),
        };
        cfg.seed = self.seed;
        cfg.trials = self.trials;
        cfg.timings = self.timings;
        cfg.inject_fault = self.inject_fault;
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run(cli: Cli) -> Result<bool> {
    let common = match &cli.command {
        Command::Moments(c) | Command::Verify(c) | Command::Sweep(c) => c,
        Command::Support { common, .. } => common,
    };
    let cfg = common.config()?;
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure thread pool")?;
    }

    match &cli.command {
        Command::Moments(_) | Command::Verify(_) => {
            let report = match cli.command {
                Command::Moments(_) => harness::run_moments(&cfg)?,
                _ => harness::run_verify(&cfg)?,
            };
            let mut out = common.output()?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => out.write_all(report.to_json()?.as_bytes())?,
                Format::Csv => report.histogram.write_csv(&mut out)?,
            }
            out.flush()?;
            Ok(report.all_exact_checks_pass)
        }
        Command::Sweep(_) => {
            let result = harness::run_sweep(&cfg)?;
            let mut out = common.output()?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => result.write_csv(&mut out)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &result)?;
                    writeln!(out)?;
                }
            }
            out.flush()?;
            Ok(result.summary.all_exact_checks_pass)
        }
        Command::Support { sample, .. } => {
            let summary = harness::run_support(&cfg, *sample)?;
            let mut out = common.output()?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &summary)?;
                    writeln!(out)?;
                }
                Format::Csv => summary.write_csv(&mut out)?,
            }
            out.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more exact checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

