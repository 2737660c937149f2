use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contreg::adversarial::{any_algorithm_trial, seen_task_trial, Method};
use contreg::experiment::with_threads;
use contreg::{
    aggregate, fit_rate, read_csv, run_experiment, verify_suite, write_csv, ExperimentConfig,
    HarnessError, Metric, ScheduleConfig, SchemeName, Suite,
};
use serde::Serialize;

/// Continual linear regression experiments.
#[derive(Debug, Parser)]
#[command(name = "contreg", version)]
struct Cli {
    /// Worker thread cap.
    #[arg(long, global = true, env = "CONTREG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write CSV rows.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (defaults to the config's `output`, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `base_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit the log-log rate of a results CSV.
    Fit {
        /// Results CSV written by `run`.
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::AvgLoss)]
        metric: MetricArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (or all of them).
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scheme against a lower-bound construction.
    Adversarial {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long, default_value = "regularized")]
        scheme: String,
        /// Schedule as a JSON object, e.g. '{"kind":"increasing-coefficient"}'.
        #[arg(long, default_value = r#"{"kind":"increasing-coefficient"}"#)]
        schedule: String,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 2000)]
        orderings: usize,
        #[arg(long, default_value_t = 1000)]
        probe_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    AvgLoss,
    SeenLoss,
    Degradation,
    DistToWstar,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::AvgLoss => Metric::AvgLoss,
            MetricArg::SeenLoss => Metric::SeenLoss,
            MetricArg::Degradation => Metric::Degradation,
            MetricArg::DistToWstar => Metric::DistToWstar,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    SeenTask,
    AnyAlgorithm,
}

/// Outcome of a subcommand that completed without a validation error.
enum Outcome {
    Ok,
    CheckFailed,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(path: &Path, e: io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), HarnessError> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| io_err(out.unwrap_or(Path::new("<stdout>")), e))
}

#[derive(Serialize)]
struct FitSummary {
    metric: Metric,
    aggregates: Vec<contreg::Aggregate>,
    fit: Option<contreg::RateFit>,
    fit_error: Option<String>,
}

fn run(cli: Cli) -> Result<Outcome, HarnessError> {
    let threads = cli.threads;
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            let base_dir = config.parent().map(Path::to_path_buf);
            let rows = with_threads(threads, || run_experiment(&cfg, base_dir.as_deref()))??;
            let target = out.or_else(|| cfg.output.clone());
            write_csv(&rows, sink(target.as_deref())?)?;
            Ok(Outcome::Ok)
        }
        Command::Fit { csv, metric, out } => {
            let file = File::open(&csv).map_err(|e| io_err(&csv, e))?;
            let rows = read_csv(BufReader::new(file))?;
            let metric = Metric::from(metric);
            let aggregates = aggregate(&rows, metric);
            let points: Vec<(f64, f64)> = aggregates.iter().map(|a| (a.k as f64, a.mean)).collect();
            let (fit, fit_error) = match fit_rate(&points) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let failed = fit.is_none();
            write_json(&FitSummary { metric, aggregates, fit, fit_error }, out.as_deref())?;
            Ok(if failed { Outcome::CheckFailed } else { Outcome::Ok })
        }
        Command::Verify { suite, seed, out } => {
            let names: Vec<String> = match suite {
                Some(s) => vec![s],
                None => Suite::ALL.iter().map(|s| s.name().to_owned()).collect(),
            };
            let reports = with_threads(threads, || {
                names.iter().map(|n| verify_suite(n, seed)).collect::<Result<Vec<_>, _>>()
            })??;
            let passed = reports.iter().all(|r| r.passed);
            if reports.len() == 1 {
                write_json(&reports[0], out.as_deref())?;
            } else {
                write_json(&reports, out.as_deref())?;
            }
            Ok(if passed { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Adversarial {
            scenario,
            scheme,
            schedule,
            k,
            orderings,
            probe_trials,
            seed,
            out,
        } => {
            let scheme: SchemeName = serde_json::from_value(serde_json::Value::String(scheme))?;
            let schedule: ScheduleConfig = serde_json::from_str(&schedule)?;
            if orderings == 0 {
                return Err(HarnessError::Config("orderings must be >= 1".into()));
            }
            let method = Method::new(scheme, schedule);
            let report = with_threads(threads, || match scenario {
                ScenarioArg::SeenTask => seen_task_trial(method, k, orderings, seed),
                ScenarioArg::AnyAlgorithm => any_algorithm_trial(method, k, orderings, probe_trials, seed),
            })??;
            write_json(&report, out.as_deref())?;
            Ok(if report.passed { Outcome::Ok } else { Outcome::CheckFailed })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
