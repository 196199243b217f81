use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qonline::pneh::build_fingerprint_config;
use qonline_cli::fingerprint::{verify_config, verify_fingerprint};
use qonline_cli::{run_scenario, CliError, Mode, RunConfig, CATALOG};

/// Exit status when a scenario's predicate fails.
const EXIT_FAILED: u8 = 1;
/// Exit status for usage, parse, and validation errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "qonline", version, about = "Exact and sampled evaluation of quantum online algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered scenarios.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run a scenario and write its report.
    Run {
        scenario: String,
        /// `key=value`; repeatable.
        #[arg(long = "params", short = 'p')]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Trials per instance in mc mode.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Instance file replacing the built-in family.
        #[arg(long)]
        instances: Option<PathBuf>,
        /// Evaluate instances on one thread.
        #[arg(long)]
        sequential: bool,
        /// Leave out the generation timestamp.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Re-verify a fingerprint config file.
    VerifyFingerprint { config: PathBuf },
    /// Search for a verified fingerprint config and print it.
    BuildFingerprint {
        #[arg(long = "L")]
        l: u32,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 128)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::List { json } => {
            if json {
                let entries: Vec<_> = CATALOG
                    .iter()
                    .map(|s| serde_json::json!({"id": s.id, "summary": s.summary, "formula": s.formula}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&entries)?);
            } else {
                for s in CATALOG {
                    println!("{:<18} {}  [{}]", s.id, s.summary, s.formula);
                }
            }
            Ok(true)
        }
        Command::Run {
            scenario,
            params,
            mode,
            trials,
            seed,
            out,
            instances,
            sequential,
            no_timestamp,
        } => {
            let config = RunConfig {
                scenario,
                params,
                mode: match mode {
                    ModeArg::Exact => Mode::Exact,
                    ModeArg::Mc => Mode::MonteCarlo { trials },
                },
                seed,
                instances,
                parallel: !sequential,
            };
            let mut report = run_scenario(&config)?;
            if !no_timestamp {
                report.stamp();
            }
            emit(&report.to_json(), out.as_ref())?;
            for check in &report.checks {
                eprintln!(
                    "{} {}{}",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    if check.detail.is_empty() { String::new() } else { format!(" ({})", check.detail) }
                );
            }
            if let Some(agg) = &report.aggregate {
                eprintln!("strict ratio {}", agg.strict_ratio.rounded());
            }
            Ok(report.passed)
        }
        Command::VerifyFingerprint { config } => {
            let report = verify_fingerprint(&config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed)
        }
        Command::BuildFingerprint { l, epsilon, t, seed, out } => {
            let config = build_fingerprint_config(l, epsilon, t, seed)?;
            let verdict = verify_config(&config)?;
            eprintln!("max accept {} over {} differences", verdict.max_accept.rounded(), config.q() - 1);
            emit(&(serde_json::to_string_pretty(&config)? + "\n"), out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
