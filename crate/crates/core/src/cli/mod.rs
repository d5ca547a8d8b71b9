//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a requested verdict or verification failed,
//! 2 input error, 3 resource cap exceeded.

mod audit;
mod config;
mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use audit::{parse_definition, run_audit, DefinitionRequest};
pub use config::{
    load_config, run_bench, run_bounds, BenchConfig, BenchReport, BoundsConfig, BoundsReport,
    EvaluatorRequest, EvaluatorRow,
};
pub use selftest::{run_selftest, SelftestCheck, SelftestReport};

use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dp-minimax",
    version,
    about = "Privacy audits, lower-bound checks and risk benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit a channel JSON file against one or more privacy definitions.
    Audit {
        channel: PathBuf,
        /// `name=params`, e.g. `dp=0.5`, `approx_dp=1,1e-6`, `chtp=0.4,0.01`,
        /// `tv=0.1`, `kl=0.2`, `chi_square=0.3`, `hellinger=0.1`,
        /// `testing_bound=1,0.01`, `smooth_dp=0.5`.
        #[arg(long = "def", required = true)]
        definitions: Vec<String>,
        /// Metric JSON `{"rho": [[..]], "r_bound": ..}` for smooth_dp
        /// (defaults to the discrete metric).
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Verdict file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lower the dataset enumeration cap.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run risk sweeps and the rate-table report from a bench config.
    Bench {
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Output directory for `risk.csv` and `report.json`.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the randomized bound verifications and the evaluator table.
    Bounds {
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Resource(_) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(ok) => {
            if ok {
                EXIT_OK
            } else {
                EXIT_VERDICT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::Spec("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Spec(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Audit {
            channel,
            definitions,
            metric,
            out,
            cap,
        } => {
            let text = std::fs::read_to_string(&channel)?;
            let requests = definitions
                .iter()
                .map(|d| parse_definition(d))
                .collect::<Result<Vec<_>>>()?;
            let metric = match metric {
                Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            let verdicts = run_audit(&text, &requests, metric.as_ref(), cap)?;
            write_output(out.as_deref(), &serde_json::to_string_pretty(&verdicts)?)?;
            for v in &verdicts {
                eprintln!(
                    "{:?}: {} (tight {}, requested {})",
                    v.definition,
                    if v.holds { "holds" } else { "fails" },
                    v.tight_param,
                    v.requested
                );
            }
            Ok(verdicts.iter().all(|v| v.holds))
        }
        Command::Bench {
            config,
            seed,
            out,
            jobs,
        } => {
            let cfg: BenchConfig = load_config(&std::fs::read_to_string(config)?, "bench")?;
            cfg.validate()?;
            let (csv, report) = with_jobs(jobs, || run_bench(&cfg, seed))?;
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("risk.csv"), csv)?;
            std::fs::write(
                out.join("report.json"),
                serde_json::to_string_pretty(&report)?,
            )?;
            if let Some(t) = &report.table1 {
                for c in &t.checks {
                    eprintln!(
                        "{} {}: measured {:.4} in [{:.4}, {:.4}] -> {}",
                        c.row,
                        c.quantity,
                        c.measured,
                        c.lower,
                        c.upper,
                        if c.agrees { "agrees" } else { "disagrees" }
                    );
                }
            }
            Ok(true)
        }
        Command::Bounds {
            config,
            seed,
            out,
            jobs,
        } => {
            let cfg: BoundsConfig = load_config(&std::fs::read_to_string(config)?, "bounds")?;
            cfg.validate()?;
            let report = with_jobs(jobs, || run_bounds(&cfg, seed))?;
            write_output(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            for r in report.verifications() {
                eprintln!(
                    "{}: {} instances, {} violations",
                    r.check,
                    r.instances,
                    r.violations.len()
                );
            }
            Ok(report.passed())
        }
        Command::Selftest {
            seed,
            jobs,
            inject_fault,
        } => {
            let report = with_jobs(jobs, || Ok(run_selftest(seed, inject_fault)))?;
            for c in &report.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            println!(
                "selftest: {} checks, {} failed",
                report.checks.len(),
                failed
            );
            Ok(failed == 0)
        }
    }
}
