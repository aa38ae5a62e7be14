use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nestrix_cli::commands::{self, CompareConfig};
use nestrix_cli::error::{CliError, CliResult};
use nestrix_cli::report::{Format, Report};
use nestrix_cli::scenario::{load_json, resolve_caps, Replay, CAP_OVERRIDE_VAR};
use nestrix_cli::suites::{self, SuiteConfig};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "nestrix",
    version,
    about = "Nestings, small chains and finite-space sheaf cohomology"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compare the rendered report with a golden file.
    #[arg(long, global = true)]
    check: Option<PathBuf>,
    /// With --check, overwrite the golden file instead of comparing.
    #[arg(long, global = true, requires = "check")]
    bless: bool,
    /// Largest simplex dimension handled.
    #[arg(long, global = true)]
    cap_k: Option<usize>,
    /// Largest subdivision depth tried.
    #[arg(long, global = true)]
    cap_n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce the five-point surjectivity failure.
    FivePoint,
    /// Compare sheaf and order complex cohomology of a finite space.
    Compare {
        /// Space description file.
        #[arg(long, conflicts_with = "random")]
        space: Option<PathBuf>,
        /// Generate a random space with this many points.
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Relation density for random spaces.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// z, q or z/m.
        #[arg(long, default_value = "z")]
        coefficients: String,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Run a seeded property suite.
    Props {
        /// One of nesting, subdivision, covering, calculus, retraction.
        suite: String,
        #[arg(long)]
        seed: u64,
        /// Number of random cases.
        #[arg(long, default_value_t = 50)]
        budget: usize,
        /// Re-check a single sequence against a nesting instead.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Build and audit the retraction of a simplex onto small chains.
    Homotopy {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Check the homotopy calculus and the small-chains equivalence.
    Calculus {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn build(command: Command, global: &Global) -> CliResult<Report> {
    let caps = || {
        resolve_caps(
            std::env::var(CAP_OVERRIDE_VAR).ok().as_deref(),
            global.cap_k,
            global.cap_n,
        )
    };
    match command {
        Command::FivePoint => commands::five_point(),
        Command::Compare {
            space,
            random,
            seed,
            density,
            coefficients,
            max_degree,
        } => commands::compare(&CompareConfig {
            space,
            random,
            seed,
            density,
            coefficients,
            max_degree,
        }),
        Command::Props {
            suite,
            seed,
            budget,
            replay,
        } => {
            let cfg = SuiteConfig {
                seed,
                budget,
                caps: caps()?,
            };
            match replay {
                Some(path) => {
                    let r: Replay = load_json(&path)?;
                    let mut report =
                        Report::new("props", &json!({"suite": suite, "seed": seed, "replay": r}));
                    suites::replay(&r, seed, &mut report)?;
                    Ok(report)
                }
                None => {
                    let mut report = Report::new("props", &json!({"suite": suite, "config": cfg}));
                    suites::run_suite(&suite, &cfg, &mut report)?;
                    Ok(report)
                }
            }
        }
        Command::Homotopy { scenario } => {
            commands::homotopy(&commands::load_scenario(&scenario)?, &caps()?)
        }
        Command::Calculus { scenario } => {
            commands::calculus(&commands::load_scenario(&scenario)?, &caps()?)
        }
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Returns whether the golden comparison (if any) succeeded.
fn emit(text: &str, global: &Global) -> CliResult<bool> {
    match &global.out {
        Some(path) => write(path, text)?,
        None => print!("{text}"),
    }
    let Some(golden) = &global.check else {
        return Ok(true);
    };
    if global.bless {
        write(golden, text)?;
        return Ok(true);
    }
    let expected = std::fs::read_to_string(golden).map_err(|source| CliError::Io {
        path: golden.clone(),
        source,
    })?;
    if expected == text {
        Ok(true)
    } else {
        let line = expected
            .lines()
            .zip(text.lines())
            .position(|(a, b)| a != b)
            .map_or_else(
                || expected.lines().count().min(text.lines().count()) + 1,
                |i| i + 1,
            );
        eprintln!("output differs from {} at line {line}", golden.display());
        Ok(false)
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let report = build(cli.command, &cli.global)?;
    let text = report.render(cli.global.format)?;
    let golden_ok = emit(&text, &cli.global)?;
    Ok(report.passed() && golden_ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
