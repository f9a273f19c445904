use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use portsel::config;
use portsel::simulator::run_experiment;
use portsel::trace::{self, Fixture};
use portsel::validation::{self, Faults, CHECK_NAMES};
use portsel::{Error, ExperimentConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

/// Trial count of the full-scale pairwise-method experiments.
const FULL_TRIALS: usize = 100_000;

#[derive(Parser)]
#[command(name = "portsel", version, about = "Portfolio selection under evaluation uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment and write one row per (beta, method).
    Simulate(SimulateArgs),
    /// Run the built-in reference checks.
    Validate(ValidateArgs),
    /// Dump one small trial step by step.
    Trace(TraceArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file, or `defaults` for the built-in settings.
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    /// Override one key, applied after the file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Result file; stdout when absent. A `.config.json` sidecar with the
    /// resolved settings is written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Run 100,000 trials per beta (applied before any --set).
    #[arg(long)]
    full_budget: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Print the check names and exit.
    #[arg(long)]
    list: bool,
    /// Run only these checks. Repeatable.
    #[arg(long = "check", value_name = "NAME")]
    checks: Vec<String>,
    /// Break a component on purpose (`broken-cdf`).
    #[arg(long, hide = true, value_name = "FAULT")]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Trace a built-in fixture (worked-example, zero-noise) instead of a
    /// simulated trial.
    #[arg(long)]
    fixture: Option<String>,
    /// Position in beta_grid of the traced trial.
    #[arg(long, default_value_t = 0)]
    beta_index: usize,
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Validate(args) => validate(args),
        Command::Trace(args) => trace_cmd(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("portsel: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn resolve(args: &ConfigArgs, extra: &[(String, String)]) -> Result<ExperimentConfig, Error> {
    let mut overrides = extra.to_vec();
    for o in &args.overrides {
        overrides.push(config::parse_override(o)?);
    }
    config::load(args.config.as_deref(), &overrides)
}

fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("config.json")
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(with_path(p))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<u8, Error> {
    let budget = if args.full_budget {
        vec![("trials".to_string(), FULL_TRIALS.to_string())]
    } else {
        Vec::new()
    };
    let cfg = resolve(&args.config, &budget)?;
    // fail on an unwritable destination before spending the compute
    if let Some(p) = &args.output {
        fs::File::create(p).map_err(with_path(p))?;
        let sidecar = sidecar_path(p);
        fs::File::create(&sidecar).map_err(with_path(&sidecar))?;
    }
    let report = run_experiment(&cfg)?;
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()? + "\n",
    };
    write_out(args.output.as_deref(), &text)?;
    if let Some(p) = &args.output {
        let sidecar = serde_json::to_string_pretty(&config::to_json(&cfg))?;
        write_out(Some(&sidecar_path(p)), &(sidecar + "\n"))?;
    }
    Ok(0)
}

fn validate(args: ValidateArgs) -> Result<u8, Error> {
    if args.list {
        for name in CHECK_NAMES {
            println!("{name}");
        }
        return Ok(0);
    }
    let faults = match args.inject_fault.as_deref() {
        None => Faults::default(),
        Some("broken-cdf") => Faults { broken_cdf: true },
        Some(other) => return Err(Error::Usage(format!("unknown fault `{other}`"))),
    };
    let names: Vec<&str> = if args.checks.is_empty() {
        CHECK_NAMES.to_vec()
    } else {
        args.checks.iter().map(String::as_str).collect()
    };
    let mut failed = 0;
    for name in names {
        let check = validation::run_one(name, faults)
            .ok_or_else(|| Error::Usage(format!("unknown check `{name}`; see `validate --list`")))?;
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<26} {}", check.name, check.detail);
        failed += usize::from(!check.passed);
    }
    if failed > 0 {
        println!("{failed} check(s) failed");
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn trace_cmd(args: TraceArgs) -> Result<u8, Error> {
    let cfg = resolve(&args.config, &[])?;
    let text = match &args.fixture {
        Some(name) => trace::trace_fixture(Fixture::from_name(name)?, &cfg.methods, cfg.master_seed)?,
        None => {
            if args.beta_index >= cfg.beta_grid.len() {
                return Err(Error::Usage(format!(
                    "beta index {} out of range for a grid of {}",
                    args.beta_index,
                    cfg.beta_grid.len()
                )));
            }
            trace::trace_trial(&cfg, args.beta_index, args.trial)?
        }
    };
    write_out(args.output.as_deref(), &text)?;
    Ok(0)
}
