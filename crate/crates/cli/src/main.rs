use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{Format, RunConfig};
use error::CliError;

/// Thermal Casimir free energy, pressure and entropy between two plates.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// F, P and S with error estimates on every grid point.
    Compute(RunArgs),
    /// Exact thermal corrections against their low-temperature expansions.
    CompareAsymptotic(RunArgs),
    /// Entropy on a temperature ladder, extrapolated to T = 0.
    NernstCheck(RunArgs),
    /// Material definition utilities.
    Materials {
        #[command(subcommand)]
        action: MaterialsCommand,
    },
    /// Permittivity on the imaginary frequency axis.
    Eps {
        /// Preset name or material file.
        #[arg(long)]
        material: String,
        /// Imaginary frequency in rad/s.
        #[arg(long)]
        xi: f64,
        /// Temperature in kelvin, for temperature-dependent models.
        #[arg(long = "T")]
        temperature: Option<f64>,
    },
}

#[derive(Subcommand)]
enum MaterialsCommand {
    /// Parse and check a material file.
    Validate { file: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides the config, defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
    /// Matsubara truncation tolerance; y integrals use a tenth of it.
    #[arg(long)]
    tol: Option<f64>,
}

type Runner = fn(&RunConfig) -> Result<commands::Report, CliError>;

fn run_table(args: &RunArgs, runner: Runner) -> Result<(), CliError> {
    let mut cfg = config::load(&args.config)?;
    if let Some(tol) = args.tol {
        cfg.numerics.matsubara_rel_tol = tol;
        cfg.numerics.y_quad_rel_tol = tol / 10.0;
        cfg.numerics
            .validate()
            .map_err(|e| CliError::config("--tol", &e.to_string()))?;
    }
    let format = args.format.unwrap_or(cfg.format);
    let out = args.out.clone().or_else(|| cfg.output.clone());

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be >= 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let report = pool.install(|| runner(&cfg))?;

    emit(&report.table.render(format), out.as_deref())?;
    report.failure.map_or(Ok(()), Err)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(args) => run_table(&args, commands::compute),
        Command::CompareAsymptotic(args) => run_table(&args, commands::compare_asymptotic),
        Command::NernstCheck(args) => run_table(&args, commands::nernst),
        Command::Materials {
            action: MaterialsCommand::Validate { file },
        } => emit(&commands::validate_material(&file)?, None),
        Command::Eps {
            material,
            xi,
            temperature,
        } => emit(&commands::eps(&material, xi, temperature)?, None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
