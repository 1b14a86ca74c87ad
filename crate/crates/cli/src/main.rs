mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use contact_thermo::io::OutputFormat;
use contact_thermo::ThermoError;

use crate::commands::{ChordArgs, GibbsArgs, IsotopyArgs, ReduceArgs, RelaxArgs, StirlingArgs, VerifyArgs};
use crate::config::ConfigFile;

const DEFAULT_OUT_DIR: &str = "thermo_out";

#[derive(Debug, Parser)]
#[command(
    name = "contact-thermo",
    version,
    about = "Equilibria, Reeb chords and admissible processes in contact thermodynamics",
    arg_required_else_help = true
)]
struct Cli {
    /// JSON file whose keys override the command-line flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, env = "THERMO_OUT_DIR", value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Encoding of tabular outputs: csv or json
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gibbs state of a finite system, or samples of a model Legendrian
    Gibbs(GibbsArgs),
    /// Reeb chord between two model Legendrians, with figure data
    Chord(ChordArgs),
    /// Jump followed by Fokker-Planck relaxation of a finite system
    Relax(RelaxArgs),
    /// Slow isotopy through a schedule of model Legendrians
    Isotopy(IsotopyArgs),
    /// Ideal-gas Stirling cycle
    Stirling(StirlingArgs),
    /// Reduce an extended path and certify the reduced form
    Reduce(ReduceArgs),
    /// Run the invariant suite
    Verify(VerifyArgs),
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Thermo(ThermoError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Thermo(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{msg}"),
            CliError::Thermo(e) => write!(f, "{e}"),
        }
    }
}

impl From<ThermoError> for CliError {
    fn from(e: ThermoError) -> Self {
        CliError::Thermo(e)
    }
}

/// Resolved global settings.
pub struct Context {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

fn run(argv: Vec<OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = Context {
        out_dir: cfg
            .global
            .out_dir
            .clone()
            .or(cli.out_dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        format: cfg.global.format.or(cli.format).unwrap_or_default(),
    };
    let outcome = match cli.command {
        Command::Gibbs(a) => commands::gibbs(cfg.apply(&a)?, &ctx)?,
        Command::Chord(a) => commands::chord(cfg.apply(&a)?, &ctx)?,
        Command::Relax(a) => commands::relax(cfg.apply(&a)?, &ctx)?,
        Command::Isotopy(a) => commands::isotopy(cfg.apply(&a)?, &ctx)?,
        Command::Stirling(a) => commands::stirling(cfg.apply(&a)?, &ctx)?,
        Command::Reduce(a) => commands::reduce(cfg.apply(&a)?, &ctx)?,
        Command::Verify(a) => commands::verify(cfg.apply(&a)?, &ctx)?,
    };
    let files = outcome.files.into_format(ctx.format)?;
    files
        .commit(&ctx.out_dir)
        .map_err(|e| CliError::Invalid(format!("writing {}: {e}", ctx.out_dir.display())))?;
    println!("{}; wrote {} files to {}", outcome.summary, files.len(), ctx.out_dir.display());
    Ok(outcome.status)
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}
