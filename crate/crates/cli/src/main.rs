//! `heliomech`: batch front end for the helium optomechanics library.
//!
//! Exit status: 0 success, 1 invalid configuration or I/O failure,
//! 2 numerical failure, 3 a reproduction check failed.

mod commands;
mod config;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::output::{flatten, round_tree, to_json, write_atomic};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<heliomech_core::Error> for CliError {
    fn from(e: heliomech_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "heliomech",
    version,
    about = "Optomechanical couplings and rates in superfluid helium"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration; presets are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file, written atomically; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Permittivity and electrostrictive coefficients of the fluid.
    Material(Common),
    /// Linear and two-phonon coupling elements of the configured modes.
    Coupling(Common),
    /// Classified interaction-picture term list.
    Hamiltonian(Common),
    /// One- and two-phonon rates and their ratio.
    Rates(Common),
    /// Rates over a detuning or photon-number grid (CSV by default).
    Sweep(Common),
    /// Exact-evolution checks of the rate formulas.
    Oracle(Common),
    /// Table of published numbers against computed ones.
    Reproduce(Common),
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (common, name) = match &cli.command {
        Command::Material(c) => (c, "material"),
        Command::Coupling(c) => (c, "coupling"),
        Command::Hamiltonian(c) => (c, "hamiltonian"),
        Command::Rates(c) => (c, "rates"),
        Command::Sweep(c) => (c, "sweep"),
        Command::Oracle(c) => (c, "oracle"),
        Command::Reproduce(c) => (c, "reproduce"),
    };
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    let digits = cfg.output.precision;
    let out = common.out.as_ref().or(cfg.output.path.as_ref());
    let explicit_format = common.format.or(cfg.output.format);

    if name == "reproduce" {
        let rows = reproduce::rows(&cfg)?;
        let table = reproduce::table(&rows, digits);
        let pass = rows.iter().all(reproduce::Row::pass);
        match (out, explicit_format) {
            (None, None) => emit(&reproduce::text(&table), None)?,
            (target, format) => {
                if target.is_some() {
                    print!("{}", reproduce::text(&table));
                }
                let body = match format.unwrap_or(Format::Json) {
                    Format::Json => {
                        let mut v = reproduce::json(&rows);
                        round_tree(&mut v, digits);
                        to_json(&v)?
                    }
                    Format::Csv => table.to_csv()?,
                };
                emit(&body, target)?;
            }
        }
        return Ok(if pass { 0 } else { 3 });
    }

    let rendered = match name {
        "material" => commands::material(&cfg)?,
        "coupling" => commands::coupling(&cfg)?,
        "hamiltonian" => commands::hamiltonian(&cfg)?,
        "rates" => commands::rates(&cfg)?,
        "sweep" => commands::sweep(&cfg)?,
        _ => commands::oracle(&cfg)?,
    };
    let default_format = if name == "sweep" { Format::Csv } else { Format::Json };
    let body = match explicit_format.unwrap_or(default_format) {
        Format::Json => {
            let mut v = rendered.json;
            v["schema"] = config::SCHEMA_VERSION.into();
            round_tree(&mut v, digits);
            to_json(&v)?
        }
        Format::Csv => match rendered.table {
            Some(t) => t.to_csv()?,
            None => {
                let mut v = rendered.json;
                round_tree(&mut v, digits);
                flatten(&v).to_csv()?
            }
        },
    };
    emit(&body, out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("heliomech: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
