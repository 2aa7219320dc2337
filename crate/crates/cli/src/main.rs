mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, DemoCommand, FamilyCommand, FockCommand, PiCommand};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_EMPTY: u8 = 2;
pub const EXIT_LEVEL: u8 = 3;
pub const EXIT_SAMPLING: u8 = 4;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ncw_core::Error),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("empty result: {0}")]
    Empty(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ncw_core::Error::Level { .. }) => EXIT_LEVEL,
            CliError::Core(ncw_core::Error::SamplingExhausted { .. }) => EXIT_SAMPLING,
            CliError::Core(ncw_core::Error::Precondition(_) | ncw_core::Error::Domain(_)) => {
                EXIT_USAGE
            }
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Empty(_) => EXIT_EMPTY,
            CliError::Core(_) | CliError::Io(..) | CliError::Check(_) => EXIT_FAILURE,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    match &cli.command {
        Command::Pi(PiCommand::Find(a)) => commands::pi_find(a),
        Command::Pi(PiCommand::Certify(a)) => commands::pi_certify(a),
        Command::Family(FamilyCommand::Build(a)) => commands::family_build(a),
        Command::Eval(a) => commands::eval(a),
        Command::Demo(DemoCommand::Unbounded(a)) => commands::demo_unbounded(a),
        Command::Demo(DemoCommand::Localbound(a)) => commands::demo_localbound(a),
        Command::Fock(FockCommand::Witness(a)) => commands::fock_witness(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ncw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
