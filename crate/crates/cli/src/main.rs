mod commands;
mod config;
mod output;
mod state;

use std::fmt;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use config::{merge_common, Cli, Command, FileConfig};

/// Bad flags, config or state text; exits with status 2.
#[derive(Debug)]
pub struct Usage(String);

impl Usage {
    pub fn new(msg: impl Into<String>) -> Self {
        Usage(msg.into())
    }
}

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use robin_box::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<E>() {
        Some(E::Config(_) | E::Parameter(_) | E::Domain { .. }) => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let common = merge_common(&cli.global, &file)?;
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(&common, a, &file),
        Command::Measure(a) => commands::measure(&common, a, &file),
        Command::Evolve(a) => commands::evolve_cmd(&common, a, &file),
        Command::Ehrenfest(a) => commands::ehrenfest(&common, a, &file),
        Command::Uncertainty(a) => commands::uncertainty(&common, a, &file),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
