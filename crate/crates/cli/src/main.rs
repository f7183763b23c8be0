mod cache;
mod commands;
mod config;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cache::{cache_key, cache_root, lookup, store, write_atomic};
use crate::config::{Cli, Command};
use crate::error::CliError;

fn load_config(path: &std::path::Path) -> Result<Command, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cmd = match (&cli.config, cli.command) {
        (Some(p), None) => load_config(p)?,
        (None, Some(c)) => c,
        (Some(_), Some(_)) => return Err(CliError::usage("give either --config or a subcommand, not both")),
        (None, None) => return Err(CliError::usage("no subcommand given; see --help")),
    };

    let cacheable = !matches!(cmd, Command::Verify(_)) && !cli.no_cache;
    let key = cache_key(&cmd)?;
    let root = cache_root(&cli.out);
    let (files, ok) = match cacheable.then(|| lookup(&root, &key)).flatten() {
        Some(files) => {
            eprintln!("{}: cached result {key}", cmd.name());
            (files, true)
        }
        None => {
            let (files, ok) = commands::execute(&cmd)?;
            if cacheable {
                store(&root, &key, &files)?;
            }
            (files, ok)
        }
    };
    for (name, bytes) in &files {
        write_atomic(&cli.out.join(name), bytes)?;
    }
    print!("{}", String::from_utf8_lossy(&files[0].1));
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                let err = CliError::usage(e.to_string().trim().to_string());
                eprintln!("{}", err.to_json());
                return ExitCode::from(err.exit_code);
            }
        },
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code)
        }
    }
}
