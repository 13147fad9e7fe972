//! `drg`: spectral data, Gibbs-state distributions and limit measures of
//! distance-regular graphs with classical parameters.

mod args;
mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{Map, Value};

use args::{Cli, Format};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

fn inputs(cli: &Cli) -> Map<String, Value> {
    let mut map = match serde_json::to_value(&cli.command).expect("arguments serialize") {
        // externally tagged: {"params": {...}}
        Value::Object(m) => match m.into_iter().next() {
            Some((_, Value::Object(inner))) => inner,
            _ => Map::new(),
        },
        _ => Map::new(),
    };
    if let Value::Object(g) = serde_json::to_value(&cli.global).expect("arguments serialize") {
        map.extend(g);
    }
    map
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::ValueValidation => EXIT_DATA,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match commands::run(&cli.command, &cli.global) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::exit_code(&e));
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let written = match cli.global.format {
        Format::Json => {
            output::write_json(&mut out, cli.command.name(), inputs(&cli), report.payload).map_err(|e| e.to_string())
        }
        Format::Csv => output::write_csv(&mut out, &report.table).map_err(|e| e.to_string()),
    };
    if let Err(e) = written.and_then(|_| out.flush().map_err(|e| e.to_string())) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(74);
    }
    ExitCode::from(report.exit)
}
