//! `bcover`: evaluate the maps and run the probes from the command line.
//!
//! Reports are JSON envelopes on stdout (or at `--out`). With
//! `--format=csv`, tabular commands write CSV to `--out` and the envelope to
//! stdout, or CSV alone to stdout when no `--out` is given. Errors go to
//! stderr as JSON. Exit codes: 0 success, 1 usage, 2 a threshold check
//! failed, 3 probe error.

mod commands;
mod params;
mod report;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

use commands::Command;
use params::{Format, Params};
use report::{emit, render_csv, usage, CliError, Envelope, Exit, TOOL};

#[derive(Debug, Parser)]
#[command(name = "bcover", version, about = "Maps and numerical probes for a branched cover of R^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

fn load(mut params: Params) -> Result<Params, CliError> {
    if let Some(path) = params.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let file: Value =
            serde_json::from_str(&text).map_err(|e| usage(format!("{} is not valid JSON: {e}", path.display())))?;
        params = params.over(file).map_err(CliError::Usage)?;
    }
    params.variant.get_or_insert_default();
    params.slope.get_or_insert(1.0);
    params.seed.get_or_insert(0);
    params.format.get_or_insert_default();
    Ok(params)
}

fn execute(command: Command, params: Params) -> Result<Exit, CliError> {
    let mut params = load(params)?;
    let format = params.format.unwrap_or_default();
    if format == Format::Csv && !command.has_table() {
        return Err(usage(format!("`{}` has no CSV form; use --format=json", command.name())));
    }
    let output = match params.workers {
        Some(0) => return Err(usage("--workers must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Probe(e.to_string()))?
            .install(|| command.run(&mut params))?,
        None => command.run(&mut params)?,
    };

    let timestamp = params
        .timestamp
        .unwrap_or(false)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let failed = output.verdicts.iter().any(|v| !v.pass);
    let envelope = Envelope {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        config: serde_json::to_value(&params).map_err(|e| CliError::Probe(e.to_string()))?,
        timestamp,
        payload: output.payload,
        verdicts: output.verdicts,
    };
    let mut json = serde_json::to_vec_pretty(&envelope).map_err(|e| CliError::Probe(e.to_string()))?;
    json.push(b'\n');

    match (format, output.table) {
        (Format::Csv, Some((header, rows))) => {
            let csv = render_csv(&header, &rows)?;
            match params.out.as_deref() {
                Some(path) => {
                    emit(&csv, Some(path))?;
                    emit(&json, None)?;
                }
                None => emit(&csv, None)?,
            }
        }
        _ => emit(&json, params.out.as_deref())?,
    }
    Ok(if failed { Exit::Threshold } else { Exit::Ok })
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    match execute(cli.command, cli.params) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => fail(&e),
    }
}
