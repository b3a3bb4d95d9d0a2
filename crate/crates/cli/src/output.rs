use crate::commands::{CheckLine, Outcome};
use crate::{Command, Failure, Format, RunConfig};
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::time::Duration;

/// Everything but `elapsed_ms` is a function of the config.
#[derive(Serialize)]
struct Envelope<'a> {
    command: Command,
    config: &'a RunConfig,
    version: &'static str,
    convention: &'static str,
    payload: &'a Value,
    checks: &'a [CheckLine],
    passed: bool,
    elapsed_ms: u128,
}

pub fn emit(
    command: Command,
    cfg: &RunConfig,
    outcome: &Outcome,
    elapsed: Duration,
) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    let bytes = match cfg.format {
        Format::Json => {
            let env = Envelope {
                command,
                config: cfg,
                version: building_lab::VERSION,
                convention: building_lab::CONVENTION,
                payload: &outcome.payload,
                checks: &outcome.checks,
                passed: outcome.checks.iter().all(|c| c.passed),
                elapsed_ms: elapsed.as_millis(),
            };
            let mut s = serde_json::to_vec_pretty(&env).map_err(|e| Failure::Io(e.to_string()))?;
            s.push(b'\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&outcome.table.header)
                .map_err(|e| Failure::Io(e.to_string()))?;
            for row in &outcome.table.rows {
                w.write_record(row)
                    .map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.to_string()))?
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes).map_err(io),
        None => std::io::stdout().write_all(&bytes).map_err(io),
    }
}
