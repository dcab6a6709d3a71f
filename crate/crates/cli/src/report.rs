use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use s1cover::{MapError, ProbeError};

pub const TOOL: &str = "bcover";

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 1,
    Threshold = 2,
    Probe = 3,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Probe(String),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) => Exit::Usage,
            CliError::Probe(_) => Exit::Probe,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Probe(m) => ("probe", m),
        };
        json!({"tool": TOOL, "error": {"kind": kind, "message": message, "exit_code": self.exit() as i32}})
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Probe(m) => f.write_str(m),
        }
    }
}

impl From<ProbeError> for CliError {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::InvalidArgument(m) => CliError::Usage(m),
            ProbeError::Map(MapError::InvalidArgument(m)) => CliError::Usage(m),
            ProbeError::Map(MapError::DimensionMismatch { expected }) => {
                CliError::Usage(format!("the map expects {expected}-dimensional points"))
            }
            ProbeError::NoSolver(m) => CliError::Usage(format!("map `{m}` has no preimage solver")),
            ProbeError::NoJacobian(m) => CliError::Usage(format!("map `{m}` has no analytic jacobian")),
            other => CliError::Probe(other.to_string()),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        CliError::from(ProbeError::Map(e))
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A pass/fail check against a threshold the caller supplied.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub value: f64,
    /// One of `>=`, `<=`, `==`.
    pub relation: &'static str,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_least(check: &str, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, relation: ">=", threshold, pass: value >= threshold }
    }

    pub fn at_most(check: &str, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, relation: "<=", threshold, pass: value <= threshold }
    }

    pub fn equals(check: &str, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, relation: "==", threshold, pass: value == threshold }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: Value,
    /// Seconds since the Unix epoch, only when asked for.
    pub timestamp: Option<u64>,
    pub payload: Value,
    pub verdicts: Vec<Verdict>,
}

/// What a command produced.
pub struct Output {
    pub payload: Value,
    /// Header and rows when the command has a tabular form.
    pub table: Option<(Vec<&'static str>, Vec<Vec<f64>>)>,
    pub verdicts: Vec<Verdict>,
}

impl Output {
    pub fn json<T: Serialize>(payload: &T) -> Result<Self, CliError> {
        let payload = serde_json::to_value(payload).map_err(|e| CliError::Probe(e.to_string()))?;
        Ok(Self { payload, table: None, verdicts: Vec::new() })
    }

    pub fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        self.table = Some((header, rows));
        self
    }

    pub fn verdict(mut self, v: Option<Verdict>) -> Self {
        self.verdicts.extend(v);
        self
    }
}

pub fn render_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Probe(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Probe(e.to_string()))
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                // a reader that hung up early (`| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(|e| CliError::Probe(e.to_string())),
            }
        }
    }
}
