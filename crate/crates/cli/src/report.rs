use std::collections::BTreeMap;
use std::fmt;

use lo_core::error::LoError;
use lo_core::scenario::Scenario;
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Lo(LoError),
    Io(String),
    Usage(String),
}

impl CliError {
    /// 3 for capacity limits, 2 for anything the user can fix, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lo(e) if e.is_capacity() => 3,
            CliError::Lo(LoError::Infeasible | LoError::Unbounded) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lo(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(e) => write!(f, "{e}"),
        }
    }
}

impl From<LoError> for CliError {
    fn from(e: LoError) -> Self {
        CliError::Lo(e)
    }
}

/// What a subcommand produced: plain text plus the structured form.
#[derive(Debug, Default)]
pub struct Outcome {
    pub text: String,
    pub scenario: Option<Scenario>,
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
}

pub struct RunReport {
    pub command: &'static str,
    pub scenario: Option<Scenario>,
    /// Input path → SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub wall_time: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let scenario = self
            .scenario
            .map(|s| json!({"n": s.parties(), "m": s.settings(), "d": s.outcomes()}));
        json!({
            "command": self.command,
            "scenario": scenario,
            "inputs": self.inputs,
            "results": self.results,
            "wall_time": self.wall_time,
        })
        .to_string()
    }
}
