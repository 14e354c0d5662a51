//! Machine-readable command reports.

use blobkit::Error;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violated,
    Error,
}

/// Stable process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 1;
    pub const VIOLATED: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Value,
    pub input_digest: Option<String>,
    pub status: Status,
    pub result: Value,
    pub diagnostics: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip)]
    pub code: u8,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Successful or violated outcome of a command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub diagnostics: Map<String, Value>,
    pub summary: String,
}

impl Outcome {
    pub fn new(ok: bool, result: Value, diagnostics: Map<String, Value>, summary: String) -> Self {
        let status = if ok { Status::Ok } else { Status::Violated };
        Self { status, result, diagnostics, summary }
    }
}

/// A command that could not produce a result.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: exit::INPUT, message: message.into() }
    }

    pub fn violated(message: impl Into<String>) -> Self {
        Self { code: exit::VIOLATED, message: message.into() }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Dimension(_) | Error::NotSymmetric { .. } | Error::Domain(_) => exit::INPUT,
        Error::NumericalFailure(_) | Error::Inconsistency(_) => exit::NUMERICAL,
        Error::NotSpd { .. }
        | Error::InvalidState(_)
        | Error::NotSaturated { .. }
        | Error::Capacity { .. }
        | Error::NotSymplecticPlane { .. }
        | Error::PropositionViolation(_) => exit::VIOLATED,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = match &e {
            // the CLI counts modes from one
            Error::NotSaturated { mode, slack, allowed } => {
                format!("index {} not saturated (slack {slack:.6e}, allowed {allowed:.3e})", mode + 1)
            }
            other => other.to_string(),
        };
        Self { code: exit_code(&e), message }
    }
}

pub fn digest<'a>(inputs: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update(bytes);
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn finish(command: Value, input_digest: Option<String>, tolerances: Value, out: Result<Outcome, Failure>) -> Report {
    match out {
        Ok(o) => {
            let mut diagnostics = o.diagnostics;
            diagnostics.insert("tolerances".into(), tolerances);
            let code = if o.status == Status::Ok { exit::OK } else { exit::VIOLATED };
            Report {
                command,
                input_digest,
                status: o.status,
                result: o.result,
                diagnostics: Value::Object(diagnostics),
                message: Some(o.summary),
                code,
            }
        }
        Err(f) => Report {
            command,
            input_digest,
            status: if f.code == exit::VIOLATED { Status::Violated } else { Status::Error },
            result: Value::Null,
            diagnostics: json!({ "tolerances": tolerances }),
            message: Some(f.message),
            code: f.code,
        },
    }
}
