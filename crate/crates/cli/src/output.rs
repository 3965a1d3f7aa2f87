//! Result envelope and JSON emission.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SEARCH_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandResult {
    pub status: Status,
    /// Machine-readable error code; present exactly when `status` is `error`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

/// Successful command output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn new(payload: Value) -> Self {
        Self {
            payload,
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub exit: i32,
    pub payload: Value,
}

impl Failure {
    pub fn new(code: impl Into<String>, message: impl Into<String>, exit: i32) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
            exit,
            payload: Value::Null,
        }
    }

    pub fn with_payload(mut self, payload: Value) -> Self {
        self.payload = payload;
        self
    }
}

impl From<lvnm::Error> for Failure {
    fn from(e: lvnm::Error) -> Self {
        Failure::new(e.code(), e.to_string(), EXIT_VALIDATION)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new("invalid-json", e.to_string(), EXIT_VALIDATION)
    }
}

impl CommandResult {
    pub fn from_outcome(r: Result<Outcome, Failure>) -> (Self, i32) {
        match r {
            Ok(o) => (
                Self {
                    status: Status::Ok,
                    code: None,
                    payload: o.payload,
                    diagnostics: o.diagnostics,
                },
                EXIT_OK,
            ),
            Err(f) => (
                Self {
                    status: Status::Error,
                    code: Some(f.code),
                    payload: f.payload,
                    diagnostics: vec![f.message],
                },
                f.exit,
            ),
        }
    }
}

/// Compact JSON whose floats carry 17 significant digits, enough to round-trip
/// any double. Structural output uses the trait's compact defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}
