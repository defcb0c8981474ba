//! Scenario files, stage orchestration and the error contract of the
//! `ends-splitter` command line tool.

pub mod pipeline;
pub mod scenario;

use ends_splitter::{Error, ErrorFamily};
use serde::Serialize;

/// Process exit code for a library error.
pub fn exit_code(family: ErrorFamily) -> i32 {
    match family {
        ErrorFamily::Config => 1,
        ErrorFamily::Numeric => 2,
        ErrorFamily::Structural => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub family: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorJson {
    pub error: ErrorBody,
}

impl ErrorJson {
    pub fn config(message: impl Into<String>) -> Self {
        ErrorJson { error: ErrorBody { family: "config", message: message.into(), line: None, column: None } }
    }

    pub fn from_error(e: &Error) -> Self {
        let family = match e.family() {
            ErrorFamily::Config => "config",
            ErrorFamily::Numeric => "numeric",
            ErrorFamily::Structural => "structural",
        };
        ErrorJson { error: ErrorBody { family, message: e.to_string(), line: None, column: None } }
    }
}
