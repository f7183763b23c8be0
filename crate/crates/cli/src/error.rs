use std::fmt;

use serde_json::json;

/// Error carried to the process boundary, printed as a JSON object.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage", message: message.into(), exit_code: 2 }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: "config", message: message.into(), exit_code: 2 }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: "io", message: message.into(), exit_code: 3 }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<qibound::Error> for CliError {
    fn from(e: qibound::Error) -> Self {
        use qibound::Error as E;
        let (kind, code) = match e {
            E::InvalidArgument(_) | E::Precondition(_) | E::NotSymmetric(_) => ("invalid_argument", 2),
            E::NodeBudget { .. } => ("node_budget", 2),
            E::NonConvergence(_) | E::Divergent(_) | E::DegenerateFit(_) => ("computation", 3),
        };
        Self { kind, message: e.to_string(), exit_code: code }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::config(e.to_string())
    }
}
