use crate::config::ConfigError;
use serde::Serialize;
use serde_json::json;

/// A pinned constant that the run no longer reproduces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckFailure {
    pub quantity: String,
    pub pinned: f64,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Solver(#[from] nanoqnd_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{} pinned constant(s) not reproduced", .0.len())]
    Check(Vec<CheckFailure>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
            CliError::Check(_) => 4,
        }
    }

    /// Machine-readable report written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let body = match self {
            CliError::Config(e) => json!({
                "kind": "config",
                "message": e.to_string(),
                "line": e.line,
                "key": e.key,
                "suggestion": e.suggestion,
            }),
            CliError::Solver(e) => json!({ "kind": "solver", "message": e.to_string() }),
            CliError::Io(e) => json!({ "kind": "io", "message": e.to_string() }),
            CliError::Check(f) => json!({ "kind": "check", "message": self.to_string(), "failures": f }),
        };
        json!({ "error": body, "exit_code": self.exit_code() })
    }
}
