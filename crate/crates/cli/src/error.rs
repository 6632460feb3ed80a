use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line front end. Each maps to a stable
/// process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("config error: {0}")]
    Config(String),

    /// Malformed input data. `row` is the 1-based data row, i.e. the time index.
    #[error("data error at row {row}{}: {message}", column.as_ref().map(|c| format!(", column {c}")).unwrap_or_default())]
    Data {
        row: usize,
        column: Option<String>,
        message: String,
    },

    #[error("numerical failure{}: {}", location(.0), .0.root())]
    Numerical(mvdlm::Error),
}

fn location(err: &mvdlm::Error) -> String {
    let mut parts = Vec::new();
    let mut cur = err;
    loop {
        match cur {
            mvdlm::Error::AtReplication { index, source } => {
                parts.push(format!("replication {index}"));
                cur = source;
            }
            mvdlm::Error::AtTime { t, source } => {
                parts.push(format!("time {t}"));
                cur = source;
            }
            _ => break,
        }
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!(" at {}", parts.join(", "))
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 1 for I/O, 2 for config or data errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::Data { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
