use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Invalid configuration: bad run config file, option or environment.
#[derive(Debug)]
pub struct ConfigError {
    pub file: Option<PathBuf>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            file: None,
            message: message.into(),
        }
    }

    pub fn in_file(file: &Path, message: impl Into<String>) -> Self {
        Self {
            file: Some(file.to_path_buf()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}: {}", p.display(), self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Machine-readable failure description printed on stderr.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub code: i32,
    pub file: Option<String>,
    pub message: String,
}

/// Maps an error chain to an exit code and record: 2 bad input, 3
/// numerical failure, 4 configuration error.
pub fn classify(err: &anyhow::Error) -> ErrorRecord {
    use satt_core::Error as E;
    let message = format!("{err:#}");
    let record = |error, code, file: Option<&Path>| ErrorRecord {
        error,
        code,
        file: file.map(|p| p.display().to_string()),
        message: message.clone(),
    };
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<ConfigError>() {
            return record("config", 4, c.file.as_deref());
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Numerical(_) => record("numerical", 3, None),
                E::InvalidParameter(_) => record("config", 4, None),
                E::Format { path, .. } | E::Io { path, .. } => record("input", 2, Some(path)),
                _ => record("input", 2, None),
            };
        }
    }
    record("input", 2, None)
}
