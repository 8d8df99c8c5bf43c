// SPDX-License-Identifier: Apache-2.0
use std::path::Path;

use photomem_core::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}{}: {message}", column.as_ref().map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        path: String,
        line: u64,
        column: Option<String>,
        message: String,
    },
    #[error("invalid configuration {path}: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Parameter(String),
    #[error("{0}")]
    Lifecycle(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    /// Process exit status. 2 is left to argument errors reported by clap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config { .. } => 3,
            CliError::Parameter(_) => 4,
            CliError::Lifecycle(_) => 5,
            CliError::Io { .. } => 6,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, line: u64, column: Option<&str>, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            column: column.map(str::to_owned),
            message: message.into(),
        }
    }
}

impl From<photomem_core::Error> for CliError {
    fn from(e: photomem_core::Error) -> Self {
        match e.kind() {
            ErrorKind::Lifecycle => CliError::Lifecycle(e.to_string()),
            ErrorKind::Parameter => CliError::Parameter(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let errs = [
            CliError::parse(Path::new("a.csv"), 2, Some("a0_v"), "not a number"),
            CliError::Parameter("x".into()),
            CliError::Lifecycle("y".into()),
            CliError::io(
                Path::new("b"),
                std::io::Error::from(std::io::ErrorKind::NotFound),
            ),
        ];
        let mut codes: Vec<i32> = errs.iter().map(CliError::exit_code).collect();
        codes.dedup();
        assert_eq!(codes, [3, 4, 5, 6]);
        assert_eq!(
            errs[0].to_string(),
            "a.csv: line 2, column a0_v: not a number"
        );
    }

    #[test]
    fn core_errors_keep_their_category() {
        let lifecycle: CliError = photomem_core::Error::NotReady("unmapped".into()).into();
        assert_eq!(lifecycle.exit_code(), 5);
        let param: CliError = photomem_core::Error::param("bad").into();
        assert_eq!(param.exit_code(), 4);
    }
}
