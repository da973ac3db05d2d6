use thiserror::Error;

/// Exit code 0 on success, 2 on validation errors, 3 on numeric failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
        }
    }

    pub fn validation(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }
}

pub fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl From<grad2_core::integrators::IntegrateError> for CliError {
    fn from(e: grad2_core::integrators::IntegrateError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<grad2_core::analysis::AnalysisError> for CliError {
    fn from(e: grad2_core::analysis::AnalysisError) -> Self {
        CliError::Numeric(e.to_string())
    }
}
