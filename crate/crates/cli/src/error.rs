use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] phasegroup::Error),

    #[error("invariant violated: {what} = {value:.3e} exceeds tolerance {tol:.3e}")]
    Invariant { what: String, value: f64, tol: f64 },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    /// 2 config, 3 numerical abort, 4 invariant violation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Invariant { .. } => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// Fail with an invariant violation when `value` exceeds `tol` (or is NaN).
pub fn ensure_within(what: &str, value: f64, tol: f64) -> Result<(), CliError> {
    if value <= tol {
        Ok(())
    } else {
        Err(CliError::Invariant {
            what: what.to_string(),
            value,
            tol,
        })
    }
}
