//! Error-to-exit-code mapping.
//!
//! 0 success, 2 configuration errors, 3 data/input errors, 4 exhausted
//! budgets or failed convergence.

use mutnet::Error;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> CliError {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> CliError {
        let code = match &err {
            Error::InvalidSpec(_) => 2,
            Error::BudgetExhausted { .. } | Error::ConvergenceFailed(_) => 4,
            _ => 3,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError {
            code: 3,
            message: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> CliError {
        CliError {
            code: 3,
            message: err.to_string(),
        }
    }
}
