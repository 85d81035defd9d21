use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] quartic_helmholtz::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    /// flag values that parse but make no sense; reported as usage errors
    #[error("{0}")]
    Usage(String),
    #[error("tolerance violated: {0}")]
    Tolerance(String),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Variant name of the underlying error.
    pub fn kind(&self) -> String {
        match self {
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Core").to_string()
            }
            CliError::Io(_) => "Io".into(),
            CliError::Usage(_) => "Usage".into(),
            CliError::Tolerance(_) => "Tolerance".into(),
            CliError::ReplayMismatch(_) => "ReplayMismatch".into(),
            CliError::Json(_) => "Json".into(),
        }
    }

    pub fn report(&self, command: &str) -> Value {
        json!({
            "schema": "qhelm.error.v1",
            "command": command,
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quartic_helmholtz::Error;

    #[test]
    fn kinds_follow_variant_names() {
        let e = CliError::from(Error::ParamsOutsideA1("x".into()));
        assert_eq!(e.kind(), "ParamsOutsideA1");
        assert_eq!(e.exit_code(), 1);
        let e = CliError::from(Error::NoConvergence { iterations: 3, grad_norm: 1.0 });
        assert_eq!(e.kind(), "NoConvergence");
        assert_eq!(CliError::Usage("u".into()).exit_code(), 2);
        assert!(e.report("solve")["message"].as_str().unwrap().contains("no convergence"));
    }
}
