use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error("cache error in {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn cache(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Cache {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Cache { .. } => 5,
            CliError::Io { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Infeasible(_) => "infeasible",
            CliError::Invariant(_) => "invariant",
            CliError::Cache { .. } => "cache",
            CliError::Io { .. } => "io",
        }
    }

    /// The one-line JSON record written to stderr on failure.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            exit_code: i32,
            message: String,
        }
        serde_json::to_string(&Record {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        })
        .expect("error record serializes")
    }
}

impl From<primel_core::Error> for CliError {
    fn from(e: primel_core::Error) -> Self {
        use primel_core::Error as E;
        match e {
            E::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            E::Invariant(_) | E::NonConvergence(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        let invariant: CliError = primel_core::Error::Invariant("x".into()).into();
        assert_eq!(invariant.exit_code(), 4);
        let stalled: CliError = primel_core::Error::NonConvergence("x".into()).into();
        assert_eq!(stalled.exit_code(), 4);
        let infeasible: CliError = primel_core::Error::Infeasible {
            what: "x".into(),
            estimate: "1".into(),
        }
        .into();
        assert_eq!(infeasible.exit_code(), 3);
        let config: CliError = primel_core::Error::DivisionByZero.into();
        assert_eq!(config.exit_code(), 2);
        assert_eq!(CliError::cache("f", "bad").exit_code(), 5);
    }

    #[test]
    fn record_is_one_json_line() {
        let rec = CliError::Invariant("bound fails".into()).record();
        assert!(!rec.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&rec).unwrap();
        assert_eq!(v["error"], "invariant");
        assert_eq!(v["exit_code"], 4);
    }
}
