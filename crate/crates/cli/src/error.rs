use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("optimizer did not converge within {iterations} iterations (best energy {energy} MeV^2)")]
    NotConverged { iterations: usize, energy: f64 },

    #[error(transparent)]
    Core(#[from] blfq_vqe::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status: 2 configuration, 3 non-convergence, 4 numerical
    /// failure, 1 for i/o.
    pub fn exit_code(&self) -> i32 {
        use blfq_vqe::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged { .. } => 3,
            CliError::Core(
                E::InvalidParameter(_)
                | E::UnsupportedCutoffs(_)
                | E::InvalidJz(_)
                | E::InvalidProbability(_)
                | E::EncodingMismatch { .. },
            ) => 2,
            CliError::Core(_) => 4,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
