use al_core::AlError;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// Bad flags, unknown names, or an infeasible configuration.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input data.
    #[error("{0}")]
    Data(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] AlError),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Core(AlError::MissingCapability { .. } | AlError::TargetKind { .. }) => 1,
            BenchError::Data(_) | BenchError::Io { .. } | BenchError::Core(_) => 2,
        }
    }
}
