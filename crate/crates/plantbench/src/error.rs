use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] plantbench_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format { path: path.into(), msg: msg.into() }
    }

    /// Process exit code: 1 I/O, 2 usage, 3 validation, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use plantbench_core::Error as C;
        match self {
            Error::Io { .. } => 1,
            Error::Usage(_) => 2,
            Error::Format { .. } | Error::Validation(_) | Error::Csv(_) => 3,
            Error::Core(e) => match e {
                C::Diverged { .. } | C::NoConvergence { .. } | C::DegenerateSpectrum | C::SingularOverlap => 4,
                C::UnsupportedDimension { .. } | C::Capacity { .. } | C::UnknownCatalogueId(_) | C::TooLarge { .. } => 2,
                _ => 3,
            },
        }
    }
}
