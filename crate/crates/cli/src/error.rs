use std::path::{Path, PathBuf};

use creanet::engine::EngineError;

/// Failure of one command, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Wraps a library error raised while handling `path`.
    pub fn at(path: &Path) -> impl FnOnce(creanet::Error) -> CliError + '_ {
        move |e| match CliError::from(e) {
            CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
            other => other,
        }
    }
}

impl From<creanet::Error> for CliError {
    fn from(e: creanet::Error) -> Self {
        use creanet::dataset::DatasetError;
        use creanet::metrics::MetricsError;
        use creanet::taxonomy::TaxonomyError;
        use creanet::Error;
        match e {
            Error::Taxonomy(TaxonomyError::Io { path, source })
            | Error::Metrics(MetricsError::Taxonomy(TaxonomyError::Io { path, source })) => {
                CliError::Io { path, source }
            }
            Error::Dataset(DatasetError::Io(source)) => CliError::Io {
                path: PathBuf::from("<dataset>"),
                source,
            },
            Error::Engine(e @ (EngineError::Policy(_) | EngineError::UnknownRound(_) | EngineError::Net(_))) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

macro_rules! lift {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                creanet::Error::from(e).into()
            }
        }
    )*};
}

lift!(
    creanet::taxonomy::TaxonomyError,
    creanet::dataset::DatasetError,
    creanet::metrics::MetricsError,
    creanet::stats::StatsError,
    EngineError
);
