use crate::dataset::DatasetError;
use crate::engine::EngineError;
use crate::metrics::MetricsError;
use crate::netmetrics::NetError;
use crate::stats::StatsError;
use crate::taxonomy::TaxonomyError;

/// Any error raised by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl Error {
    /// True when the failure came from reading or writing a file rather
    /// than from the content of the input.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Taxonomy(TaxonomyError::Io { .. })
                | Error::Metrics(MetricsError::Taxonomy(TaxonomyError::Io { .. }))
                | Error::Dataset(DatasetError::Io(_))
        )
    }
}
