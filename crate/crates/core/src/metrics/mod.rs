//! Creativity metrics: Creativity Quotient, non-redundant idea counts and
//! Jaccard overlaps between idea sets.
//!
//! The Creativity Quotient of an idea set is `Q = N - I_m`: `N` concept
//! occurrences minus the weight of the maximum spanning tree of their
//! pairwise similarity graph. Every similarity lies in `[0, 1]`, so
//! `I_m <= N - 1` and `Q >= 1` whenever at least one concept maps.

mod mst;
mod quotient;
mod redundancy;

pub use mst::{max_spanning_tree, tree_weight, TreeEdge, WeightMatrix};
pub use quotient::{quotient_of_bag, similarity_graph, CqScorer, QScore, SimilarityGraph};
pub use redundancy::{collective_distinct, jaccard, nonredundant_counts};

use crate::dataset::IdeaRecord;
use crate::taxonomy::TaxonomyError;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("idea by {participant} (trial {trial}, round {round}) has no bin id")]
    MissingBin { participant: String, trial: u32, round: u8 },
    #[error("non-redundancy threshold must be positive")]
    ZeroThreshold,
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

impl MetricsError {
    fn missing_bin(record: &IdeaRecord) -> Self {
        MetricsError::MissingBin {
            participant: record.participant.clone(),
            trial: record.trial,
            round: record.round,
        }
    }
}
