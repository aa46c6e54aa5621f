use std::collections::{BTreeMap, BTreeSet};

use super::MetricsError;
use crate::dataset::IdeaRecord;

/// Non-redundant idea count per participant.
///
/// An idea counts for its author when the number of distinct participants
/// who submitted its bin is at most `threshold`. A participant repeating a
/// bin earns it once. Every participant in the pool appears in the result,
/// with zero if none of their ideas qualify.
pub fn nonredundant_counts(pool: &[IdeaRecord], threshold: usize) -> Result<BTreeMap<String, usize>, MetricsError> {
    if threshold == 0 {
        return Err(MetricsError::ZeroThreshold);
    }
    let mut authors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut bins_of: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for record in pool {
        let bin = record.bin().ok_or_else(|| MetricsError::missing_bin(record))?;
        authors.entry(bin).or_default().insert(&record.participant);
        bins_of.entry(&record.participant).or_default().insert(bin);
    }
    Ok(bins_of
        .into_iter()
        .map(|(participant, bins)| {
            let count = bins.iter().filter(|b| authors[*b].len() <= threshold).count();
            (participant.to_string(), count)
        })
        .collect())
}

/// Number of distinct bins in the pool.
pub fn collective_distinct(pool: &[IdeaRecord]) -> Result<usize, MetricsError> {
    let mut bins = BTreeSet::new();
    for record in pool {
        bins.insert(record.bin().ok_or_else(|| MetricsError::missing_bin(record))?);
    }
    Ok(bins.len())
}

/// `|A ∩ B| / |A ∪ B|`, taken as 1 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}
