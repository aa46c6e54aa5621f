//! Follower counts shown to egos in each condition.
//!
//! All signal conditions replay the per-round counts recorded in C1. With
//! alters ranked `0..n` by total C1 followers and `k = n / 3` alters per
//! tier, the alter at rank `r` is shown the count of rank `source(r)`:
//!
//! | condition | `source(r)` |
//! |-----------|-------------|
//! | C2 | `r` |
//! | C3 | `r + k` for `r < k`, `r - k` for `k <= r < 2k`, else `r` |
//! | C4 | `n - 1 - r` |
//!
//! Each map is a permutation of rank positions, so the shown multiset always
//! equals the recorded one.

use std::collections::BTreeMap;

use super::EngineError;
use crate::dataset::Condition;
use crate::netmetrics::{AlterId, FollowerTally, TierAssignment};

/// C1's per-round tallies and the tiers derived from their totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceHistory {
    per_round: Vec<FollowerTally>,
    tiers: TierAssignment,
}

impl ReferenceHistory {
    /// `per_round[0]` is round 1. Every tally must cover the same alters.
    pub fn from_tallies(per_round: Vec<FollowerTally>) -> Result<Self, EngineError> {
        let first = per_round
            .first()
            .ok_or_else(|| EngineError::Script("reference history has no rounds".into()))?;
        let alters: Vec<&AlterId> = first.alters().collect();
        let mut totals: BTreeMap<AlterId, u64> = BTreeMap::new();
        for (r, tally) in per_round.iter().enumerate() {
            if tally.alters().collect::<Vec<_>>() != alters {
                return Err(EngineError::Script(format!(
                    "round {} tally covers different alters than round 1",
                    r + 1
                )));
            }
            for (a, c) in tally.iter() {
                *totals.entry(a.clone()).or_default() += c;
            }
        }
        let tiers = TierAssignment::from_totals(totals)?;
        Ok(ReferenceHistory { per_round, tiers })
    }

    pub fn rounds(&self) -> u8 {
        self.per_round.len() as u8
    }

    pub fn tally(&self, round: u8) -> Result<&FollowerTally, EngineError> {
        round
            .checked_sub(1)
            .and_then(|i| self.per_round.get(i as usize))
            .ok_or(EngineError::UnknownRound(round))
    }

    pub fn tallies(&self) -> &[FollowerTally] {
        &self.per_round
    }

    pub fn tiers(&self) -> &TierAssignment {
        &self.tiers
    }
}

/// Rank position whose count is shown at rank `rank` (both zero-based).
pub fn rank_source(condition: Condition, rank: usize, n: usize) -> usize {
    let k = n / 3;
    match condition {
        Condition::C1 | Condition::C2 => rank,
        Condition::C3 if rank < k => rank + k,
        Condition::C3 if rank < 2 * k => rank - k,
        Condition::C3 => rank,
        Condition::C4 => n - 1 - rank,
    }
}

/// Shown count per alter for `round`; `None` everywhere in C1.
pub fn signal_transform(
    condition: Condition,
    reference: &ReferenceHistory,
    round: u8,
) -> Result<BTreeMap<AlterId, Option<u64>>, EngineError> {
    let tally = reference.tally(round)?;
    let ranking = reference.tiers().ranking();
    let n = ranking.len();
    Ok(ranking
        .iter()
        .enumerate()
        .map(|(rank, alter)| {
            let shown = condition.shows_signals().then(|| {
                let source = &ranking[rank_source(condition, rank, n)];
                tally.get(source.as_str()).expect("ranking covers the tally")
            });
            (alter.clone(), shown)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Alters a1..a6 ranked in id order with round-1 counts (9,8,6,5,3,2).
    fn reference() -> ReferenceHistory {
        let t = FollowerTally::new([("a1", 9), ("a2", 8), ("a3", 6), ("a4", 5), ("a5", 3), ("a6", 2)]).unwrap();
        ReferenceHistory::from_tallies(vec![t]).unwrap()
    }

    fn shown(condition: Condition) -> Vec<Option<u64>> {
        let r = reference();
        let map = signal_transform(condition, &r, 1).unwrap();
        r.tiers().ranking().iter().map(|a| map[a]).collect()
    }

    #[test]
    fn hand_computed_transforms() {
        assert_eq!(shown(Condition::C1), [None; 6]);
        let some = |v: [u64; 6]| v.map(Some).to_vec();
        assert_eq!(shown(Condition::C2), some([9, 8, 6, 5, 3, 2]));
        assert_eq!(shown(Condition::C3), some([6, 5, 9, 8, 3, 2]));
        assert_eq!(shown(Condition::C4), some([2, 3, 5, 6, 8, 9]));
    }

    #[test]
    fn unknown_round() {
        let r = reference();
        assert!(matches!(
            signal_transform(Condition::C2, &r, 2),
            Err(EngineError::UnknownRound(2))
        ));
        assert!(signal_transform(Condition::C2, &r, 0).is_err());
    }

    #[test]
    fn rank_maps_are_involutions() {
        for n in [3, 6, 9, 12] {
            for c in Condition::ALL {
                for r in 0..n {
                    assert_eq!(rank_source(c, rank_source(c, r, n), n), r);
                }
            }
        }
    }
}
