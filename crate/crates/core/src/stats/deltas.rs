use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::StatsError;
use crate::dataset::{Condition, RatingRow, TallyRow};
use crate::engine::{signal_transform, ReferenceHistory};
use crate::netmetrics::{AlterId, FollowerTally};

/// Per-round, per-alter observations of one condition in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSeries {
    pub trial: u32,
    pub condition: Condition,
    pub obtained: BTreeMap<(u8, AlterId), u64>,
    /// Shown counts; empty in C1.
    pub shown: BTreeMap<(u8, AlterId), u64>,
    /// Mean rating received; empty when no ratings were supplied.
    pub mean_rating: BTreeMap<(u8, AlterId), f64>,
}

/// Change from one condition to another for one alter and round,
/// always `to - from`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionDelta {
    pub trial: u32,
    pub alter: AlterId,
    pub round: u8,
    pub d_shown: f64,
    pub d_obtained: f64,
    pub d_rating: Option<f64>,
}

/// Splits one trial's rows by condition. Shown counts are rebuilt from the
/// trial's C1 tallies, so C1 must cover rounds `1..=R` without gaps.
pub fn condition_series(
    trial: u32,
    tallies: &[TallyRow],
    ratings: &[RatingRow],
) -> Result<Vec<ConditionSeries>, StatsError> {
    let mut obtained: BTreeMap<Condition, BTreeMap<(u8, AlterId), u64>> = BTreeMap::new();
    for row in tallies.iter().filter(|r| r.trial == trial) {
        obtained
            .entry(row.condition)
            .or_default()
            .insert((row.round, AlterId::from(row.alter.as_str())), row.followers);
    }
    let c1 = obtained.get(&Condition::C1).ok_or(StatsError::MissingCondition {
        trial,
        condition: Condition::C1,
    })?;
    let reference = reference_from(trial, c1)?;

    let mut sums: BTreeMap<(Condition, u8, AlterId), (f64, usize)> = BTreeMap::new();
    for row in ratings.iter().filter(|r| r.trial == trial) {
        let e = sums
            .entry((row.condition, row.round, AlterId::from(row.alter.as_str())))
            .or_default();
        e.0 += f64::from(row.rating);
        e.1 += 1;
    }

    let mut out = Vec::new();
    for (condition, obtained) in obtained {
        let mut shown = BTreeMap::new();
        if condition.shows_signals() {
            let rounds: BTreeSet<u8> = obtained.keys().map(|(r, _)| *r).collect();
            for round in rounds {
                let map = signal_transform(condition, &reference, round).map_err(|_| StatsError::MissingRound {
                    trial,
                    condition: Condition::C1,
                    round,
                })?;
                for (alter, count) in map {
                    shown.insert((round, alter), count.expect("signal condition"));
                }
            }
        }
        let mean_rating = sums
            .range((condition, 0, AlterId::from(""))..)
            .take_while(|((c, _, _), _)| *c == condition)
            .map(|((_, r, a), (s, n))| ((*r, a.clone()), s / *n as f64))
            .collect();
        out.push(ConditionSeries {
            trial,
            condition,
            obtained,
            shown,
            mean_rating,
        });
    }
    Ok(out)
}

fn reference_from(trial: u32, c1: &BTreeMap<(u8, AlterId), u64>) -> Result<ReferenceHistory, StatsError> {
    let last = c1.keys().map(|(r, _)| *r).max().unwrap_or(0);
    let mut per_round = Vec::new();
    for round in 1..=last {
        let counts: Vec<(AlterId, u64)> = c1
            .iter()
            .filter(|((r, _), _)| *r == round)
            .map(|((_, a), c)| (a.clone(), *c))
            .collect();
        if counts.is_empty() {
            return Err(StatsError::MissingRound {
                trial,
                condition: Condition::C1,
                round,
            });
        }
        per_round.push(FollowerTally::new(counts).map_err(|e| StatsError::Reference(e.to_string()))?);
    }
    ReferenceHistory::from_tallies(per_round).map_err(|e| StatsError::Reference(e.to_string()))
}

/// Deltas `to - from` for every alter and round of `from`.
pub fn condition_deltas(from: &ConditionSeries, to: &ConditionSeries) -> Result<Vec<ConditionDelta>, StatsError> {
    if !from.condition.shows_signals() || !to.condition.shows_signals() {
        return Err(StatsError::InvalidPair(from.condition, to.condition));
    }
    let missing = |series: &ConditionSeries, round: u8| StatsError::MissingRound {
        trial: series.trial,
        condition: series.condition,
        round,
    };
    let mut out = Vec::with_capacity(from.obtained.len());
    for (key, &obtained) in &from.obtained {
        let round = key.0;
        let to_obtained = *to.obtained.get(key).ok_or_else(|| missing(to, round))?;
        let shown_from = *from.shown.get(key).ok_or_else(|| missing(from, round))?;
        let shown_to = *to.shown.get(key).ok_or_else(|| missing(to, round))?;
        let d_rating = match (from.mean_rating.get(key), to.mean_rating.get(key)) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        out.push(ConditionDelta {
            trial: from.trial,
            alter: key.1.clone(),
            round,
            d_shown: shown_to as f64 - shown_from as f64,
            d_obtained: to_obtained as f64 - obtained as f64,
            d_rating,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tally(condition: Condition, round: u8, counts: [u64; 6]) -> Vec<TallyRow> {
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| TallyRow {
                trial: 1,
                condition,
                round,
                alter: format!("a{}", i + 1),
                followers: c,
            })
            .collect()
    }

    fn fixture() -> Vec<TallyRow> {
        let mut rows = tally(Condition::C1, 1, [9, 8, 6, 5, 3, 2]);
        rows.extend(tally(Condition::C2, 1, [7, 7, 6, 6, 5, 5]));
        rows.extend(tally(Condition::C4, 1, [4, 5, 6, 6, 7, 8]));
        rows
    }

    fn series(rows: &[TallyRow], ratings: &[RatingRow]) -> BTreeMap<Condition, ConditionSeries> {
        condition_series(1, rows, ratings)
            .unwrap()
            .into_iter()
            .map(|s| (s.condition, s))
            .collect()
    }

    #[test]
    fn c2_to_c4_shown_deltas() {
        let s = series(&fixture(), &[]);
        let d = condition_deltas(&s[&Condition::C2], &s[&Condition::C4]).unwrap();
        let shown: Vec<f64> = d.iter().map(|x| x.d_shown).collect();
        assert_eq!(shown, [-7.0, -5.0, -1.0, 1.0, 5.0, 7.0]);
        let obtained: Vec<f64> = d.iter().map(|x| x.d_obtained).collect();
        assert_eq!(obtained, [-3.0, -2.0, 0.0, 0.0, 2.0, 3.0]);
        assert!(d.iter().all(|x| x.d_rating.is_none()));
    }

    #[test]
    fn identical_conditions_have_zero_deltas() {
        let s = series(&fixture(), &[]);
        let d = condition_deltas(&s[&Condition::C2], &s[&Condition::C2]).unwrap();
        assert!(d.iter().all(|x| x.d_shown == 0.0 && x.d_obtained == 0.0));
    }

    #[test]
    fn rating_means() {
        let rating = |condition, ego: &str, r| RatingRow {
            trial: 1,
            condition,
            round: 1,
            ego: ego.into(),
            alter: "a1".into(),
            rating: r,
        };
        let ratings = [
            rating(Condition::C2, "x", 2),
            rating(Condition::C2, "y", 3),
            rating(Condition::C4, "z", 5),
        ];
        let s = series(&fixture(), &ratings);
        let d = condition_deltas(&s[&Condition::C2], &s[&Condition::C4]).unwrap();
        assert_eq!(d[0].d_rating, Some(2.5));
        assert_eq!(d[1].d_rating, None);
    }

    #[test]
    fn missing_data() {
        let mut rows = fixture();
        rows.extend(tally(Condition::C2, 2, [6; 6]));
        rows.extend(tally(Condition::C1, 2, [6; 6]));
        let s = series(&rows, &[]);
        assert!(matches!(
            condition_deltas(&s[&Condition::C2], &s[&Condition::C4]),
            Err(StatsError::MissingRound { round: 2, .. })
        ));
        assert!(matches!(
            condition_deltas(&s[&Condition::C1], &s[&Condition::C2]),
            Err(StatsError::InvalidPair(..))
        ));
        let no_c1: Vec<TallyRow> = fixture().into_iter().filter(|r| r.condition != Condition::C1).collect();
        assert!(matches!(
            condition_series(1, &no_c1, &[]),
            Err(StatsError::MissingCondition { .. })
        ));
    }
}
