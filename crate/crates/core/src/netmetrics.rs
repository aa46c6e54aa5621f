//! Popularity shares and Gini decentralization of alter follower counts.
//!
//! With `m_i = d_i / Σ d_k` the share of alter `i`,
//!
//! ```text
//! G = Σ_i Σ_j |m_i - m_j| / (2 S Σ_k m_k)
//! ```
//!
//! `G` is homogeneous of degree zero, so raw counts and shares give the same
//! value. It is 0 when every alter has the same following and reaches its
//! maximum `(S - 1) / S` when one alter holds every follower.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NetError {
    #[error("a tally needs at least 2 alters, got {0}")]
    TooFewAlters(usize),
    #[error("alter `{0}` appears twice in a tally")]
    DuplicateAlter(String),
    #[error("all follower counts are zero")]
    Degenerate,
    #[error("{0} alters cannot be split into 3 equal tiers")]
    UnevenTiers(usize),
    #[error("alter `{0}` has no tier")]
    UnknownAlter(String),
    #[error("unknown gini scope {0:?}")]
    UnknownScope(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlterId(String);

impl AlterId {
    pub fn new(id: impl Into<String>) -> Self {
        AlterId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AlterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AlterId {
    fn from(s: &str) -> Self {
        AlterId(s.to_string())
    }
}

impl From<String> for AlterId {
    fn from(s: String) -> Self {
        AlterId(s)
    }
}

impl Borrow<str> for AlterId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Follower count `d_i` of every alter in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowerTally {
    counts: BTreeMap<AlterId, u64>,
}

impl FollowerTally {
    pub fn new<I, A>(counts: I) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (A, u64)>,
        A: Into<AlterId>,
    {
        let mut map = BTreeMap::new();
        for (alter, count) in counts {
            let alter = alter.into();
            if map.contains_key(&alter) {
                return Err(NetError::DuplicateAlter(alter.0));
            }
            map.insert(alter, count);
        }
        if map.len() < 2 {
            return Err(NetError::TooFewAlters(map.len()));
        }
        Ok(FollowerTally { counts: map })
    }

    /// `S`, the number of alters.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, alter: &str) -> Option<u64> {
        self.counts.get(alter).copied()
    }

    /// `(alter, count)` in alter-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&AlterId, u64)> {
        self.counts.iter().map(|(a, &c)| (a, c))
    }

    pub fn alters(&self) -> impl Iterator<Item = &AlterId> {
        self.counts.keys()
    }

    /// The tally restricted to `alters`; unknown ids are ignored.
    pub fn restrict<'a>(&self, alters: impl IntoIterator<Item = &'a AlterId>) -> Result<Self, NetError> {
        FollowerTally::new(
            alters
                .into_iter()
                .filter_map(|a| self.counts.get(a).map(|&c| (a.clone(), c))),
        )
    }

    fn check_live(&self) -> Result<(), NetError> {
        if self.total() == 0 {
            Err(NetError::Degenerate)
        } else {
            Ok(())
        }
    }

    /// `m_i = d_i / Σ d_k`.
    pub fn shares(&self) -> Result<BTreeMap<AlterId, f64>, NetError> {
        self.check_live()?;
        let total = self.total() as f64;
        Ok(self
            .counts
            .iter()
            .map(|(a, &c)| (a.clone(), c as f64 / total))
            .collect())
    }

    pub fn gini(&self) -> Result<f64, NetError> {
        let shares: Vec<f64> = self.shares()?.into_values().collect();
        Ok(gini_of(&shares).expect("shares sum to one"))
    }

    /// The Gini coefficient as a reduced fraction `(numerator, denominator)`
    /// of integers, evaluated on raw counts.
    pub fn gini_ratio(&self) -> Result<(u64, u64), NetError> {
        self.check_live()?;
        let counts: Vec<u64> = self.counts.values().copied().collect();
        let numerator: u64 = counts
            .iter()
            .flat_map(|&a| counts.iter().map(move |&b| a.abs_diff(b)))
            .sum();
        let denominator = 2 * counts.len() as u64 * self.total();
        let g = gcd(numerator, denominator);
        Ok((numerator / g, denominator / g))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Gini coefficient of arbitrary non-negative values; `None` for an empty
/// slice or a non-positive total.
pub fn gini_of(values: &[f64]) -> Option<f64> {
    let total: f64 = values.iter().sum();
    if values.is_empty() || total <= 0.0 {
        return None;
    }
    let spread: f64 = values
        .iter()
        .flat_map(|a| values.iter().map(move |b| (a - b).abs()))
        .sum();
    Some(spread / (2.0 * values.len() as f64 * total))
}

pub fn popularity_shares(tally: &FollowerTally) -> Result<BTreeMap<AlterId, f64>, NetError> {
    tally.shares()
}

pub fn gini(tally: &FollowerTally) -> Result<f64, NetError> {
    tally.gini()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    Top = 1,
    Middle = 2,
    Bottom = 3,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Top, Tier::Middle, Tier::Bottom];

    pub fn number(self) -> u8 {
        self as u8
    }
}

/// Alters split into three equal popularity tiers by total followers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierAssignment {
    /// Alters from most to least followed.
    ranking: Vec<AlterId>,
    tier_of: BTreeMap<AlterId, Tier>,
}

impl TierAssignment {
    /// Ranks by descending total; ties go to the smaller alter id.
    pub fn from_totals<I, A>(totals: I) -> Result<Self, NetError>
    where
        I: IntoIterator<Item = (A, u64)>,
        A: Into<AlterId>,
    {
        let mut ranked: Vec<(AlterId, u64)> = totals.into_iter().map(|(a, t)| (a.into(), t)).collect();
        ranked.sort_by(|(a, ta), (b, tb)| tb.cmp(ta).then_with(|| a.cmp(b)));
        for pair in ranked.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(NetError::DuplicateAlter(pair[0].0.to_string()));
            }
        }
        let ranking: Vec<AlterId> = ranked.into_iter().map(|(a, _)| a).collect();
        Self::from_ranking(ranking)
    }

    /// Uses `ranking` (most popular first) as is.
    pub fn from_ranking(ranking: Vec<AlterId>) -> Result<Self, NetError> {
        let n = ranking.len();
        if n == 0 || !n.is_multiple_of(3) {
            return Err(NetError::UnevenTiers(n));
        }
        let per_tier = n / 3;
        let tier_of = ranking
            .iter()
            .enumerate()
            .map(|(rank, a)| (a.clone(), Tier::ALL[rank / per_tier]))
            .collect();
        Ok(TierAssignment { ranking, tier_of })
    }

    pub fn ranking(&self) -> &[AlterId] {
        &self.ranking
    }

    pub fn tier(&self, alter: &str) -> Option<Tier> {
        self.tier_of.get(alter).copied()
    }

    pub fn members(&self, tier: Tier) -> impl Iterator<Item = &AlterId> {
        self.ranking.iter().filter(move |a| self.tier_of[*a] == tier)
    }

    pub fn per_tier(&self) -> usize {
        self.ranking.len() / 3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiniScope {
    TopTwoTiers,
    AllTiers,
}

impl GiniScope {
    pub const ALL: [GiniScope; 2] = [GiniScope::TopTwoTiers, GiniScope::AllTiers];

    pub fn label(self) -> &'static str {
        match self {
            GiniScope::TopTwoTiers => "top-two-tiers",
            GiniScope::AllTiers => "all-tiers",
        }
    }
}

impl fmt::Display for GiniScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GiniScope {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "top-two-tiers" | "top2" => Ok(GiniScope::TopTwoTiers),
            "all-tiers" | "all" => Ok(GiniScope::AllTiers),
            other => Err(NetError::UnknownScope(other.to_string())),
        }
    }
}

/// Gini among the alters selected by `scope`, with shares renormalized
/// inside the subset.
pub fn tiered_gini(tally: &FollowerTally, tiers: &TierAssignment, scope: GiniScope) -> Result<f64, NetError> {
    for alter in tally.alters() {
        if tiers.tier(alter.as_str()).is_none() {
            return Err(NetError::UnknownAlter(alter.to_string()));
        }
    }
    match scope {
        GiniScope::AllTiers => tally.gini(),
        GiniScope::TopTwoTiers => {
            let subset = tally.restrict(tally.alters().filter(|a| tiers.tier(a.as_str()) != Some(Tier::Bottom)))?;
            subset.gini()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tally(counts: &[u64]) -> FollowerTally {
        FollowerTally::new(counts.iter().enumerate().map(|(i, &c)| (format!("a{}", i + 1), c))).unwrap()
    }

    fn fixture_tiers() -> TierAssignment {
        TierAssignment::from_totals([("a1", 30), ("a2", 28), ("a3", 20), ("a4", 19), ("a5", 12), ("a6", 11)]).unwrap()
    }

    #[test]
    fn shares_reference_values() {
        let s = tally(&[6, 6, 6, 6, 6, 6]).shares().unwrap();
        assert!(s.values().all(|&m| (m - 1.0 / 6.0).abs() < 1e-15));
        let s: Vec<f64> = tally(&[36, 0, 0, 0, 0, 0]).shares().unwrap().into_values().collect();
        assert_eq!(s, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let s: Vec<f64> = tally(&[9, 8, 6, 5, 3, 2]).shares().unwrap().into_values().collect();
        assert_eq!(s[0], 9.0 / 33.0);
        assert_eq!(s[5], 2.0 / 33.0);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_small_tallies() {
        assert_eq!(tally(&[0, 0, 0]).gini(), Err(NetError::Degenerate));
        assert_eq!(tally(&[0, 0]).shares(), Err(NetError::Degenerate));
        assert_eq!(FollowerTally::new([("a", 1)]), Err(NetError::TooFewAlters(1)));
        assert_eq!(
            FollowerTally::new([("a", 1), ("a", 2)]),
            Err(NetError::DuplicateAlter("a".into()))
        );
    }

    #[test]
    fn gini_reference_values() {
        assert_eq!(tally(&[6; 6]).gini().unwrap(), 0.0);
        let winner = tally(&[1, 0, 0, 0, 0, 0]);
        assert_eq!(winner.gini_ratio().unwrap(), (5, 6));
        assert!((winner.gini().unwrap() - 10.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn tiers_rank_by_total_with_id_tie_break() {
        let t = fixture_tiers();
        assert_eq!(t.tier("a1"), Some(Tier::Top));
        assert_eq!(t.tier("a4"), Some(Tier::Middle));
        assert_eq!(t.tier("a6"), Some(Tier::Bottom));
        let tied = TierAssignment::from_totals([("b", 6), ("a", 6), ("d", 6), ("c", 6), ("f", 6), ("e", 6)]).unwrap();
        let order: Vec<&str> = tied.ranking().iter().map(AlterId::as_str).collect();
        assert_eq!(order, ["a", "b", "c", "d", "e", "f"]);
        assert_eq!(
            TierAssignment::from_totals([("a", 1), ("b", 1)]),
            Err(NetError::UnevenTiers(2))
        );
    }

    #[test]
    fn top_two_tier_gini_by_hand() {
        // Top two tiers hold (9, 8, 6, 5), total 28. Ordered-pair absolute
        // differences: 2 * (1 + 3 + 4 + 2 + 3 + 1) = 28.
        // G = 28 / (2 * 4 * 28) = 1/8.
        let t = tally(&[9, 8, 6, 5, 3, 2]);
        let g = tiered_gini(&t, &fixture_tiers(), GiniScope::TopTwoTiers).unwrap();
        assert!((g - 0.125).abs() < 1e-15);
        let all = tiered_gini(&t, &fixture_tiers(), GiniScope::AllTiers).unwrap();
        assert_eq!(all, t.gini().unwrap());
        let flat = tally(&[5, 5, 5, 5, 1, 0]);
        assert_eq!(
            tiered_gini(&flat, &fixture_tiers(), GiniScope::TopTwoTiers).unwrap(),
            0.0
        );
    }

    #[test]
    fn top_two_scope_needs_followers() {
        let t = tally(&[0, 0, 0, 0, 3, 2]);
        assert_eq!(
            tiered_gini(&t, &fixture_tiers(), GiniScope::TopTwoTiers),
            Err(NetError::Degenerate)
        );
    }

    proptest! {
        #[test]
        fn gini_bounds_and_invariances(
            counts in prop::collection::vec(0u64..50, 2..10),
            scale in 1u64..20,
            rotate in 0usize..10,
        ) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let s = counts.len() as f64;
            let g = tally(&counts).gini().unwrap();
            prop_assert!(g >= 0.0 && g <= (s - 1.0) / s + 1e-12);

            let scaled: Vec<u64> = counts.iter().map(|c| c * scale).collect();
            prop_assert!((tally(&scaled).gini().unwrap() - g).abs() < 1e-12);

            let shares: Vec<f64> = tally(&counts).shares().unwrap().into_values().collect();
            let raw: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            prop_assert!((gini_of(&shares).unwrap() - gini_of(&raw).unwrap()).abs() < 1e-12);

            let mut relabeled = counts.clone();
            relabeled.rotate_left(rotate % counts.len());
            prop_assert!((tally(&relabeled).gini().unwrap() - g).abs() < 1e-12);

            let (num, den) = tally(&counts).gini_ratio().unwrap();
            prop_assert!((num as f64 / den as f64 - g).abs() < 1e-12);
        }

        #[test]
        fn doubling_equal_population_keeps_zero(count in 1u64..40, s in 2usize..8) {
            let single = tally(&vec![count; s]);
            let doubled = tally(&vec![count; 2 * s]);
            prop_assert_eq!(single.gini().unwrap(), doubled.gini().unwrap());
        }
    }

    #[test]
    fn maximum_only_for_single_winner() {
        for s in 2..8usize {
            let mut counts = vec![0; s];
            counts[s - 1] = 7;
            let g = tally(&counts).gini().unwrap();
            assert!((g - (s as f64 - 1.0) / s as f64).abs() < 1e-12);
        }
    }
}
