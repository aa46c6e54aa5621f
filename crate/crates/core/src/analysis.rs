//! Dataset-level scoring and the condition-comparison battery.
//!
//! Units follow the study design: individual scores are one value per ego
//! per round (turn-2 ideas only), collective scores one value per trial,
//! condition and round. Alters are pooled per trial and round.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::dataset::{format_sig, Condition, GiniRow, IdeaRecord, RatingRow, Role, ScoreRow, TallyRow};
use crate::metrics::{collective_distinct, jaccard, nonredundant_counts, CqScorer, MetricsError};
use crate::netmetrics::{tiered_gini, AlterId, FollowerTally, GiniScope, TierAssignment};
use crate::stats::{
    condition_deltas, condition_series, holm_adjust, kruskal_wallis, pearson, wilcoxon_rank_sum, ConditionDelta,
    StatReport, StatsError,
};
use crate::Error;

/// Scoring unit: one trial, condition and round.
pub type Unit = (u32, Condition, u8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualScore {
    pub trial: u32,
    /// `None` for alters.
    pub condition: Option<Condition>,
    pub round: u8,
    pub participant: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectiveScore {
    pub trial: u32,
    pub condition: Condition,
    pub round: u8,
    pub value: f64,
}

impl CollectiveScore {
    /// Score-file row; the participant column reads `collective:<trial>:<condition>`.
    pub fn to_row(&self, metric: &str) -> ScoreRow {
        ScoreRow {
            participant: format!("collective:{}:{}", self.trial, self.condition),
            round: self.round,
            metric: metric.to_string(),
            value: self.value,
        }
    }
}

impl IndividualScore {
    pub fn to_row(&self, metric: &str) -> ScoreRow {
        ScoreRow {
            participant: self.participant.clone(),
            round: self.round,
            metric: metric.to_string(),
            value: self.value,
        }
    }
}

/// Every ego seen in a unit (any turn) with that unit's turn-2 ideas.
fn ego_units(records: &[IdeaRecord]) -> BTreeMap<Unit, BTreeMap<&str, Vec<&IdeaRecord>>> {
    let mut units: BTreeMap<Unit, BTreeMap<&str, Vec<&IdeaRecord>>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.role == Role::Ego) {
        let Some(c) = r.condition else { continue };
        let egos = units.entry((r.trial, c, r.round)).or_default();
        let ideas = egos.entry(r.participant.as_str()).or_default();
        if r.turn == 2 {
            ideas.push(r);
        }
    }
    units
}

/// Non-redundant turn-2 counts per ego and round, pooled within each unit.
pub fn ego_nonredundant(records: &[IdeaRecord], threshold: usize) -> Result<Vec<IndividualScore>, MetricsError> {
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_units(records) {
        let pool: Vec<IdeaRecord> = egos.values().flatten().map(|r| (*r).clone()).collect();
        let counts = nonredundant_counts(&pool, threshold)?;
        for participant in egos.keys() {
            out.push(IndividualScore {
                trial,
                condition: Some(condition),
                round,
                participant: participant.to_string(),
                value: counts.get(*participant).copied().unwrap_or(0) as f64,
            });
        }
    }
    Ok(out)
}

/// Non-redundant counts of alters, pooled per trial and round.
pub fn alter_nonredundant(records: &[IdeaRecord], threshold: usize) -> Result<Vec<IndividualScore>, MetricsError> {
    let mut pools: BTreeMap<(u32, u8), Vec<IdeaRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.role == Role::Alter) {
        pools.entry((r.trial, r.round)).or_default().push(r.clone());
    }
    let mut out = Vec::new();
    for ((trial, round), pool) in pools {
        for (participant, count) in nonredundant_counts(&pool, threshold)? {
            out.push(IndividualScore {
                trial,
                condition: None,
                round,
                participant,
                value: count as f64,
            });
        }
    }
    Ok(out)
}

/// Creativity Quotient of each ego's turn-2 ideas per round.
pub fn ego_cq(records: &[IdeaRecord], scorer: &CqScorer<'_>) -> Result<Vec<IndividualScore>, MetricsError> {
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_units(records) {
        for (participant, ideas) in egos {
            let texts: Vec<&str> = ideas.iter().map(|r| r.text.as_str()).collect();
            out.push(IndividualScore {
                trial,
                condition: Some(condition),
                round,
                participant: participant.to_string(),
                value: scorer.creativity_quotient(&texts)?.q,
            });
        }
    }
    Ok(out)
}

/// Distinct turn-2 bins per unit.
pub fn collective_nonredundant(records: &[IdeaRecord]) -> Result<Vec<CollectiveScore>, MetricsError> {
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_units(records) {
        let pool: Vec<IdeaRecord> = egos.values().flatten().map(|r| (*r).clone()).collect();
        out.push(CollectiveScore {
            trial,
            condition,
            round,
            value: collective_distinct(&pool)? as f64,
        });
    }
    Ok(out)
}

/// Creativity Quotient of all turn-2 ideas of a unit pooled into one document.
pub fn collective_cq(records: &[IdeaRecord], scorer: &CqScorer<'_>) -> Result<Vec<CollectiveScore>, MetricsError> {
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_units(records) {
        let texts = egos.values().flatten().map(|r| r.text.as_str());
        out.push(CollectiveScore {
            trial,
            condition,
            round,
            value: scorer.collective_quotient(texts)?.q,
        });
    }
    Ok(out)
}

fn bin_set<'a>(ideas: impl IntoIterator<Item = &'a IdeaRecord>) -> Result<BTreeSet<&'a str>, MetricsError> {
    ideas
        .into_iter()
        .map(|r| {
            r.bin().ok_or_else(|| MetricsError::MissingBin {
                participant: r.participant.clone(),
                trial: r.trial,
                round: r.round,
            })
        })
        .collect()
}

/// Mean pairwise Jaccard of the egos' turn-2 bin sets per unit. Units with
/// fewer than two egos are left out.
pub fn ego_ego_overlap(records: &[IdeaRecord]) -> Result<Vec<CollectiveScore>, MetricsError> {
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_units(records) {
        let sets = egos
            .values()
            .map(|ideas| bin_set(ideas.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        if sets.len() < 2 {
            continue;
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                sum += jaccard(&sets[i], &sets[j]);
                pairs += 1;
            }
        }
        out.push(CollectiveScore {
            trial,
            condition,
            round,
            value: sum / pairs as f64,
        });
    }
    Ok(out)
}

/// Jaccard between each ego's turn-1 bins and the bins of all alters in the
/// same trial and round.
pub fn ego_alter_overlap(records: &[IdeaRecord]) -> Result<Vec<IndividualScore>, MetricsError> {
    let mut alter_bins: BTreeMap<(u32, u8), BTreeSet<&str>> = BTreeMap::new();
    let mut ego_bins: BTreeMap<Unit, BTreeMap<&str, BTreeSet<&str>>> = BTreeMap::new();
    for r in records {
        let bin = bin_set([r])?.into_iter().next().expect("one record");
        match (r.role, r.condition) {
            (Role::Alter, _) => {
                alter_bins.entry((r.trial, r.round)).or_default().insert(bin);
            }
            (Role::Ego, Some(c)) => {
                let set = ego_bins
                    .entry((r.trial, c, r.round))
                    .or_default()
                    .entry(&r.participant)
                    .or_default();
                if r.turn == 1 {
                    set.insert(bin);
                }
            }
            (Role::Ego, None) => {}
        }
    }
    let empty = BTreeSet::new();
    let mut out = Vec::new();
    for ((trial, condition, round), egos) in ego_bins {
        let alters = alter_bins.get(&(trial, round)).unwrap_or(&empty);
        for (participant, bins) in egos {
            out.push(IndividualScore {
                trial,
                condition: Some(condition),
                round,
                participant: participant.to_string(),
                value: jaccard(&bins, alters),
            });
        }
    }
    Ok(out)
}

/// Gini per trial, condition and round in both scopes, with tiers taken
/// from each trial's C1 totals. Rounds where every count is zero are skipped.
pub fn gini_table(tallies: &[TallyRow]) -> Result<Vec<GiniRow>, Error> {
    let mut by_unit: BTreeMap<Unit, Vec<(AlterId, u64)>> = BTreeMap::new();
    let mut c1_totals: BTreeMap<u32, BTreeMap<AlterId, u64>> = BTreeMap::new();
    for row in tallies {
        let alter = AlterId::from(row.alter.as_str());
        by_unit
            .entry((row.trial, row.condition, row.round))
            .or_default()
            .push((alter.clone(), row.followers));
        if row.condition == Condition::C1 {
            *c1_totals.entry(row.trial).or_default().entry(alter).or_default() += row.followers;
        }
    }
    let mut tiers = BTreeMap::new();
    for (trial, totals) in c1_totals {
        tiers.insert(trial, TierAssignment::from_totals(totals)?);
    }
    let mut out = Vec::new();
    for ((trial, condition, round), counts) in by_unit {
        let tier = tiers.get(&trial).ok_or(StatsError::MissingCondition {
            trial,
            condition: Condition::C1,
        })?;
        let tally = FollowerTally::new(counts)?;
        if tally.total() == 0 {
            continue;
        }
        for scope in [GiniScope::TopTwoTiers, GiniScope::AllTiers] {
            // A zero top-two subset is degenerate even when tier 3 is not.
            let Ok(gini) = tiered_gini(&tally, tier, scope) else {
                continue;
            };
            out.push(GiniRow {
                trial,
                condition,
                round,
                scope: scope.label().to_string(),
                gini,
            });
        }
    }
    Ok(out)
}

/// Condition pairs compared in the delta analysis, as `(from, to)`.
pub const DELTA_PAIRS: [(Condition, Condition); 3] = [
    (Condition::C2, Condition::C3),
    (Condition::C2, Condition::C4),
    (Condition::C3, Condition::C4),
];

/// Deltas over every trial that has both conditions of a pair.
pub fn all_deltas(tallies: &[TallyRow], ratings: &[RatingRow]) -> Result<Vec<ConditionDelta>, StatsError> {
    let trials: BTreeSet<u32> = tallies.iter().map(|r| r.trial).collect();
    let mut out = Vec::new();
    for trial in trials {
        let series: BTreeMap<Condition, _> = condition_series(trial, tallies, ratings)?
            .into_iter()
            .map(|s| (s.condition, s))
            .collect();
        for (from, to) in DELTA_PAIRS {
            if let (Some(a), Some(b)) = (series.get(&from), series.get(&to)) {
                out.extend(condition_deltas(a, b)?);
            }
        }
    }
    Ok(out)
}

/// Inputs to [`analyze`]. Ratings and a scorer are optional; tests that need
/// them are left out when absent.
pub struct AnalysisInputs<'a> {
    pub records: &'a [IdeaRecord],
    pub tallies: &'a [TallyRow],
    pub ratings: &'a [RatingRow],
    pub scorer: Option<&'a CqScorer<'a>>,
    pub ego_threshold: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub reports: Vec<StatReport>,
    pub gini: Vec<GiniRow>,
    pub deltas: Vec<ConditionDelta>,
    /// Tests that could not run, with the reason.
    pub skipped: Vec<String>,
}

impl Analysis {
    fn push(&mut self, label: &str, result: Result<StatReport, StatsError>) {
        match result {
            Ok(r) => self.reports.push(r.with_comparison(label)),
            Err(e) => self.skipped.push(format!("{label}: {e}")),
        }
    }

    /// Omnibus test over the conditions present, then every condition pair
    /// with Holm over the pairwise family.
    fn compare_conditions(&mut self, label: &str, groups: &BTreeMap<Condition, Vec<f64>>) {
        let present: Vec<(&Condition, &Vec<f64>)> = groups.iter().filter(|(_, v)| !v.is_empty()).collect();
        let all: Vec<Vec<f64>> = present.iter().map(|(_, v)| (*v).clone()).collect();
        self.push(label, kruskal_wallis(&all));
        let mut family = Vec::new();
        for i in 0..present.len() {
            for j in i + 1..present.len() {
                let name = format!("{label} {} vs {}", present[i].0, present[j].0);
                match wilcoxon_rank_sum(present[i].1, present[j].1) {
                    Ok(r) => family.push(r.with_comparison(name)),
                    Err(e) => self.skipped.push(format!("{name}: {e}")),
                }
            }
        }
        holm_adjust(&mut family);
        self.reports.extend(family);
    }
}

fn by_condition_individual(scores: &[IndividualScore]) -> BTreeMap<Condition, Vec<f64>> {
    let mut groups: BTreeMap<Condition, Vec<f64>> = BTreeMap::new();
    for s in scores {
        if let Some(c) = s.condition {
            groups.entry(c).or_default().push(s.value);
        }
    }
    groups
}

fn by_condition_collective(scores: &[CollectiveScore]) -> BTreeMap<Condition, Vec<f64>> {
    let mut groups: BTreeMap<Condition, Vec<f64>> = BTreeMap::new();
    for s in scores {
        groups.entry(s.condition).or_default().push(s.value);
    }
    groups
}

fn unit_means(scores: &[IndividualScore]) -> BTreeMap<Unit, f64> {
    let mut acc: BTreeMap<Unit, (f64, usize)> = BTreeMap::new();
    for s in scores {
        if let Some(c) = s.condition {
            let e = acc.entry((s.trial, c, s.round)).or_default();
            e.0 += s.value;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (sum, n))| (k, sum / n as f64)).collect()
}

fn paired_by_unit(a: &[CollectiveScore], b: &BTreeMap<Unit, f64>) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .filter_map(|s| b.get(&(s.trial, s.condition, s.round)).map(|v| (s.value, *v)))
        .unzip()
}

fn paired_by_participant(a: &[IndividualScore], b: &[IndividualScore]) -> (Vec<f64>, Vec<f64>) {
    let index: BTreeMap<(u32, Option<Condition>, u8, &str), f64> = b
        .iter()
        .map(|s| ((s.trial, s.condition, s.round, s.participant.as_str()), s.value))
        .collect();
    a.iter()
        .filter_map(|s| {
            index
                .get(&(s.trial, s.condition, s.round, s.participant.as_str()))
                .map(|v| (s.value, *v))
        })
        .unzip()
}

/// Runs the full battery.
pub fn analyze(inputs: &AnalysisInputs<'_>) -> Result<Analysis, Error> {
    let mut a = Analysis::default();

    if !inputs.tallies.is_empty() {
        a.deltas = all_deltas(inputs.tallies, inputs.ratings)?;
        let shown: Vec<f64> = a.deltas.iter().map(|d| d.d_shown).collect();
        let obtained: Vec<f64> = a.deltas.iter().map(|d| d.d_obtained).collect();
        a.push("dshown~dobtained", pearson(&shown, &obtained));
        let (rs, rr): (Vec<f64>, Vec<f64>) = a
            .deltas
            .iter()
            .filter_map(|d| d.d_rating.map(|r| (d.d_shown, r)))
            .unzip();
        if inputs.ratings.is_empty() {
            a.skipped.push("dshown~drating: no ratings supplied".into());
        } else {
            a.push("dshown~drating", pearson(&rs, &rr));
        }
        a.gini = gini_table(inputs.tallies)?;
    }

    let nonredundant = ego_nonredundant(inputs.records, inputs.ego_threshold)?;
    a.compare_conditions("nonredundant/individual", &by_condition_individual(&nonredundant));
    let collective = collective_nonredundant(inputs.records)?;
    a.compare_conditions("nonredundant/collective", &by_condition_collective(&collective));

    let cq = match inputs.scorer {
        Some(scorer) => {
            let individual = ego_cq(inputs.records, scorer)?;
            a.compare_conditions("cq/individual", &by_condition_individual(&individual));
            let collective = collective_cq(inputs.records, scorer)?;
            a.compare_conditions("cq/collective", &by_condition_collective(&collective));
            Some(individual)
        }
        None => {
            a.skipped.push("cq: no taxonomy supplied".into());
            None
        }
    };

    let ego_ego = ego_ego_overlap(inputs.records)?;
    let (x, y) = paired_by_unit(&ego_ego, &unit_means(&nonredundant));
    a.push("egoego~nonredundant", pearson(&x, &y));
    if let Some(cq) = &cq {
        let (x, y) = paired_by_unit(&ego_ego, &unit_means(cq));
        a.push("egoego~cq", pearson(&x, &y));
    }
    a.compare_conditions("egoego", &by_condition_collective(&ego_ego));

    let ego_alter = ego_alter_overlap(inputs.records)?;
    let (x, y) = paired_by_participant(&ego_alter, &nonredundant);
    a.push("egoalter~nonredundant", pearson(&x, &y));
    if let Some(cq) = &cq {
        let (x, y) = paired_by_participant(&ego_alter, cq);
        a.push("egoalter~cq", pearson(&x, &y));
    }
    Ok(a)
}

/// Mean individual score per condition, in condition order.
pub fn condition_means(scores: &[IndividualScore]) -> BTreeMap<Condition, f64> {
    by_condition_individual(scores)
        .into_iter()
        .map(|(c, v)| (c, v.iter().sum::<f64>() / v.len() as f64))
        .collect()
}

/// Output layout for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

const REPORT_HEADER: [&str; 8] = [
    "test",
    "comparison",
    "statistic",
    "df",
    "p_raw",
    "p_holm",
    "ci_low",
    "ci_high",
];

fn report_fields(r: &StatReport) -> [String; 8] {
    let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
    [
        r.test.clone(),
        r.comparison.clone(),
        format_sig(r.statistic),
        r.df.map(|d| d.to_string()).unwrap_or_default(),
        format_sig(r.p_raw),
        opt(r.p_adjusted),
        opt(r.ci.map(|c| c.low)),
        opt(r.ci.map(|c| c.high)),
    ]
}

/// Writes `test,comparison,statistic,df,p_raw,p_holm,ci_low,ci_high` rows.
/// For Wilcoxon rows the statistic is the rank sum of the first-named
/// condition.
pub fn write_report<W: Write>(out: W, reports: &[StatReport], format: ReportFormat) -> std::io::Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_HEADER)?;
            for r in reports {
                w.write_record(report_fields(r))?;
            }
            w.flush()
        }
        ReportFormat::Markdown => {
            let mut out = out;
            writeln!(out, "| {} |", REPORT_HEADER.join(" | "))?;
            writeln!(out, "|{}", "---|".repeat(REPORT_HEADER.len()))?;
            for r in reports {
                writeln!(out, "| {} |", report_fields(r).join(" | "))?;
            }
            Ok(())
        }
    }
}
