//! Correlation and rank tests for condition comparisons.
//!
//! Distribution tails come from `statrs`; everything else (ranks, tie
//! corrections, exact null distributions, Holm) is computed here.

mod deltas;
mod kruskal;
mod pearson;
mod rank;
mod wilcoxon;

use serde::Serialize;

pub use deltas::{condition_deltas, condition_series, ConditionDelta, ConditionSeries};
pub use kruskal::{kruskal_wallis, EXACT_WORK_LIMIT};
pub use pearson::pearson;
pub use rank::{average_ranks, tie_sum};
pub use wilcoxon::{wilcoxon_rank_sum, EXACT_MAX_SMALLER};

use crate::dataset::Condition;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("a sample has zero variance")]
    ZeroVariance,
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("non-finite observation")]
    NonFinite,
    #[error("p-value {0} outside [0, 1]")]
    PValueOutOfRange(f64),
    #[error("trial {trial} has no {condition} data")]
    MissingCondition { trial: u32, condition: Condition },
    #[error("trial {trial} {condition} lacks round {round}")]
    MissingRound {
        trial: u32,
        condition: Condition,
        round: u8,
    },
    #[error("deltas need two signal conditions, got {0} and {1}")]
    InvalidPair(Condition, Condition),
    #[error("reference history: {0}")]
    Reference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
}

/// One test result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub test: String,
    /// Free-form label of what was compared, e.g. `C2 vs C3`.
    pub comparison: String,
    pub statistic: f64,
    pub df: Option<u32>,
    pub p_raw: f64,
    pub p_adjusted: Option<f64>,
    pub ci: Option<ConfidenceInterval>,
    pub n: usize,
    /// Whether `p_raw` comes from an exact null distribution.
    pub exact: bool,
}

impl StatReport {
    pub(crate) fn new(test: &str, statistic: f64, p_raw: f64, n: usize) -> Self {
        StatReport {
            test: test.to_string(),
            comparison: String::new(),
            statistic,
            df: None,
            p_raw: p_raw.clamp(0.0, 1.0),
            p_adjusted: None,
            ci: None,
            n,
            exact: false,
        }
    }

    pub fn with_comparison(mut self, comparison: impl Into<String>) -> Self {
        self.comparison = comparison.into();
        self
    }
}

/// Holm's step-down adjustment, returned in input order.
pub fn holm_correct(pvals: &[f64]) -> Result<Vec<f64>, StatsError> {
    if let Some(&p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::PValueOutOfRange(p));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (i, &idx) in order.iter().enumerate() {
        running = running.max(((m - i) as f64 * pvals[idx]).min(1.0));
        adjusted[idx] = running;
    }
    Ok(adjusted)
}

/// Fills `p_adjusted` of every report with Holm over the family.
pub fn holm_adjust(reports: &mut [StatReport]) {
    let raw: Vec<f64> = reports.iter().map(|r| r.p_raw).collect();
    let adjusted = holm_correct(&raw).expect("reports hold clamped p-values");
    for (r, p) in reports.iter_mut().zip(adjusted) {
        r.p_adjusted = Some(p);
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}
