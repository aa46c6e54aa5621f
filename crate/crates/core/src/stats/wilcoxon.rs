use statrs::distribution::{ContinuousCDF, Normal};

use super::rank::{average_ranks, tie_sum};
use super::{check_finite, StatReport, StatsError};

/// Exact null distribution is used when the smaller sample has at most this
/// many observations and there are no ties.
pub const EXACT_MAX_SMALLER: usize = 8;

/// Wilcoxon rank-sum test. The statistic W is the rank sum of `a` in the
/// pooled sample (average ranks for ties), not the Mann-Whitney U.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<StatReport, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup(0));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup(1));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    check_finite(&pooled)?;
    let (n, m) = (a.len(), b.len());
    let total = n + m;
    let ranks = average_ranks(&pooled);
    let w: f64 = ranks[..n].iter().sum();
    let ties = tie_sum(&pooled);

    if ties == 0.0 && n.min(m) <= EXACT_MAX_SMALLER {
        let p = exact_two_sided(w.round() as usize, n, total);
        let mut r = StatReport::new("wilcoxon-rank-sum", w, p, total);
        r.exact = true;
        return Ok(r);
    }

    let (nf, mf, tf) = (n as f64, m as f64, total as f64);
    let mean = nf * (tf + 1.0) / 2.0;
    let var = nf * mf / 12.0 * ((tf + 1.0) - ties / (tf * (tf - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * normal.sf(z)).min(1.0)
    };
    Ok(StatReport::new("wilcoxon-rank-sum", w, p, total))
}

/// `counts[s]` = number of size-`k` subsets of `1..=total` summing to `s`.
fn rank_sum_counts(k: usize, total: usize) -> Vec<u128> {
    let max = k * (2 * total - k + 1) / 2;
    // table[j][s]: subsets of the ranks seen so far with j elements and sum s
    let mut table = vec![vec![0u128; max + 1]; k + 1];
    table[0][0] = 1;
    for rank in 1..=total {
        for j in (1..=k.min(rank)).rev() {
            for s in (rank..=max).rev() {
                let add = table[j - 1][s - rank];
                table[j][s] += add;
            }
        }
    }
    table.swap_remove(k)
}

fn exact_two_sided(w: usize, n: usize, total: usize) -> f64 {
    let counts = rank_sum_counts(n, total);
    let all: u128 = counts.iter().sum();
    let lower: u128 = counts[..=w.min(counts.len() - 1)].iter().sum();
    let upper: u128 = counts[w.min(counts.len())..].iter().sum();
    (2.0 * lower.min(upper) as f64 / all as f64).min(1.0)
}
