use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::rank::{average_ranks, tie_sum};
use super::{check_finite, StatReport, StatsError};

/// Work budget (subset enumerations) of the exact permutation p-value.
/// Designs above it fall back to the chi-square tail. Four groups of four
/// cost about 1.8 million.
pub const EXACT_WORK_LIMIT: u128 = 3_000_000;

/// Tie-corrected Kruskal-Wallis H with `groups - 1` df.
///
/// Small designs get the exact permutation p-value over all assignments of
/// the pooled observations to groups of the observed sizes; larger ones use
/// the chi-square upper tail.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<StatReport, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(StatsError::EmptyGroup(i));
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    check_finite(&pooled)?;
    let n = pooled.len();
    let nf = n as f64;
    let ranks = average_ranks(&pooled);
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let df = groups.len() as u32 - 1;

    let correction = 1.0 - tie_sum(&pooled) / (nf * nf * nf - nf);
    let mut report = if correction <= 0.0 {
        let mut r = StatReport::new("kruskal-wallis", 0.0, 1.0, n);
        r.exact = true;
        r
    } else {
        let mut offset = 0;
        let mut s = 0.0;
        for &size in &sizes {
            let rsum: f64 = ranks[offset..offset + size].iter().sum();
            s += rsum * rsum / size as f64;
            offset += size;
        }
        let h = ((12.0 / (nf * (nf + 1.0)) * s - 3.0 * (nf + 1.0)) / correction).max(0.0);
        match exact_p(&ranks, &sizes) {
            Some(p) => {
                let mut r = StatReport::new("kruskal-wallis", h, p, n);
                r.exact = true;
                r
            }
            None => {
                let chi = ChiSquared::new(f64::from(df)).expect("df >= 1");
                StatReport::new("kruskal-wallis", h, chi.sf(h), n)
            }
        }
    };
    report.df = Some(df);
    Ok(report)
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) as u128 {
        c = c.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(c)
}

fn arrangements(sizes: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    let mut placed = 0;
    for &s in sizes {
        placed += s;
        total = total.checked_mul(binomial(placed, s)?)?;
    }
    Some(total)
}

/// Subsets visited by [`Search`]: every choice for all groups but the last
/// two, plus one table per distinct remainder for those two.
fn exact_work(sizes: &[usize]) -> Option<u128> {
    let g = sizes.len();
    let n: usize = sizes.iter().sum();
    let mut left = n;
    let mut head: u128 = 1;
    for &s in &sizes[..g - 2] {
        head = head.checked_mul(binomial(left, s)?)?;
        left -= s;
    }
    let tail = binomial(n, left)?.checked_mul(binomial(left, sizes[g - 2])?)?;
    head.checked_add(tail)
}

/// Permutation p-value of `sum(R_j^2 / n_j)` in exact integer arithmetic.
fn exact_p(ranks: &[f64], sizes: &[usize]) -> Option<f64> {
    let n = ranks.len();
    if n > 31 || exact_work(sizes)? > EXACT_WORK_LIMIT {
        return None;
    }
    let total = arrangements(sizes)?;
    // Doubled average ranks are integers.
    let doubled: Vec<u64> = ranks.iter().map(|r| (r * 2.0).round() as u64).collect();
    let lcm = sizes.iter().fold(1u64, |acc, &s| acc / gcd(acc, s as u64) * s as u64);
    let weights: Vec<u128> = sizes.iter().map(|&s| u128::from(lcm / s as u64)).collect();

    let mut observed: u128 = 0;
    let mut offset = 0;
    for (j, &size) in sizes.iter().enumerate() {
        let sum: u64 = doubled[offset..offset + size].iter().sum();
        observed += weights[j] * u128::from(sum) * u128::from(sum);
        offset += size;
    }

    let mut search = Search {
        doubled: &doubled,
        sizes,
        weights: &weights,
        memo: HashMap::new(),
    };
    let full = (1u32 << n) - 1;
    let hits = search.count(full, 0, observed as i128);
    Some(hits as f64 / total as f64)
}

struct Search<'a> {
    doubled: &'a [u64],
    sizes: &'a [usize],
    weights: &'a [u128],
    /// Sorted statistic contributions of the last two groups, by the mask
    /// of observations left for them.
    memo: HashMap<u32, Vec<u128>>,
}

impl Search<'_> {
    /// Ways to split `mask` over groups `j..` with contribution >= `need`.
    fn count(&mut self, mask: u32, j: usize, need: i128) -> u128 {
        let g = self.sizes.len();
        if j + 2 == g {
            let values = self.tail(mask);
            let below = if need <= 0 {
                0
            } else {
                values.partition_point(|&v| (v as i128) < need)
            };
            return (values.len() - below) as u128;
        }
        let bits = bits_of(mask);
        let mut subsets = Vec::new();
        for_each_subset(&bits, self.sizes[j], self.doubled, &mut |sub, sum| {
            subsets.push((sub, sum))
        });
        let mut hits = 0;
        for (sub, sum) in subsets {
            let t = self.weights[j] * u128::from(sum) * u128::from(sum);
            hits += self.count(mask & !sub, j + 1, need - t as i128);
        }
        hits
    }

    fn tail(&mut self, mask: u32) -> &Vec<u128> {
        let g = self.sizes.len();
        let (a, wa, wb) = (self.sizes[g - 2], self.weights[g - 2], self.weights[g - 1]);
        let doubled = self.doubled;
        self.memo.entry(mask).or_insert_with(|| {
            let bits = bits_of(mask);
            let all: u64 = bits.iter().map(|&i| doubled[i]).sum();
            let mut values = Vec::new();
            for_each_subset(&bits, a, doubled, &mut |_, sum| {
                let rest = all - sum;
                values.push(wa * u128::from(sum) * u128::from(sum) + wb * u128::from(rest) * u128::from(rest));
            });
            values.sort_unstable();
            values
        })
    }
}

fn bits_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn for_each_subset(bits: &[usize], k: usize, values: &[u64], f: &mut impl FnMut(u32, u64)) {
    fn go(bits: &[usize], k: usize, values: &[u64], start: usize, mask: u32, sum: u64, f: &mut impl FnMut(u32, u64)) {
        if k == 0 {
            f(mask, sum);
            return;
        }
        for i in start..=bits.len() - k {
            let b = bits[i];
            go(bits, k - 1, values, i + 1, mask | 1 << b, sum + values[b], f);
        }
    }
    if k <= bits.len() {
        go(bits, k, values, 0, 0, 0, f);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_groups_give_zero() {
        let r = kruskal_wallis(&[vec![2.0, 2.0], vec![2.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_raw, 1.0);
        assert_eq!(r.df, Some(2));
    }

    #[test]
    fn separated_pairs() {
        // Ranks (1,2),(3,4): H = 12/20 * (9/2 + 49/2) - 15 = 2.4.
        // Only 2 of the 6 splits are as extreme.
        let r = kruskal_wallis(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_abs_diff_eq!(r.statistic, 2.4, epsilon = 1e-12);
        assert!(r.exact);
        assert_abs_diff_eq!(r.p_raw, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn tie_corrected_by_hand() {
        // Pooled (1,2,2 | 2,3,3): ranks 1, 3, 3 | 3, 5.5, 5.5.
        // S = 49/3 + 196/3 = 81.667; raw H = 12/42 * S - 21 = 2.3333.
        // Ties: t=3 at 2, t=2 at 3 -> 24 + 6 = 30; C = 1 - 30/210.
        let r = kruskal_wallis(&[vec![1.0, 2.0, 2.0], vec![2.0, 3.0, 3.0]]).unwrap();
        let raw = 12.0 / 42.0 * (49.0 / 3.0 + 196.0 / 3.0) - 21.0;
        assert_abs_diff_eq!(r.statistic, raw / (1.0 - 30.0 / 210.0), epsilon = 1e-12);
    }

    #[test]
    fn large_designs_use_chi_square() {
        let groups: Vec<Vec<f64>> = (0..3).map(|g| (0..20).map(|i| (i * 3 + g) as f64).collect()).collect();
        let r = kruskal_wallis(&groups).unwrap();
        assert!(!r.exact);
        assert!(r.p_raw > 0.5);
    }

    #[test]
    fn errors() {
        assert_eq!(kruskal_wallis(&[vec![1.0]]), Err(StatsError::TooFewGroups(1)));
        assert_eq!(kruskal_wallis(&[vec![1.0], vec![]]), Err(StatsError::EmptyGroup(1)));
    }

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangements(&[2, 2]), Some(6));
        assert_eq!(arrangements(&[4, 4, 4, 4]), Some(63_063_000));
        assert_eq!(exact_work(&[4, 4, 4, 4]), Some(1820 * 495 + 12870 * 70));
        assert_eq!(exact_work(&[3, 5]), Some(1 + 56));
    }
}
