mod common;

use common::{kw_permutation_p, wilcoxon_enumeration_p};
use creanet::stats::{kruskal_wallis, pearson, wilcoxon_rank_sum};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every split of `1..=n+m` into samples of sizes n and m, for all sizes
/// with n + m <= 12 and min(n, m) <= 8.
#[test]
fn exact_wilcoxon_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for total in 2..=12usize {
        for n in 1..total {
            let m = total - n;
            if n.min(m) > 8 {
                continue;
            }
            for _ in 0..6 {
                let mut values: Vec<f64> = (1..=total).map(|v| v as f64 * 1.5).collect();
                values.shuffle(&mut rng);
                let (a, b) = values.split_at(n);
                let r = wilcoxon_rank_sum(a, b).unwrap();
                assert!(r.exact);
                let want = wilcoxon_enumeration_p(a, b);
                assert!((r.p_raw - want).abs() < 1e-12, "{a:?} {b:?}: {} vs {want}", r.p_raw);
            }
        }
    }
}

#[test]
fn large_exact_wilcoxon_is_symmetric() {
    // n = 8 against m = 40: the exact table must give the same p whichever
    // direction the shift points.
    let a: Vec<f64> = (0..8).map(|i| i as f64 * 5.0 + 0.5).collect();
    let b: Vec<f64> = (0..40).map(|i| i as f64).collect();
    let flipped_a: Vec<f64> = a.iter().map(|x| -x).collect();
    let flipped_b: Vec<f64> = b.iter().map(|x| -x).collect();
    let p1 = wilcoxon_rank_sum(&a, &b).unwrap();
    let p2 = wilcoxon_rank_sum(&flipped_a, &flipped_b).unwrap();
    assert!(p1.exact);
    assert!((p1.p_raw - p2.p_raw).abs() < 1e-12);
}

fn random_groups(rng: &mut impl Rng, sizes: &[usize], ties: bool) -> Vec<Vec<f64>> {
    let total: usize = sizes.iter().sum();
    let mut values: Vec<f64> = if ties {
        (0..total).map(|_| f64::from(rng.random_range(0..4u8))).collect()
    } else {
        (0..total).map(|v| v as f64).collect()
    };
    values.shuffle(rng);
    let mut out = Vec::new();
    let mut offset = 0;
    for &s in sizes {
        out.push(values[offset..offset + s].to_vec());
        offset += s;
    }
    out
}

#[test]
fn kruskal_wallis_matches_permutation_on_small_designs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let designs: [&[usize]; 8] = [
        &[2, 2],
        &[3, 2],
        &[1, 2, 3],
        &[3, 3, 3],
        &[4, 4, 4],
        &[2, 3, 4],
        &[2, 2, 2, 2],
        &[3, 3, 3, 3],
    ];
    for sizes in designs {
        for ties in [false, true] {
            for _ in 0..3 {
                let groups = random_groups(&mut rng, sizes, ties);
                let r = kruskal_wallis(&groups).unwrap();
                assert!(r.exact);
                let want = kw_permutation_p(&groups);
                assert!((r.p_raw - want).abs() < 1e-9, "{groups:?}: {} vs {want}", r.p_raw);
            }
        }
    }
}

#[test]
fn pearson_matches_exact_closed_form() {
    // Integer fixture: r^2 = sxy^2 / (sxx * syy) with all sums exact.
    let x: [i64; 10] = [3, 7, 1, 9, 4, 4, 8, 2, 6, 5];
    let y: [i64; 10] = [2, 8, 3, 7, 5, 3, 9, 1, 4, 6];
    let n = x.len() as i64;
    let (sx, sy): (i64, i64) = (x.iter().sum(), y.iter().sum());
    let sxy = n * x.iter().zip(&y).map(|(a, b)| a * b).sum::<i64>() - sx * sy;
    let sxx = n * x.iter().map(|a| a * a).sum::<i64>() - sx * sx;
    let syy = n * y.iter().map(|b| b * b).sum::<i64>() - sy * sy;
    let r_exact = sxy as f64 / ((sxx as f64) * (syy as f64)).sqrt();

    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let rep = pearson(&xf, &yf).unwrap();
    assert!((rep.statistic - r_exact).abs() < 1e-12);
    assert_eq!(rep.df, Some(8));

    // t = r sqrt(8 / (1 - r^2)); the two-sided tail for 8 df has the closed
    // form 1 - I(r^2; 1/2, 3) = (1 - r^2)^(7/2) * sum of a short series.
    let r2 = r_exact * r_exact;
    let c = (1.0 - r2).sqrt();
    // P(|T| > t) for even df = 8, with cos = c, sin = |r|.
    let s = r_exact.abs();
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..4 {
        term *= (2 * k - 1) as f64 / (2 * k) as f64 * c * c;
        series += term;
    }
    let p_closed = 1.0 - s * series;
    assert!((rep.p_raw - p_closed).abs() < 1e-10, "{} vs {p_closed}", rep.p_raw);

    let ci = rep.ci.unwrap();
    let z = r_exact.atanh();
    let half = 1.959963984540054 / 7f64.sqrt();
    assert!((ci.low - (z - half).tanh()).abs() < 1e-12);
    assert!((ci.high - (z + half).tanh()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn pearson_symmetric_and_affine_invariant(
        pts in prop::collection::vec((-50i32..50, -50i32..50), 4..30),
        scale in 0.1f64..10.0,
        shift in -100.0f64..100.0,
    ) {
        let x: Vec<f64> = pts.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pts.iter().map(|p| f64::from(p.1)).collect();
        if let (Ok(a), Ok(b)) = (pearson(&x, &y), pearson(&y, &x)) {
            prop_assert!((a.statistic - b.statistic).abs() < 1e-12);
            let x2: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let c = pearson(&x2, &y).unwrap();
            prop_assert!((a.statistic - c.statistic).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&a.statistic));
        }
    }

    #[test]
    fn rank_tests_ignore_monotone_transforms(
        g in prop::collection::vec(prop::collection::vec(0u8..20, 1..8), 2..4),
    ) {
        let groups: Vec<Vec<f64>> = g.iter().map(|v| v.iter().map(|&x| f64::from(x)).collect()).collect();
        let warped: Vec<Vec<f64>> = groups.iter().map(|v| v.iter().map(|x| (x / 3.0).exp() - 7.0).collect()).collect();
        let a = kruskal_wallis(&groups).unwrap();
        let b = kruskal_wallis(&warped).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
        prop_assert!((a.p_raw - b.p_raw).abs() < 1e-9);
        let w1 = wilcoxon_rank_sum(&groups[0], &groups[1]).unwrap();
        let w2 = wilcoxon_rank_sum(&warped[0], &warped[1]).unwrap();
        prop_assert_eq!(w1.statistic, w2.statistic);
        prop_assert!((w1.p_raw - w2.p_raw).abs() < 1e-12);
    }
}
