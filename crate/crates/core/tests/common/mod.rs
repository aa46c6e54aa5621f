//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's algorithms: taxonomies are kept as
//! plain parent lists, spanning trees are enumerated through Prüfer
//! sequences and null distributions by listing every relabeling.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A DAG as parent lists; node `i` only has parents `< i`.
#[derive(Debug, Clone)]
pub struct Dag {
    pub parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn id(i: usize) -> String {
        format!("c{i:03}")
    }

    /// Native TSV text: every node as its own lemma, then the edges.
    pub fn native(&self) -> String {
        let mut s = String::new();
        for i in 0..self.len() {
            s.push_str(&format!("CONCEPT\t{}\tw{i}\n", Self::id(i)));
        }
        for (i, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                s.push_str(&format!("EDGE\t{}\t{}\n", Self::id(i), Self::id(p)));
            }
        }
        s
    }

    /// Distinct proper descendants, by repeated scanning for any node with a
    /// parent already in the set.
    pub fn descendants(&self, c: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        loop {
            let before = set.len();
            for (i, ps) in self.parents.iter().enumerate() {
                if ps.iter().any(|p| *p == c || set.contains(p)) {
                    set.insert(i);
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    pub fn ancestors_or_self(&self, c: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([c]);
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            for &p in &self.parents[x] {
                if set.insert(p) {
                    stack.push(p);
                }
            }
        }
        set
    }

    pub fn ic(&self, c: usize) -> f64 {
        let h = self.descendants(c).len() as f64;
        1.0 - (h + 1.0).ln() / (self.len() as f64).ln()
    }

    pub fn msca(&self, a: usize, b: usize) -> f64 {
        let common: Vec<usize> = self
            .ancestors_or_self(a)
            .intersection(&self.ancestors_or_self(b))
            .copied()
            .collect();
        common.iter().map(|&c| self.ic(c)).fold(0.0, f64::max)
    }

    pub fn sim(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 1.0;
        }
        1.0 - (self.ic(a) + self.ic(b) - 2.0 * self.msca(a, b)) / 2.0
    }
}

/// Random DAG with `n` nodes. With `single_root`, every node but 0 gets at
/// least one parent; otherwise about a tenth of the nodes are extra roots.
pub fn random_dag(rng: &mut impl Rng, n: usize, single_root: bool) -> Dag {
    let mut parents = vec![Vec::new(); n];
    for (i, ps) in parents.iter_mut().enumerate().skip(1) {
        if !single_root && rng.random_bool(0.1) {
            continue;
        }
        let k = if i > 1 && rng.random_bool(0.3) { 2 } else { 1 };
        let mut set = BTreeSet::new();
        while set.len() < k {
            set.insert(rng.random_range(0..i));
        }
        *ps = set.into_iter().collect();
    }
    Dag { parents }
}

/// Hand-made fixtures plus seeded random ones, all with at most 200 nodes.
pub fn fixture_dags() -> Vec<Dag> {
    let mut out = vec![
        // root -> {a, b}, a -> {c, d}, b -> d (diamond on d)
        Dag {
            parents: vec![vec![], vec![0], vec![0], vec![1], vec![1, 2]],
        },
        // a chain of 6
        Dag {
            parents: (0..6).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect(),
        },
        // a star with 8 leaves
        Dag {
            parents: (0..9).map(|i| if i == 0 { vec![] } else { vec![0] }).collect(),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (n, single) in [(12, true), (30, false), (60, true), (120, false), (200, true)] {
        out.push(random_dag(&mut rng, n, single));
    }
    out
}

/// Maximum spanning-tree weight over all `n^(n-2)` labeled trees, decoded
/// from Prüfer sequences.
pub fn brute_max_tree(n: usize, w: impl Fn(usize, usize) -> f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return w(0, 1);
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut total = 0.0;
        for (a, b) in prufer_edges(&seq, n) {
            total += w(a.min(b), a.max(b));
        }
        best = best.max(total);
        // next sequence in base n
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
    }
}

fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Ranks with ties averaged, by counting smaller and equal values.
pub fn naive_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Permutation p-value of Kruskal-Wallis: share of all distinct group-label
/// sequences whose `sum(R_j^2 / n_j)` reaches the observed one. H is an
/// increasing function of that sum for fixed sizes and ties.
pub fn kw_permutation_p(groups: &[Vec<f64>]) -> f64 {
    let values: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = naive_ranks(&values);
    let sizes: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    let mut observed = 0.0;
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        observed += r * r / g.len() as f64;
        offset += g.len();
    }
    let mut walk = LabelWalk {
        ranks: &ranks,
        sizes: &sizes,
        remaining: groups.iter().map(Vec::len).collect(),
        sums: vec![0.0; groups.len()],
        threshold: observed - 1e-9,
        hits: 0,
        total: 0,
    };
    walk.go(0);
    walk.hits as f64 / walk.total as f64
}

struct LabelWalk<'a> {
    ranks: &'a [f64],
    sizes: &'a [f64],
    remaining: Vec<usize>,
    sums: Vec<f64>,
    threshold: f64,
    hits: u64,
    total: u64,
}

impl LabelWalk<'_> {
    fn go(&mut self, pos: usize) {
        if pos == self.ranks.len() {
            self.total += 1;
            let s: f64 = self.sums.iter().zip(self.sizes).map(|(r, m)| r * r / m).sum();
            if s >= self.threshold {
                self.hits += 1;
            }
            return;
        }
        for g in 0..self.remaining.len() {
            if self.remaining[g] > 0 {
                self.remaining[g] -= 1;
                self.sums[g] += self.ranks[pos];
                self.go(pos + 1);
                self.sums[g] -= self.ranks[pos];
                self.remaining[g] += 1;
            }
        }
    }
}

/// Exact two-sided rank-sum p-value from listing every size-`n` subset of
/// the pooled positions.
pub fn wilcoxon_enumeration_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = naive_ranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    let n = pooled.len();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if s <= w + 1e-9 {
            le += 1;
        }
        if s >= w - 1e-9 {
            ge += 1;
        }
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}
