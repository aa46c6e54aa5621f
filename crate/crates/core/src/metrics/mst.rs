//! Maximum spanning trees over dense symmetric weight matrices.

use std::cmp::Ordering;

/// Dense symmetric matrix of edge weights over `n` nodes. The diagonal is
/// not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    /// Row-major strict upper triangle.
    upper: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize) -> Self {
        WeightMatrix {
            n,
            upper: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    /// Fills every pair `i < j` with `weight(i, j)`.
    pub fn from_fn(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = WeightMatrix::new(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, weight(i, j));
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.upper.len()
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(i != j && i < self.n && j < self.n, "pair ({i}, {j}) out of range");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // Rows before `a` hold (n-1) + (n-2) + ... + (n-a) entries.
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, w: f64) {
        let s = self.slot(i, j);
        self.upper[s] = w;
    }

    /// All `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    /// Smaller endpoint.
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Kruskal's algorithm on descending weights.
///
/// Equal weights are taken in lexicographic `(a, b)` order, so the returned
/// tree is unique for a given matrix. The result has `n - 1` edges for
/// `n >= 1`, ordered as they were accepted.
pub fn max_spanning_tree(weights: &WeightMatrix) -> Vec<TreeEdge> {
    let n = weights.len();
    if n < 2 {
        return Vec::new();
    }
    let mut edges: Vec<TreeEdge> = weights
        .edges()
        .map(|(a, b, weight)| TreeEdge { a, b, weight })
        .collect();
    edges.sort_by(|x, y| {
        y.weight
            .partial_cmp(&x.weight)
            .unwrap_or(Ordering::Equal)
            .then((x.a, x.b).cmp(&(y.a, y.b)))
    });

    let mut sets = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for e in edges {
        if sets.union(e.a, e.b) {
            tree.push(e);
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    tree
}

pub fn tree_weight(tree: &[TreeEdge]) -> f64 {
    tree.iter().map(|e| e.weight).sum()
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
