mod common;

use std::collections::BTreeSet;

use common::{brute_max_tree, fixture_dags, random_dag, Dag};
use creanet::dataset::{IdeaRecord, Role};
use creanet::metrics::{
    jaccard, max_spanning_tree, nonredundant_counts, quotient_of_bag, similarity_graph, tree_weight, WeightMatrix,
};
use creanet::taxonomy::{ConceptId, Taxonomy};
use creanet::textpipe::ConceptBag;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bag_of(ids: &[usize]) -> ConceptBag {
    ConceptBag {
        concepts: ids.iter().map(|&i| ConceptId::new(Dag::id(i)).unwrap()).collect(),
        dropped: Vec::new(),
    }
}

#[test]
fn mst_matches_pruefer_enumeration_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        // Coarse weights make ties common.
        let m = WeightMatrix::from_fn(n, |_, _| f64::from(rng.random_range(0..5u8)) / 4.0);
        let got = tree_weight(&max_spanning_tree(&m));
        let want = brute_max_tree(n, |a, b| m.get(a, b));
        assert_eq!(got, want);
    }
}

#[test]
fn similarity_graph_edges_match_pairwise_oracle() {
    let dag = &fixture_dags()[0];
    let t = Taxonomy::from_native_str(&dag.native()).unwrap();
    let nodes = [1, 2, 3, 4];
    let g = similarity_graph(&bag_of(&nodes), &t).unwrap();
    assert_eq!(g.weights().edge_count(), 6);
    for i in 0..4 {
        for j in i + 1..4 {
            assert!((g.weight(i, j) - dag.sim(nodes[i], nodes[j])).abs() < 1e-12);
        }
    }
}

#[test]
fn quotient_matches_brute_force_on_fixture_sets() {
    let dag = &fixture_dags()[5];
    let t = Taxonomy::from_native_str(&dag.native()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..dag.len())).collect();
        let q = quotient_of_bag(&bag_of(&ids), &t).unwrap();
        let sims: Vec<Vec<f64>> = ids
            .iter()
            .map(|&a| ids.iter().map(|&b| dag.sim(a, b)).collect())
            .collect();
        let im = brute_max_tree(n, |a, b| sims[a][b]);
        assert_eq!(q.concepts, n);
        assert!((q.multi_information - im).abs() < 1e-9);
        assert!(q.q >= 1.0 - 1e-12);
    }
}

#[test]
fn duplicates_leave_quotient_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dag = random_dag(&mut rng, 40, false);
    let t = Taxonomy::from_native_str(&dag.native()).unwrap();
    for _ in 0..100 {
        let base: Vec<usize> = (0..rng.random_range(1..=4)).map(|_| rng.random_range(0..40)).collect();
        let q0 = quotient_of_bag(&bag_of(&base), &t).unwrap().q;
        let mut grown = base.clone();
        for _ in 0..rng.random_range(1..=4) {
            grown.push(base[rng.random_range(0..base.len())]);
        }
        let q1 = quotient_of_bag(&bag_of(&grown), &t).unwrap().q;
        assert!((q0 - q1).abs() < 1e-9, "{base:?} -> {grown:?}");
    }
}

fn record(p: &str, bin: &str) -> IdeaRecord {
    IdeaRecord {
        participant: p.into(),
        role: Role::Ego,
        trial: 1,
        condition: Some(creanet::dataset::Condition::C2),
        round: 1,
        turn: 2,
        text: String::new(),
        bin: Some(bin.into()),
    }
}

/// Reference tally: for each participant, the distinct bins whose author
/// count (by scanning the whole pool) is within the threshold.
fn tally_by_hand(pool: &[IdeaRecord], threshold: usize, who: &str) -> usize {
    let mine: BTreeSet<&str> = pool
        .iter()
        .filter(|r| r.participant == who)
        .map(|r| r.bin.as_deref().unwrap())
        .collect();
    mine.into_iter()
        .filter(|b| {
            let people: BTreeSet<&str> = pool
                .iter()
                .filter(|r| r.bin.as_deref() == Some(*b))
                .map(|r| r.participant.as_str())
                .collect();
            people.len() <= threshold
        })
        .count()
}

proptest! {
    #[test]
    fn nonredundant_matches_hand_tally(
        ideas in prop::collection::vec((0usize..6, 0usize..8), 0..30),
        threshold in 1usize..4,
    ) {
        let pool: Vec<IdeaRecord> = ideas.iter().map(|(p, b)| record(&format!("p{p}"), &format!("b{b}"))).collect();
        let counts = nonredundant_counts(&pool, threshold).unwrap();
        for (p, c) in &counts {
            prop_assert_eq!(*c, tally_by_hand(&pool, threshold, p));
        }
        prop_assert!(counts.values().sum::<usize>() <= pool.len());
        let mut reversed = pool.clone();
        reversed.reverse();
        prop_assert_eq!(nonredundant_counts(&reversed, threshold).unwrap(), counts);
    }

    #[test]
    fn jaccard_properties(a in prop::collection::btree_set(0u8..10, 0..8), b in prop::collection::btree_set(0u8..10, 0..8), x in 10u8..20) {
        let j = jaccard(&a, &b);
        prop_assert_eq!(j, jaccard(&b, &a));
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(jaccard(&a, &a), 1.0);
        let (mut a2, mut b2) = (a.clone(), b.clone());
        a2.insert(x);
        b2.insert(x);
        prop_assert!(jaccard(&a2, &b2) >= j || (a.is_empty() && b.is_empty()));
    }
}
