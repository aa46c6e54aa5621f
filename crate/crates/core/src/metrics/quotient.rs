use std::collections::HashMap;

use serde::Serialize;

use super::mst::{max_spanning_tree, tree_weight, TreeEdge, WeightMatrix};
use crate::taxonomy::{ConceptId, Lexicon, Taxonomy, TaxonomyError};
use crate::textpipe::{ConceptBag, TextPipeline};

/// Complete graph over concept occurrences, weighted by pair similarity.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    nodes: Vec<ConceptId>,
    weights: WeightMatrix,
}

impl SimilarityGraph {
    pub fn nodes(&self) -> &[ConceptId] {
        &self.nodes
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j)
    }

    pub fn max_spanning_tree(&self) -> Vec<TreeEdge> {
        max_spanning_tree(&self.weights)
    }
}

/// One node per concept occurrence; repeated concepts become separate nodes
/// joined by weight-1 edges.
pub fn similarity_graph(bag: &ConceptBag, taxonomy: &Taxonomy) -> Result<SimilarityGraph, TaxonomyError> {
    let indices = bag
        .concepts
        .iter()
        .map(|c| taxonomy.index_of(c))
        .collect::<Result<Vec<_>, _>>()?;
    let n = indices.len();
    if n < 2 {
        return Ok(SimilarityGraph {
            nodes: bag.concepts.clone(),
            weights: WeightMatrix::new(n),
        });
    }

    // Similarity depends only on the concept, so compute it once per
    // distinct pair.
    let mut profiles = HashMap::new();
    for &i in &indices {
        if let std::collections::hash_map::Entry::Vacant(e) = profiles.entry(i) {
            e.insert(taxonomy.profile(i)?);
        }
    }
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let weights = WeightMatrix::from_fn(n, |a, b| {
        let (x, y) = (indices[a].min(indices[b]), indices[a].max(indices[b]));
        *cache
            .entry((x, y))
            .or_insert_with(|| taxonomy.similarity_of(&profiles[&x], &profiles[&y]))
    });
    Ok(SimilarityGraph {
        nodes: bag.concepts.clone(),
        weights,
    })
}

/// Creativity Quotient of one idea set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QScore {
    /// `N`, the number of concept occurrences.
    pub concepts: usize,
    /// `I_m`, total weight of the maximum spanning tree.
    pub multi_information: f64,
    /// `N - I_m`; zero when no concept maps.
    pub q: f64,
}

impl QScore {
    pub const EMPTY: QScore = QScore {
        concepts: 0,
        multi_information: 0.0,
        q: 0.0,
    };
}

pub fn quotient_of_bag(bag: &ConceptBag, taxonomy: &Taxonomy) -> Result<QScore, TaxonomyError> {
    if bag.is_empty() {
        return Ok(QScore::EMPTY);
    }
    let graph = similarity_graph(bag, taxonomy)?;
    let multi_information = tree_weight(&graph.max_spanning_tree());
    let n = bag.len();
    Ok(QScore {
        concepts: n,
        multi_information,
        q: n as f64 - multi_information,
    })
}

/// Scores idea texts against one taxonomy and lexicon.
#[derive(Debug, Clone, Copy)]
pub struct CqScorer<'a> {
    taxonomy: &'a Taxonomy,
    lexicon: &'a Lexicon,
    pipeline: &'a TextPipeline,
}

impl<'a> CqScorer<'a> {
    pub fn new(taxonomy: &'a Taxonomy, lexicon: &'a Lexicon, pipeline: &'a TextPipeline) -> Self {
        CqScorer {
            taxonomy,
            lexicon,
            pipeline,
        }
    }

    /// Concatenated concept bag of all texts.
    pub fn bag<S: AsRef<str>>(&self, ideas: &[S]) -> ConceptBag {
        let mut bag = ConceptBag::default();
        for idea in ideas {
            bag.extend(self.pipeline.bag(idea.as_ref(), self.taxonomy, self.lexicon));
        }
        bag
    }

    pub fn creativity_quotient<S: AsRef<str>>(&self, ideas: &[S]) -> Result<QScore, TaxonomyError> {
        quotient_of_bag(&self.bag(ideas), self.taxonomy)
    }

    /// Pools the ideas of many participants into one document and scores it.
    pub fn collective_quotient<I, S>(&self, ideas: I) -> Result<QScore, TaxonomyError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let pooled: Vec<S> = ideas.into_iter().collect();
        self.creativity_quotient(&pooled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Taxonomy, Lexicon, TextPipeline) {
        let t = Taxonomy::from_native_str(
            "CONCEPT\tobject\tobject\nCONCEPT\ttool\ttool\nCONCEPT\tart\tart\n\
             CONCEPT\tdoorstop\tdoorstop\nCONCEPT\tweight\tweight\nCONCEPT\tsculpture\tsculpture\n\
             EDGE\ttool\tobject\nEDGE\tart\tobject\nEDGE\tdoorstop\ttool\n\
             EDGE\tweight\ttool\nEDGE\tsculpture\tart\n",
        )
        .unwrap();
        let lex = Lexicon::from_taxonomy(&t);
        (t, lex, TextPipeline::default())
    }

    #[test]
    fn single_concept_scores_one() {
        let (t, lex, p) = fixture();
        let s = CqScorer::new(&t, &lex, &p);
        let q = s.creativity_quotient(&["use it as a doorstop"]).unwrap();
        assert_eq!(
            q,
            QScore {
                concepts: 1,
                multi_information: 0.0,
                q: 1.0
            }
        );
    }

    #[test]
    fn empty_and_unmapped_sets_score_zero() {
        let (t, lex, p) = fixture();
        let s = CqScorer::new(&t, &lex, &p);
        assert_eq!(s.creativity_quotient::<&str>(&[]).unwrap(), QScore::EMPTY);
        assert_eq!(s.creativity_quotient(&["zzz qqq"]).unwrap(), QScore::EMPTY);
        assert_eq!(s.collective_quotient(Vec::<String>::new()).unwrap(), QScore::EMPTY);
    }

    #[test]
    fn duplicate_concepts_join_with_weight_one() {
        let (t, _, _) = fixture();
        let c = ConceptId::new("doorstop").unwrap();
        let bag = ConceptBag {
            concepts: vec![c.clone(), c],
            dropped: vec![],
        };
        let g = similarity_graph(&bag, &t).unwrap();
        assert_eq!(g.weights().edge_count(), 1);
        assert_eq!(g.weight(0, 1), 1.0);
        let q = quotient_of_bag(&bag, &t).unwrap();
        assert_eq!(q.q, 1.0);
    }

    #[test]
    fn collective_of_identical_sets_matches_single() {
        let (t, lex, p) = fixture();
        let s = CqScorer::new(&t, &lex, &p);
        let one = s.creativity_quotient(&["doorstop", "sculpture"]).unwrap();
        let two = s
            .collective_quotient(["doorstop", "sculpture", "doorstop", "sculpture"])
            .unwrap();
        assert!((one.q - two.q).abs() < 1e-12);
        assert_eq!(two.concepts, 4);
    }
}
