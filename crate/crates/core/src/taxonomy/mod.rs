//! Noun taxonomy with intrinsic information content.
//!
//! A [`Taxonomy`] is an immutable DAG of concepts linked by "is a" edges.
//! Hyponym counts are computed once at build time; every query afterwards is
//! a pure read, so a loaded taxonomy can be shared across threads freely.
//!
//! Information content follows the intrinsic (corpus-free) definition
//!
//! ```text
//! I(c) = 1 - ln(h(c) + 1) / ln(w)
//! ```
//!
//! where `h(c)` is the number of distinct proper descendants of `c` and `w`
//! the number of concepts. Leaves carry `I = 1`, a root that subsumes
//! everything carries `I = 0`.

mod lexicon;
mod native;
mod wordnet;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use lexicon::Lexicon;

#[derive(Debug, thiserror::Error)]
pub enum TaxonomyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line} (byte {byte}): {message}")]
    Parse { line: usize, byte: usize, message: String },
    #[error("line {line}: duplicate concept `{id}`")]
    DuplicateConcept { line: usize, id: String },
    #[error("line {line}: reference to undeclared concept `{id}`")]
    DanglingReference { line: usize, id: String },
    #[error("cycle detected through concept `{id}`")]
    Cycle { id: String },
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("taxonomy has {0} concept(s); information content needs at least 2")]
    Degenerate(usize),
    #[error("invalid concept id {0:?}")]
    InvalidId(String),
}

/// Identifier of a concept. For WordNet imports this is the zero-padded
/// synset offset followed by `-n`, e.g. `02913152-n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(token: impl Into<String>) -> Result<Self, TaxonomyError> {
        let token = token.into();
        if token.is_empty() || token.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(TaxonomyError::InvalidId(token));
        }
        Ok(ConceptId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ConceptId {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConceptId::new(s)
    }
}

impl TryFrom<String> for ConceptId {
    type Error = TaxonomyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        ConceptId::new(s)
    }
}

impl From<ConceptId> for String {
    fn from(id: ConceptId) -> String {
        id.0
    }
}

/// On-disk formats accepted by [`Taxonomy::load`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomyFormat {
    /// `CONCEPT<TAB>id<TAB>lemmas` / `EDGE<TAB>child<TAB>parent` records.
    NativeTsv,
    /// Princeton WordNet `data.noun`.
    WordNetNounDb,
}

impl FromStr for TaxonomyFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" | "native-tsv" | "tsv" => Ok(TaxonomyFormat::NativeTsv),
            "wordnet" | "wordnet-noun-db" | "data.noun" => Ok(TaxonomyFormat::WordNetNounDb),
            other => Err(format!("unknown taxonomy format `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    ids: Vec<ConceptId>,
    index: HashMap<ConceptId, usize>,
    lemmas: Vec<Vec<String>>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    hyponyms: Vec<usize>,
    /// Position of each node in a topological order (parents first).
    topo: Vec<usize>,
}

impl Taxonomy {
    pub fn load(path: impl AsRef<Path>, format: TaxonomyFormat) -> Result<Self, TaxonomyError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| TaxonomyError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let io_err = |source| TaxonomyError::Io {
            path: path.to_path_buf(),
            source,
        };
        match format {
            TaxonomyFormat::NativeTsv => native::read(reader).map_err(|e| e.with_io(io_err)),
            TaxonomyFormat::WordNetNounDb => wordnet::read(reader).map_err(|e| e.with_io(io_err)),
        }
    }

    pub fn from_native_str(text: &str) -> Result<Self, TaxonomyError> {
        native::read(text.as_bytes()).map_err(|e| {
            e.with_io(|source| TaxonomyError::Io {
                path: PathBuf::from("<memory>"),
                source,
            })
        })
    }

    pub fn from_wordnet_str(text: &str) -> Result<Self, TaxonomyError> {
        wordnet::read(text.as_bytes()).map_err(|e| {
            e.with_io(|source| TaxonomyError::Io {
                path: PathBuf::from("<memory>"),
                source,
            })
        })
    }

    /// Number of concepts, `w`.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &ConceptId) -> bool {
        self.index.contains_key(id)
    }

    /// Concept ids in load order.
    pub fn ids(&self) -> &[ConceptId] {
        &self.ids
    }

    pub fn lemmas(&self, id: &ConceptId) -> Result<&[String], TaxonomyError> {
        Ok(&self.lemmas[self.index_of(id)?])
    }

    pub fn parents(&self, id: &ConceptId) -> Result<Vec<&ConceptId>, TaxonomyError> {
        let i = self.index_of(id)?;
        Ok(self.parents[i].iter().map(|&p| &self.ids[p]).collect())
    }

    pub fn children(&self, id: &ConceptId) -> Result<Vec<&ConceptId>, TaxonomyError> {
        let i = self.index_of(id)?;
        Ok(self.children[i].iter().map(|&c| &self.ids[c]).collect())
    }

    /// Concepts without parents.
    pub fn roots(&self) -> impl Iterator<Item = &ConceptId> {
        self.parents
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_empty())
            .map(|(i, _)| &self.ids[i])
    }

    /// Number of edges on the longest root-to-node path.
    pub fn max_depth(&self) -> usize {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.topo[i]);
        let mut depth = vec![0usize; self.len()];
        for &i in &order {
            for &c in &self.children[i] {
                depth[c] = depth[c].max(depth[i] + 1);
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// `h(c)`: the number of distinct proper descendants of `c`.
    pub fn hyponym_count(&self, id: &ConceptId) -> Result<usize, TaxonomyError> {
        Ok(self.hyponyms[self.index_of(id)?])
    }

    pub fn information_content(&self, id: &ConceptId) -> Result<f64, TaxonomyError> {
        let i = self.index_of(id)?;
        self.ic_at(i)
    }

    /// Every concept subsuming both arguments, each concept counting as its
    /// own subsumer.
    pub fn common_subsumers(&self, a: &ConceptId, b: &ConceptId) -> Result<BTreeSet<ConceptId>, TaxonomyError> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let left = self.ancestors_or_self(ia);
        let right = self.ancestors_or_self(ib);
        Ok(intersect_sorted(&left, &right).map(|i| self.ids[i].clone()).collect())
    }

    /// Information content of the most specific common abstraction.
    /// Concepts in disjoint components share nothing and score 0.
    pub fn msca_similarity(&self, a: &ConceptId, b: &ConceptId) -> Result<f64, TaxonomyError> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.check_degenerate()?;
        let left = self.ancestors_or_self(ia);
        let right = self.ancestors_or_self(ib);
        Ok(self.msca_of(&left, &right))
    }

    /// `sim(a, b) = 1 - (I(a) + I(b) - 2 * sim_msca(a, b)) / 2`.
    pub fn pair_similarity(&self, a: &ConceptId, b: &ConceptId) -> Result<f64, TaxonomyError> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let profile_a = self.profile(ia)?;
        let profile_b = self.profile(ib)?;
        Ok(self.similarity_of(&profile_a, &profile_b))
    }

    /// Writes the taxonomy in the native TSV format. Concepts come first in
    /// load order, followed by one `EDGE` line per parent link.
    pub fn write_native<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# concepts: {}", self.len())?;
        for (i, id) in self.ids.iter().enumerate() {
            let lemmas: Vec<String> = self.lemmas[i].iter().map(|l| l.replace(',', "")).collect();
            writeln!(out, "CONCEPT\t{}\t{}", id, lemmas.join(","))?;
        }
        for (i, id) in self.ids.iter().enumerate() {
            for &p in &self.parents[i] {
                writeln!(out, "EDGE\t{}\t{}", id, self.ids[p])?;
            }
        }
        Ok(())
    }

    pub(crate) fn index_of(&self, id: &ConceptId) -> Result<usize, TaxonomyError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownConcept(id.to_string()))
    }

    fn check_degenerate(&self) -> Result<(), TaxonomyError> {
        if self.len() < 2 {
            Err(TaxonomyError::Degenerate(self.len()))
        } else {
            Ok(())
        }
    }

    fn ic_at(&self, i: usize) -> Result<f64, TaxonomyError> {
        self.check_degenerate()?;
        Ok(self.ic_unchecked(i))
    }

    fn ic_unchecked(&self, i: usize) -> f64 {
        let w = self.len() as f64;
        let h = self.hyponyms[i] as f64;
        (1.0 - (h + 1.0).ln() / w.ln()).clamp(0.0, 1.0)
    }

    /// Sorted indices of `i` and all of its ancestors.
    fn ancestors_or_self(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([i]);
        while let Some(n) = queue.pop_front() {
            if seen.insert(n) {
                queue.extend(self.parents[n].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    fn msca_of(&self, left: &[usize], right: &[usize]) -> f64 {
        intersect_sorted(left, right)
            .map(|i| self.ic_unchecked(i))
            .fold(0.0, f64::max)
    }

    /// Precomputed pieces of one concept used by repeated similarity queries.
    pub(crate) fn profile(&self, i: usize) -> Result<ConceptProfile, TaxonomyError> {
        self.check_degenerate()?;
        Ok(ConceptProfile {
            index: i,
            ic: self.ic_unchecked(i),
            ancestors: self.ancestors_or_self(i),
        })
    }

    pub(crate) fn similarity_of(&self, a: &ConceptProfile, b: &ConceptProfile) -> f64 {
        if a.index == b.index {
            return 1.0;
        }
        let msca = self.msca_of(&a.ancestors, &b.ancestors);
        (1.0 - (a.ic + b.ic - 2.0 * msca) / 2.0).clamp(0.0, 1.0)
    }

    fn build(builder: TaxonomyBuilder) -> Result<Self, TaxonomyError> {
        let TaxonomyBuilder { concepts, edges } = builder;
        let mut index = HashMap::with_capacity(concepts.len());
        let mut ids = Vec::with_capacity(concepts.len());
        let mut lemmas = Vec::with_capacity(concepts.len());
        for (id, words, line) in concepts {
            if index.contains_key(&id) {
                return Err(TaxonomyError::DuplicateConcept {
                    line,
                    id: id.to_string(),
                });
            }
            index.insert(id.clone(), ids.len());
            ids.push(id);
            lemmas.push(words);
        }

        let n = ids.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (child, parent, line) in edges {
            let resolve = |id: &ConceptId| {
                index.get(id).copied().ok_or_else(|| TaxonomyError::DanglingReference {
                    line,
                    id: id.to_string(),
                })
            };
            let c = resolve(&child)?;
            let p = resolve(&parent)?;
            if c == p {
                return Err(TaxonomyError::Cycle { id: child.to_string() });
            }
            if !parents[c].contains(&p) {
                parents[c].push(p);
                children[p].push(c);
            }
        }

        // Kahn's algorithm; anything left unprocessed sits on a cycle.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = vec![usize::MAX; n];
        let mut next = 0;
        while let Some(i) = queue.pop_front() {
            topo[i] = next;
            next += 1;
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if next < n {
            let stuck = (0..n).find(|&i| topo[i] == usize::MAX).expect("unprocessed node");
            return Err(TaxonomyError::Cycle {
                id: ids[stuck].to_string(),
            });
        }

        let hyponyms = count_descendants(&children);
        Ok(Taxonomy {
            ids,
            index,
            lemmas,
            parents,
            children,
            hyponyms,
            topo,
        })
    }
}

pub(crate) struct ConceptProfile {
    index: usize,
    ic: f64,
    ancestors: Vec<usize>,
}

/// Accumulates concept and edge records before validation.
#[derive(Debug, Default)]
pub(crate) struct TaxonomyBuilder {
    concepts: Vec<(ConceptId, Vec<String>, usize)>,
    edges: Vec<(ConceptId, ConceptId, usize)>,
}

impl TaxonomyBuilder {
    pub(crate) fn concept(&mut self, id: ConceptId, lemmas: Vec<String>, line: usize) {
        self.concepts.push((id, lemmas, line));
    }

    pub(crate) fn edge(&mut self, child: ConceptId, parent: ConceptId, line: usize) {
        self.edges.push((child, parent, line));
    }

    pub(crate) fn finish(self) -> Result<Taxonomy, TaxonomyError> {
        Taxonomy::build(self)
    }
}

/// Reader-level failure: either an I/O error or a taxonomy error.
pub(crate) enum ReadError {
    Io(std::io::Error),
    Taxonomy(TaxonomyError),
}

impl ReadError {
    fn with_io(self, f: impl FnOnce(std::io::Error) -> TaxonomyError) -> TaxonomyError {
        match self {
            ReadError::Io(e) => f(e),
            ReadError::Taxonomy(e) => e,
        }
    }
}

impl From<TaxonomyError> for ReadError {
    fn from(e: TaxonomyError) -> Self {
        ReadError::Taxonomy(e)
    }
}

impl From<std::io::Error> for ReadError {
    fn from(e: std::io::Error) -> Self {
        ReadError::Io(e)
    }
}

/// Iterates a reader line by line, yielding `(line_number, byte_offset, text)`.
pub(crate) fn numbered_lines<R: BufRead>(
    mut reader: R,
) -> impl Iterator<Item = std::io::Result<(usize, usize, String)>> {
    let mut line_no = 0;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let mut buf = String::new();
        match reader.read_line(&mut buf) {
            Ok(0) => None,
            Ok(read) => {
                line_no += 1;
                let start = offset;
                offset += read;
                while buf.ends_with('\n') || buf.ends_with('\r') {
                    buf.pop();
                }
                Some(Ok((line_no, start, buf)))
            }
            Err(e) => Some(Err(e)),
        }
    })
}

/// Distinct-descendant counts via one DFS per node with a shared visit stamp.
/// Total work is proportional to the sum of all descendant-set sizes.
fn count_descendants(children: &[Vec<usize>]) -> Vec<usize> {
    let n = children.len();
    let mut stamp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counts = vec![0; n];
    for root in 0..n {
        if children[root].is_empty() {
            continue;
        }
        stamp[root] = root;
        stack.extend(children[root].iter().copied());
        let mut count = 0;
        while let Some(node) = stack.pop() {
            if stamp[node] == root {
                continue;
            }
            stamp[node] = root;
            count += 1;
            stack.extend(children[node].iter().copied());
        }
        counts[root] = count;
    }
    counts
}

fn intersect_sorted<'a>(a: &'a [usize], b: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let v = a[i];
                    i += 1;
                    j += 1;
                    return Some(v);
                }
            }
        }
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ConceptId {
        ConceptId::new(s).unwrap()
    }

    fn diamond() -> Taxonomy {
        Taxonomy::from_native_str(
            "CONCEPT\troot\t\nCONCEPT\ta\t\nCONCEPT\tb\t\nCONCEPT\td\t\n\
             EDGE\ta\troot\nEDGE\tb\troot\nEDGE\td\ta\nEDGE\td\tb\n",
        )
        .unwrap()
    }

    #[test]
    fn diamond_counts_shared_descendant_once() {
        let t = diamond();
        assert_eq!(t.hyponym_count(&id("root")).unwrap(), 3);
        assert_eq!(t.hyponym_count(&id("a")).unwrap(), 1);
        assert_eq!(t.hyponym_count(&id("d")).unwrap(), 0);
        assert_eq!(t.max_depth(), 2);
    }

    #[test]
    fn information_content_reference_values() {
        let t = diamond();
        assert_eq!(t.information_content(&id("d")).unwrap(), 1.0);
        assert_eq!(t.information_content(&id("root")).unwrap(), 0.0);

        // w = 100 with a node of 9 descendants: 1 - ln 10 / ln 100 = 0.5.
        let mut text = String::new();
        for i in 0..100 {
            text.push_str(&format!("CONCEPT\tn{i}\t\n"));
        }
        for i in 1..10 {
            text.push_str(&format!("EDGE\tn{i}\tn0\n"));
        }
        let t = Taxonomy::from_native_str(&text).unwrap();
        let ic = t.information_content(&id("n0")).unwrap();
        assert!((ic - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_taxonomy_has_no_information_content() {
        let t = Taxonomy::from_native_str("CONCEPT\tonly\tonly\n").unwrap();
        assert!(matches!(
            t.information_content(&id("only")),
            Err(TaxonomyError::Degenerate(1))
        ));
    }

    #[test]
    fn unknown_concept_is_reported() {
        let t = diamond();
        assert!(matches!(
            t.hyponym_count(&id("nope")),
            Err(TaxonomyError::UnknownConcept(_))
        ));
        assert!(t.pair_similarity(&id("a"), &id("nope")).is_err());
    }

    #[test]
    fn subsumers_and_similarity() {
        let t = diamond();
        let s = t.common_subsumers(&id("a"), &id("b")).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![id("root")]);
        let s = t.common_subsumers(&id("d"), &id("d")).unwrap();
        assert!(s.contains(&id("d")));
        assert_eq!(t.pair_similarity(&id("d"), &id("d")).unwrap(), 1.0);
        assert_eq!(t.msca_similarity(&id("a"), &id("b")).unwrap(), 0.0);
    }

    #[test]
    fn disconnected_forest_shares_no_information() {
        let t = Taxonomy::from_native_str("CONCEPT\tx\t\nCONCEPT\ty\t\n").unwrap();
        assert!(t.common_subsumers(&id("x"), &id("y")).unwrap().is_empty());
        assert_eq!(t.msca_similarity(&id("x"), &id("y")).unwrap(), 0.0);
        assert_eq!(t.pair_similarity(&id("x"), &id("y")).unwrap(), 0.0);
    }

    #[test]
    fn concept_id_rejects_empty_and_tabs() {
        assert!(ConceptId::new("").is_err());
        assert!(ConceptId::new("a\tb").is_err());
        assert_eq!("x".parse::<ConceptId>().unwrap().as_str(), "x");
    }

    #[test]
    fn native_round_trip() {
        let t = diamond();
        let mut buf = Vec::new();
        t.write_native(&mut buf).unwrap();
        let again = Taxonomy::from_native_str(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(again.ids(), t.ids());
        for c in t.ids() {
            assert_eq!(again.hyponym_count(c).unwrap(), t.hyponym_count(c).unwrap());
        }
    }
}
