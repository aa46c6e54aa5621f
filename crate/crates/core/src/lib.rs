//! Creativity and follower-network analytics.
//!
//! The crate is organized around the pipeline used to study how the
//! visibility of idea generators in a bipartite follower network shapes
//! creative output:
//!
//! * [`taxonomy`]: a noun taxonomy (native TSV or WordNet `data.noun`) with
//!   hyponym counts, intrinsic information content and concept similarity.
//! * [`textpipe`]: raw idea text to a bag of taxonomy concepts.
//! * [`metrics`]: Creativity Quotient, non-redundant idea counts and
//!   Jaccard overlaps.
//! * [`netmetrics`]: follower shares and Gini decentralization.
//! * [`engine`]: a seeded simulator of the four-condition ego/alter
//!   protocol.
//! * [`stats`]: Pearson, Kruskal-Wallis, Wilcoxon rank-sum and Holm.
//! * [`dataset`]: the shared delimited file formats.
//! * [`analysis`]: dataset-level scoring units and the comparison battery.
//!
//! ```
//! use creanet::taxonomy::{Lexicon, Taxonomy};
//! use creanet::metrics::CqScorer;
//! use creanet::textpipe::TextPipeline;
//!
//! let taxonomy = Taxonomy::from_native_str(
//!     "CONCEPT\tobject\tobject\n\
//!      CONCEPT\ttool\ttool\n\
//!      CONCEPT\tdoorstop\tdoorstop\n\
//!      CONCEPT\tweight\tweight,paperweight\n\
//!      EDGE\ttool\tobject\n\
//!      EDGE\tdoorstop\ttool\n\
//!      EDGE\tweight\ttool\n",
//! )?;
//! let lexicon = Lexicon::from_taxonomy(&taxonomy);
//! let pipeline = TextPipeline::default();
//! let scorer = CqScorer::new(&taxonomy, &lexicon, &pipeline);
//!
//! let q = scorer.creativity_quotient(&["a doorstop", "a paperweight"])?;
//! assert_eq!(q.concepts, 2);
//! assert!(q.q >= 1.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod dataset;
pub mod engine;
pub mod metrics;
pub mod netmetrics;
pub mod stats;
pub mod taxonomy;
pub mod textpipe;

mod error;

pub use error::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;
