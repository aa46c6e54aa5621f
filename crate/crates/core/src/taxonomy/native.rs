//! `CONCEPT<TAB>id<TAB>lemma,lemma` and `EDGE<TAB>child<TAB>parent` records,
//! one per line. Blank lines and lines starting with `#` are skipped.

use std::io::BufRead;

use super::{numbered_lines, ConceptId, ReadError, Taxonomy, TaxonomyBuilder, TaxonomyError};

pub(crate) fn read<R: BufRead>(reader: R) -> Result<Taxonomy, ReadError> {
    let mut builder = TaxonomyBuilder::default();
    for item in numbered_lines(reader) {
        let (line, byte, text) = item?;
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split('\t').collect();
        let parse_err = |message: String| TaxonomyError::Parse { line, byte, message };
        let concept_id = |s: &str| ConceptId::new(s.trim()).map_err(|_| parse_err(format!("invalid concept id {s:?}")));
        match fields.as_slice() {
            ["CONCEPT", id] => builder.concept(concept_id(id)?, Vec::new(), line),
            ["CONCEPT", id, lemmas] => builder.concept(concept_id(id)?, split_lemmas(lemmas), line),
            ["EDGE", child, parent] => builder.edge(concept_id(child)?, concept_id(parent)?, line),
            [kind @ ("CONCEPT" | "EDGE"), ..] => {
                return Err(parse_err(format!("{kind} record has {} field(s)", fields.len())).into())
            }
            [kind, ..] => return Err(parse_err(format!("unknown record type {kind:?}")).into()),
            [] => unreachable!("split yields at least one field"),
        }
    }
    Ok(builder.finish()?)
}

fn split_lemmas(field: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for lemma in field.split(',') {
        let lemma = lemma.trim().to_lowercase();
        if !lemma.is_empty() && !out.contains(&lemma) {
            out.push(lemma);
        }
    }
    out
}
