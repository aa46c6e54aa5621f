//! Princeton WordNet `data.noun` reader.
//!
//! Only synset offsets, word fields and hypernym pointers (`@`, `@i`) are
//! read. License header lines (leading spaces) are skipped. Pointers to other
//! parts of speech are ignored.

use std::io::BufRead;

use super::{numbered_lines, ConceptId, ReadError, Taxonomy, TaxonomyBuilder, TaxonomyError};

pub(crate) fn synset_id(offset: &str) -> String {
    format!("{offset}-n")
}

pub(crate) fn read<R: BufRead>(reader: R) -> Result<Taxonomy, ReadError> {
    let mut builder = TaxonomyBuilder::default();
    for item in numbered_lines(reader) {
        let (line, byte, text) = item?;
        if text.starts_with(' ') || text.trim().is_empty() {
            continue;
        }
        let parsed = parse_synset(&text).map_err(|message| TaxonomyError::Parse { line, byte, message })?;
        let id = ConceptId::new(synset_id(parsed.offset)).expect("offset is non-empty");
        builder.concept(id.clone(), parsed.lemmas, line);
        for target in parsed.hypernyms {
            let parent = ConceptId::new(synset_id(target)).expect("offset is non-empty");
            builder.edge(id.clone(), parent, line);
        }
    }
    Ok(builder.finish()?)
}

struct Synset<'a> {
    offset: &'a str,
    lemmas: Vec<String>,
    hypernyms: Vec<&'a str>,
}

fn parse_synset(text: &str) -> Result<Synset<'_>, String> {
    let body = text.split(" | ").next().unwrap_or(text);
    let mut tokens = body.split_whitespace();
    let mut next = |what: &str| tokens.next().ok_or_else(|| format!("missing {what}"));

    let offset = next("synset offset")?;
    if offset.is_empty() || !offset.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad synset offset {offset:?}"));
    }
    next("lexicographer file number")?;
    let ss_type = next("synset type")?;
    if ss_type != "n" {
        return Err(format!("synset type {ss_type:?} is not a noun"));
    }
    let w_cnt = next("word count")?;
    let w_cnt = usize::from_str_radix(w_cnt, 16).map_err(|_| format!("bad word count {w_cnt:?}"))?;
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = next("word")?.to_lowercase();
        next("lex_id")?;
        if !lemmas.contains(&word) {
            lemmas.push(word);
        }
    }
    let p_cnt = next("pointer count")?;
    let p_cnt: usize = p_cnt.parse().map_err(|_| format!("bad pointer count {p_cnt:?}"))?;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = next("pointer symbol")?;
        let target = next("pointer offset")?;
        let pos = next("pointer part of speech")?;
        next("pointer source/target")?;
        if (symbol == "@" || symbol == "@i") && pos == "n" {
            hypernyms.push(target);
        }
    }
    Ok(Synset {
        offset,
        lemmas,
        hypernyms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r"  1 This software and database is being provided to you, the LICENSEE, by
  2 Princeton University under the following license.
00001740 03 n 01 entity 0 003 ~ 00001930 n 0000 ~ 00002137 n 0000 ~ 04431553 n 0000 | that which is perceived
00001930 03 n 01 physical_entity 0 002 @ 00001740 n 0000 ~ 00002452 n 0000 | an entity that has physical existence
00002137 03 n 02 abstraction 0 abstract_entity 0 001 @ 00001740 n 0000 | a general concept
00002452 03 n 01 thing 0 002 @ 00001930 n 0000 + 01234567 v 0101 | a separate and self-contained entity
";

    #[test]
    fn reads_synsets_and_hypernyms() {
        let t = Taxonomy::from_wordnet_str(SAMPLE).unwrap();
        assert_eq!(t.len(), 4);
        let entity = ConceptId::new("00001740-n").unwrap();
        assert_eq!(t.hyponym_count(&entity).unwrap(), 3);
        let abstraction = ConceptId::new("00002137-n").unwrap();
        assert_eq!(t.lemmas(&abstraction).unwrap(), ["abstraction", "abstract_entity"]);
        assert_eq!(t.max_depth(), 2);
    }

    #[test]
    fn hyponym_pointers_do_not_create_edges() {
        // `~` pointers are the inverse of `@`; reading both would double edges.
        let t = Taxonomy::from_wordnet_str(SAMPLE).unwrap();
        let thing = ConceptId::new("00002452-n").unwrap();
        assert_eq!(t.parents(&thing).unwrap().len(), 1);
    }

    #[test]
    fn truncated_synset_line_is_a_parse_error() {
        let err = Taxonomy::from_wordnet_str("00001740 03 n 02 entity 0\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::Parse { line: 1, byte: 0, .. }), "{err}");
    }

    #[test]
    fn hypernym_to_missing_synset_dangles() {
        let err = Taxonomy::from_wordnet_str("00001930 03 n 01 x 0 001 @ 00009999 n 0000 | g\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::DanglingReference { .. }));
    }
}
