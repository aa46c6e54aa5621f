use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{numbered_lines, wordnet, ConceptId, ReadError, Taxonomy, TaxonomyError};

/// Word to concept senses, most preferred sense first.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    senses: HashMap<String, Vec<ConceptId>>,
}

impl Lexicon {
    /// Builds a lexicon from the taxonomy's own lemmas. A word's senses are
    /// listed in taxonomy load order.
    pub fn from_taxonomy(taxonomy: &Taxonomy) -> Self {
        let mut senses: HashMap<String, Vec<ConceptId>> = HashMap::new();
        for (i, id) in taxonomy.ids.iter().enumerate() {
            for lemma in &taxonomy.lemmas[i] {
                let entry = senses.entry(lemma.clone()).or_default();
                if !entry.contains(id) {
                    entry.push(id.clone());
                }
            }
        }
        Lexicon { senses }
    }

    /// Builds a lexicon from `(word, senses)` pairs; every sense must exist
    /// in `taxonomy`.
    pub fn from_entries<I, W, S>(entries: I, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = (W, S)>,
        W: AsRef<str>,
        S: IntoIterator<Item = ConceptId>,
    {
        let mut lexicon = Lexicon::default();
        for (line, (word, senses)) in entries.into_iter().enumerate() {
            let senses: Vec<ConceptId> = senses.into_iter().collect();
            lexicon.insert(word.as_ref(), senses, taxonomy, line + 1)?;
        }
        Ok(lexicon)
    }

    /// Reads `word<TAB>concept-id[,concept-id...]` lines. Sense order is kept.
    pub fn read<R: BufRead>(reader: R, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError> {
        Self::read_inner(reader, taxonomy).map_err(|e| match e {
            ReadError::Io(source) => TaxonomyError::Io {
                path: "<lexicon>".into(),
                source,
            },
            ReadError::Taxonomy(e) => e,
        })
    }

    pub fn load(path: impl AsRef<Path>, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| TaxonomyError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read(BufReader::new(file), taxonomy).map_err(|e| match e {
            TaxonomyError::Io { source, .. } => TaxonomyError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    fn read_inner<R: BufRead>(reader: R, taxonomy: &Taxonomy) -> Result<Self, ReadError> {
        let mut lexicon = Lexicon::default();
        for item in numbered_lines(reader) {
            let (line, byte, text) = item?;
            if text.trim().is_empty() || text.starts_with('#') {
                continue;
            }
            let Some((word, ids)) = text.split_once('\t') else {
                return Err(TaxonomyError::Parse {
                    line,
                    byte,
                    message: "expected `word<TAB>concept-ids`".into(),
                }
                .into());
            };
            let senses = ids
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    ConceptId::new(s).map_err(|_| TaxonomyError::Parse {
                        line,
                        byte,
                        message: format!("invalid concept id {s:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            lexicon.insert(word, senses, taxonomy, line)?;
        }
        Ok(lexicon)
    }

    /// Reads a WordNet `index.noun` file, which lists each lemma's synsets in
    /// sense-frequency order.
    pub fn read_wordnet_index<R: BufRead>(reader: R, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError> {
        let mut lexicon = Lexicon::default();
        for item in numbered_lines(reader) {
            let (line, byte, text) = item.map_err(|source| TaxonomyError::Io {
                path: "<index.noun>".into(),
                source,
            })?;
            if text.starts_with(' ') || text.trim().is_empty() {
                continue;
            }
            let parse_err = |message: &str| TaxonomyError::Parse {
                line,
                byte,
                message: message.to_string(),
            };
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() < 4 {
                return Err(parse_err("truncated index entry"));
            }
            let synset_cnt: usize = tokens[2].parse().map_err(|_| parse_err("bad synset_cnt"))?;
            if tokens.len() < synset_cnt {
                return Err(parse_err("truncated index entry"));
            }
            let offsets = &tokens[tokens.len() - synset_cnt..];
            let senses = offsets
                .iter()
                .map(|o| ConceptId::new(wordnet::synset_id(o)).map_err(|_| parse_err("bad offset")))
                .collect::<Result<Vec<_>, _>>()?;
            lexicon.insert(tokens[0], senses, taxonomy, line)?;
        }
        Ok(lexicon)
    }

    fn insert(
        &mut self,
        word: &str,
        senses: Vec<ConceptId>,
        taxonomy: &Taxonomy,
        line: usize,
    ) -> Result<(), TaxonomyError> {
        let word = word.trim().to_lowercase();
        let entry = self.senses.entry(word).or_default();
        for id in senses {
            if !taxonomy.contains(&id) {
                return Err(TaxonomyError::DanglingReference {
                    line,
                    id: id.to_string(),
                });
            }
            if !entry.contains(&id) {
                entry.push(id);
            }
        }
        Ok(())
    }

    pub fn senses(&self, word: &str) -> &[ConceptId] {
        self.senses.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn first_sense(&self, word: &str) -> Option<&ConceptId> {
        self.senses(word).first()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.senses.get(word).is_some_and(|s| !s.is_empty())
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    /// Writes the lexicon file format, words sorted.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut words: Vec<&String> = self.senses.keys().collect();
        words.sort();
        for word in words {
            let ids: Vec<&str> = self.senses[word].iter().map(ConceptId::as_str).collect();
            writeln!(out, "{word}\t{}", ids.join(","))?;
        }
        Ok(())
    }
}
