use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Relations whose endpoints count as antonyms of each other.
pub const NEGATED_RELATIONS: [&str; 4] = ["Antonym", "NotDesires", "NotCapableOf", "NotHasProperty"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

/// Deduplicated triples with the keyword set and a symmetric antonym map.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    triples: BTreeSet<Triple>,
    keywords: BTreeSet<String>,
    antonyms: BTreeMap<String, BTreeSet<String>>,
}

fn is_negated(relation: &str) -> bool {
    NEGATED_RELATIONS.iter().any(|r| r.eq_ignore_ascii_case(relation))
}

fn is_single_token(concept: &str) -> bool {
    !concept.is_empty() && !concept.contains(|c: char| c.is_whitespace() || c == '_')
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a triple. Multi-word concepts are rejected and reported as
    /// `false`; the triple is otherwise stored (duplicates collapse).
    pub fn insert(&mut self, head: &str, relation: &str, tail: &str) -> bool {
        let head = head.trim().to_lowercase();
        let tail = tail.trim().to_lowercase();
        if !is_single_token(&head) || !is_single_token(&tail) {
            return false;
        }
        if is_negated(relation) && head != tail {
            self.antonyms.entry(head.clone()).or_default().insert(tail.clone());
            self.antonyms.entry(tail.clone()).or_default().insert(head.clone());
        }
        self.keywords.insert(head.clone());
        self.keywords.insert(tail.clone());
        self.triples.insert(Triple {
            head,
            relation: relation.trim().to_string(),
            tail,
        });
        true
    }

    /// Parses `head<TAB>relation<TAB>tail` rows.
    pub fn from_reader(reader: impl BufRead, source: &str) -> Result<Self> {
        let mut kb = KnowledgeBase::new();
        let mut dropped = 0usize;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [head, relation, tail] = fields[..] else {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: i + 1,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            };
            if relation.trim().is_empty() {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: i + 1,
                    message: "empty relation".into(),
                });
            }
            if !kb.insert(head, relation, tail) {
                dropped += 1;
            }
        }
        if dropped > 0 {
            log::warn!("{source}: dropped {dropped} triples with multi-word concepts");
        }
        Ok(kb)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn keywords(&self) -> &BTreeSet<String> {
        &self.keywords
    }

    pub fn is_keyword(&self, token: &str) -> bool {
        self.keywords.contains(token)
    }

    pub fn antonyms(&self, keyword: &str) -> Option<&BTreeSet<String>> {
        self.antonyms.get(keyword)
    }
}

/// Antonyms of `keyword` in either triple direction; empty when none.
pub fn antonyms(kb: &KnowledgeBase, keyword: &str) -> BTreeSet<String> {
    kb.antonyms(keyword).cloned().unwrap_or_default()
}
