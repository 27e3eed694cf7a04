use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "NOUN" => Ok(PosTag::Noun),
            "VERB" => Ok(PosTag::Verb),
            "ADJ" => Ok(PosTag::Adj),
            "ADV" => Ok(PosTag::Adv),
            "OTHER" => Ok(PosTag::Other),
            _ => Err(format!("unknown POS tag {s:?}")),
        }
    }
}

const CLOSED_CLASS: &[&str] = &[
    // determiners and quantifiers
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every", "no",
    "all", "both", "either", "neither", "another", "such", "much", "many", "few", "several",
    // pronouns
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
    "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our",
    "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "who", "whom",
    "whose", "which", "what", "someone", "somebody", "something", "anyone", "anybody",
    "anything", "everyone", "everybody", "everything", "nobody", "nothing", "one",
    // prepositions
    "at", "by", "for", "from", "in", "into", "of", "off", "on", "onto", "out", "over", "to",
    "up", "down", "with", "without", "about", "above", "across", "after", "against", "along",
    "among", "around", "before", "behind", "below", "beneath", "beside", "between", "beyond",
    "during", "except", "inside", "near", "outside", "through", "toward", "towards", "under",
    "until", "upon", "within", "via",
    // conjunctions and particles
    "and", "or", "but", "nor", "so", "yet", "if", "because", "although", "though", "while",
    "when", "where", "whether", "than", "as", "then", "not", "n't", "'s", "'m", "'re", "'ve",
    "'ll", "'d",
    // auxiliaries and modals
    "am", "is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have", "has",
    "had", "will", "would", "shall", "should", "can", "could", "may", "might", "must",
    // placeholders
    "[MALE]", "[FEMALE]", "[NEUTRAL]",
];

/// Lexicon-first coarse tagger with suffix rules for unknown words.
#[derive(Debug, Clone)]
pub struct PosLexicon {
    tags: HashMap<String, PosTag>,
    closed: HashSet<String>,
}

impl Default for PosLexicon {
    fn default() -> Self {
        PosLexicon {
            tags: HashMap::new(),
            closed: CLOSED_CLASS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PosLexicon {
    /// Bundled closed-class list, no open-class entries.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, tag: PosTag) {
        self.tags.insert(token.to_string(), tag);
    }

    pub fn is_closed_class(&self, token: &str) -> bool {
        self.closed.contains(token) || !token.chars().any(char::is_alphabetic)
    }

    pub fn tag(&self, token: &str) -> PosTag {
        if self.is_closed_class(token) {
            return PosTag::Other;
        }
        if let Some(&tag) = self.tags.get(token) {
            return tag;
        }
        suffix_tag(token)
    }

    /// Explicit `(token, tag)` entries sorted by token.
    pub fn rows(&self) -> Vec<(String, PosTag)> {
        let mut rows: Vec<_> = self.tags.iter().map(|(t, g)| (t.clone(), *g)).collect();
        rows.sort();
        rows
    }

    /// Parses `token<TAB>tag` rows on top of the bundled closed-class list.
    pub fn from_reader(reader: impl BufRead, source: &str) -> Result<Self> {
        let mut lex = PosLexicon::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [token, tag] = fields[..] else {
                return Err(parse_err(format!("expected 2 fields, found {}", fields.len())));
            };
            let tag = tag.trim().parse().map_err(parse_err)?;
            lex.insert(token.trim(), tag);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string())
    }
}

fn suffix_tag(token: &str) -> PosTag {
    if token.ends_with("ly") {
        PosTag::Adv
    } else if token.ends_with("ing") || token.ends_with("ed") {
        PosTag::Verb
    } else if ["ous", "ful"].iter().any(|s| token.ends_with(s)) || (token.len() > 6 && token.ends_with("able")) {
        PosTag::Adj
    } else {
        PosTag::Noun
    }
}

/// One tag per token.
pub fn pos_tag<S: AsRef<str>>(tokens: &[S], lex: &PosLexicon) -> Vec<PosTag> {
    tokens.iter().map(|t| lex.tag(t.as_ref())).collect()
}
