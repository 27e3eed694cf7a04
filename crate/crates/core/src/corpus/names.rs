use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

use super::story::Story;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Male,
    Female,
    Neutral,
}

impl Gender {
    pub fn placeholder(self) -> &'static str {
        match self {
            Gender::Male => "[MALE]",
            Gender::Female => "[FEMALE]",
            Gender::Neutral => "[NEUTRAL]",
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Gender::Male => "M",
            Gender::Female => "F",
            Gender::Neutral => "N",
        }
    }

    fn parse(code: &str) -> Option<Self> {
        match code {
            "M" => Some(Gender::Male),
            "F" => Some(Gender::Female),
            "N" => Some(Gender::Neutral),
            _ => None,
        }
    }
}

/// Single-token person names and their gender; lookups ignore case.
#[derive(Debug, Clone, Default)]
pub struct NameLexicon {
    names: HashMap<String, Gender>,
}

impl NameLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, gender: Gender) -> Result<()> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "name {name:?} is not a single token"
            )));
        }
        self.names.insert(name.to_lowercase(), gender);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<Gender> {
        self.names.get(&token.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Parses `name<TAB>gender` rows.
    pub fn from_reader(reader: impl BufRead, source: &str) -> Result<Self> {
        let mut lex = NameLexicon::new();
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
            let [name, code] = fields[..] else {
                return Err(parse_err(format!("expected 2 fields, found {}", fields.len())));
            };
            let gender = Gender::parse(code.trim())
                .ok_or_else(|| parse_err(format!("unknown gender {code:?}")))?;
            lex.insert(name.trim(), gender).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Rows sorted by name, for writing `names.tsv`.
    pub fn rows(&self) -> Vec<(String, Gender)> {
        let mut rows: Vec<_> = self.names.iter().map(|(n, g)| (n.clone(), *g)).collect();
        rows.sort();
        rows
    }
}

/// Replaces every lexicon name with its gender placeholder.
pub fn delexicalize(story: &Story, names: &NameLexicon) -> Story {
    let mask = |tokens: &[String]| -> Vec<String> {
        tokens
            .iter()
            .map(|t| match names.get(t) {
                Some(g) => g.placeholder().to_string(),
                None => t.clone(),
            })
            .collect()
    };
    Story {
        id: story.id.clone(),
        context: mask(&story.context),
        body: story.body.iter().map(|s| mask(s)).collect(),
    }
}
