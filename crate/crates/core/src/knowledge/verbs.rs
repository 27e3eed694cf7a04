use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use super::verb_data::{DOUBLING, IRREGULAR, REGULAR};
use crate::error::{Error, Result};

pub const BE_FORMS: [&str; 8] = ["am", "is", "are", "was", "were", "be", "been", "being"];
pub const MODALS: [&str; 9] = ["will", "would", "shall", "should", "can", "could", "may", "might", "must"];

/// `word not` -> contracted form.
const CONTRACTIONS: [(&str, &str); 19] = [
    ("is", "isn't"),
    ("are", "aren't"),
    ("was", "wasn't"),
    ("were", "weren't"),
    ("do", "don't"),
    ("does", "doesn't"),
    ("did", "didn't"),
    ("have", "haven't"),
    ("has", "hasn't"),
    ("had", "hadn't"),
    ("will", "won't"),
    ("would", "wouldn't"),
    ("shall", "shan't"),
    ("should", "shouldn't"),
    ("can", "can't"),
    ("could", "couldn't"),
    ("might", "mightn't"),
    ("must", "mustn't"),
    ("need", "needn't"),
];

/// Position of a surface form within an inflection row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VerbSlot {
    Base,
    ThirdSingular,
    Past,
    PastParticiple,
    Gerund,
}

impl VerbSlot {
    /// Reverse-lookup preference order for forms that fill several slots.
    pub const PRIORITY: [VerbSlot; 5] = [
        VerbSlot::Base,
        VerbSlot::ThirdSingular,
        VerbSlot::Past,
        VerbSlot::PastParticiple,
        VerbSlot::Gerund,
    ];
}

/// Verb categories that select a negation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerbClass {
    Be,
    Modal,
    Base,
    ThirdSingular,
    Past,
    PastParticiple,
    Gerund,
    NotVerb,
}

impl From<VerbSlot> for VerbClass {
    fn from(slot: VerbSlot) -> Self {
        match slot {
            VerbSlot::Base => VerbClass::Base,
            VerbSlot::ThirdSingular => VerbClass::ThirdSingular,
            VerbSlot::Past => VerbClass::Past,
            VerbSlot::PastParticiple => VerbClass::PastParticiple,
            VerbSlot::Gerund => VerbClass::Gerund,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbForms {
    pub base: String,
    pub third_singular: String,
    pub past: String,
    pub past_participle: String,
    pub gerund: String,
}

impl VerbForms {
    pub fn get(&self, slot: VerbSlot) -> &str {
        match slot {
            VerbSlot::Base => &self.base,
            VerbSlot::ThirdSingular => &self.third_singular,
            VerbSlot::Past => &self.past,
            VerbSlot::PastParticiple => &self.past_participle,
            VerbSlot::Gerund => &self.gerund,
        }
    }

    /// Forms of a regular verb.
    pub fn regular(base: &str) -> Self {
        let past = past_tense(base);
        VerbForms {
            base: base.to_string(),
            third_singular: third_singular(base),
            past_participle: past.clone(),
            past,
            gerund: gerund(base),
        }
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn vowel_groups(word: &str) -> usize {
    let b = word.as_bytes();
    let mut groups = 0;
    let mut prev = false;
    for (i, &c) in b.iter().enumerate() {
        let v = is_vowel(c) || (c == b'y' && i > 0);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    groups
}

/// Consonant-vowel-consonant ending whose last letter doubles before a suffix.
fn doubles_final(base: &str) -> bool {
    if DOUBLING.contains(&base) {
        return true;
    }
    let b = base.as_bytes();
    if b.len() < 3 || vowel_groups(base) != 1 {
        return false;
    }
    let (c1, v, c2) = (b[b.len() - 3], b[b.len() - 2], b[b.len() - 1]);
    !is_vowel(c1) && is_vowel(v) && !is_vowel(c2) && !matches!(c2, b'w' | b'x' | b'y')
}

fn consonant_y(base: &str) -> bool {
    let b = base.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !is_vowel(b[b.len() - 2])
}

fn third_singular(base: &str) -> String {
    if consonant_y(base) {
        format!("{}ies", &base[..base.len() - 1])
    } else if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| base.ends_with(s)) {
        format!("{base}es")
    } else {
        format!("{base}s")
    }
}

fn past_tense(base: &str) -> String {
    if base.ends_with('e') {
        format!("{base}d")
    } else if consonant_y(base) {
        format!("{}ied", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ed", &base[base.len() - 1..])
    } else {
        format!("{base}ed")
    }
}

fn gerund(base: &str) -> String {
    if let Some(stem) = base.strip_suffix("ie") {
        format!("{stem}ying")
    } else if base.ends_with('e') && !["ee", "ye", "oe"].iter().any(|s| base.ends_with(s)) && base.len() > 2 {
        format!("{}ing", &base[..base.len() - 1])
    } else if doubles_final(base) {
        format!("{base}{}ing", &base[base.len() - 1..])
    } else {
        format!("{base}ing")
    }
}

/// Inflection rows with a reverse index from surface form to `(row, slot)`,
/// plus the be-forms, modals and `n't` contractions.
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    rows: Vec<VerbForms>,
    by_base: HashMap<String, usize>,
    reverse: HashMap<String, Vec<(usize, VerbSlot)>>,
}

impl Default for VerbLexicon {
    fn default() -> Self {
        Self::bundled()
    }
}

impl VerbLexicon {
    pub fn empty() -> Self {
        VerbLexicon {
            rows: Vec::new(),
            by_base: HashMap::new(),
            reverse: HashMap::new(),
        }
    }

    /// The bundled inventory of irregular and regular verbs.
    pub fn bundled() -> Self {
        let mut lex = Self::empty();
        for line in IRREGULAR.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let regular = VerbForms::regular(f[0]);
            lex.push(VerbForms {
                base: f[0].to_string(),
                third_singular: f.get(3).map_or(regular.third_singular, |s| s.to_string()),
                past: f[1].to_string(),
                past_participle: f[2].to_string(),
                gerund: f.get(4).map_or(regular.gerund, |s| s.to_string()),
            });
        }
        for base in REGULAR.split_whitespace() {
            lex.push(VerbForms::regular(base));
        }
        lex
    }

    /// Adds a row unless its base form is already present. Returns whether
    /// the row was added.
    pub fn push(&mut self, forms: VerbForms) -> bool {
        if self.by_base.contains_key(&forms.base) {
            return false;
        }
        let idx = self.rows.len();
        self.by_base.insert(forms.base.clone(), idx);
        for slot in VerbSlot::PRIORITY {
            let entry = self.reverse.entry(forms.get(slot).to_string()).or_default();
            if !entry.contains(&(idx, slot)) {
                entry.push((idx, slot));
            }
        }
        self.rows.push(forms);
        true
    }

    /// Parses `base<TAB>third_sg<TAB>past<TAB>past_participle<TAB>gerund` rows.
    pub fn from_reader(reader: impl BufRead, source: &str) -> Result<Self> {
        let mut lex = Self::empty();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').map(str::trim).collect();
            if f.len() != 5 || f.iter().any(|s| s.is_empty()) {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: i + 1,
                    message: "expected 5 non-empty tab-separated verb forms".into(),
                });
            }
            lex.push(VerbForms {
                base: f[0].to_lowercase(),
                third_singular: f[1].to_lowercase(),
                past: f[2].to_lowercase(),
                past_participle: f[3].to_lowercase(),
                gerund: f[4].to_lowercase(),
            });
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn rows(&self) -> &[VerbForms] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Preferred `(row, slot)` for a surface form.
    pub fn lookup(&self, form: &str) -> Option<(&VerbForms, VerbSlot)> {
        let entries = self.reverse.get(form)?;
        let &(idx, slot) = entries
            .iter()
            .min_by_key(|(idx, slot)| (VerbSlot::PRIORITY.iter().position(|s| s == slot), *idx))?;
        Some((&self.rows[idx], slot))
    }

    /// Whether any row has `form` in `slot`.
    pub fn fills_slot(&self, form: &str, slot: VerbSlot) -> bool {
        self.reverse
            .get(form)
            .is_some_and(|e| e.iter().any(|&(_, s)| s == slot))
    }

    pub fn forms(&self, base: &str) -> Option<&VerbForms> {
        self.by_base.get(base).map(|&i| &self.rows[i])
    }

    pub fn base_of(&self, form: &str) -> Option<&str> {
        self.lookup(form).map(|(row, _)| row.base.as_str())
    }

    pub fn inflect(&self, base: &str, slot: VerbSlot) -> Option<&str> {
        self.forms(base).map(|row| row.get(slot))
    }

    pub fn classify(&self, token: &str) -> VerbClass {
        if is_be(token) {
            VerbClass::Be
        } else if is_modal(token) {
            VerbClass::Modal
        } else {
            self.lookup(token)
                .map_or(VerbClass::NotVerb, |(_, slot)| slot.into())
        }
    }

    /// Contracted form of `word not`, e.g. `was` -> `wasn't`.
    pub fn contract(&self, word: &str) -> Option<&'static str> {
        CONTRACTIONS.iter().find(|(w, _)| *w == word).map(|(_, c)| *c)
    }

    /// Splits a negative contraction into its verb, e.g. `won't` -> `will`.
    pub fn expand(&self, token: &str) -> Option<String> {
        if token == "cannot" {
            return Some("can".into());
        }
        if let Some(&(w, _)) = CONTRACTIONS.iter().find(|(_, c)| *c == token) {
            return Some(w.to_string());
        }
        let stem = token.strip_suffix("n't")?;
        let known = is_be(stem) || is_modal(stem) || self.lookup(stem).is_some();
        known.then(|| stem.to_string())
    }

    /// Every surface form, sorted; used by tests and fixture builders.
    pub fn surface_forms(&self) -> BTreeSet<&str> {
        self.reverse.keys().map(String::as_str).collect()
    }
}

pub fn is_be(token: &str) -> bool {
    BE_FORMS.contains(&token)
}

pub fn is_modal(token: &str) -> bool {
    MODALS.contains(&token)
}

/// Verb class of a single token.
pub fn classify_verb(token: &str, lex: &VerbLexicon) -> VerbClass {
    lex.classify(token)
}
