//! Negative sampling: four story perturbations and the mixer that combines
//! them into one negative sample per story.

mod mixer;
mod negation;
mod pairs;
mod reorder;
mod repetition;
mod substitution;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Story;
use crate::knowledge::{FrequencyTable, KnowledgeBase, PosLexicon, VerbLexicon};

pub use mixer::{build_training_set, make_negative, MixerConfig, TechniqueWeights, TrainingSet};
pub use negation::{add_negation, alter_negation, find_negation_target, has_negation, remove_negation, NegationRule};
pub use pairs::{load_pairs, read_pairs, write_pairs, PairRecord, PairStory};
pub use reorder::reorder;
pub use repetition::{repeat_ngram, repeat_ngram_at, repeat_sentence, repeat_sentence_at, repetition};
pub use substitution::{substitute, substitute_sentence, substitute_words, SubstitutionMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Technique {
    Repetition,
    Substitution,
    Reordering,
    Negation,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Repetition,
        Technique::Substitution,
        Technique::Reordering,
        Technique::Negation,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Repetition => "REPETITION",
            Technique::Substitution => "SUBSTITUTION",
            Technique::Reordering => "REORDERING",
            Technique::Negation => "NEGATION",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Technique::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown technique {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubMode {
    Ngram,
    Sentence,
    Word,
    Permute,
    Add,
    Remove,
}

/// Provenance of one change applied to a story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub technique: Technique,
    pub sub_mode: SubMode,
    /// Body sentence index in the story state the edit was applied to.
    pub sentence: usize,
    /// Token span `[start, end)` of `before` within that sentence; `None` for
    /// whole-body permutations.
    pub span: Option<[usize; 2]>,
    pub before: String,
    pub after: String,
}

impl Edit {
    /// Edit covering the smallest differing token window of one sentence.
    pub(crate) fn sentence_diff(
        technique: Technique,
        sub_mode: SubMode,
        sentence: usize,
        before: &[String],
        after: &[String],
    ) -> Self {
        let prefix = before.iter().zip(after).take_while(|(a, b)| a == b).count();
        let max_suffix = before.len().min(after.len()) - prefix;
        let suffix = before
            .iter()
            .rev()
            .zip(after.iter().rev())
            .take(max_suffix)
            .take_while(|(a, b)| a == b)
            .count();
        Edit {
            technique,
            sub_mode,
            sentence,
            span: Some([prefix, before.len() - suffix]),
            before: before[prefix..before.len() - suffix].join(" "),
            after: after[prefix..after.len() - suffix].join(" "),
        }
    }
}

/// A scorer training example: input story `s`, original `r`, label `y`
/// (1 for human-written, 0 for perturbed) and the edits that produced `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPair {
    pub s: Story,
    pub r: Story,
    pub y: u8,
    pub edits: Vec<Edit>,
}

impl TrainingPair {
    pub fn positive(story: &Story) -> Self {
        TrainingPair {
            s: story.clone(),
            r: story.clone(),
            y: 1,
            edits: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.r.id
    }

    /// Techniques in the order they were applied.
    pub fn techniques(&self) -> Vec<Technique> {
        let mut out: Vec<Technique> = Vec::new();
        for e in &self.edits {
            if !out.contains(&e.technique) {
                out.push(e.technique);
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        match self.y {
            1 => self.s == self.r && self.edits.is_empty(),
            0 => self.s != self.r && !self.edits.is_empty(),
            _ => false,
        }
    }
}

/// Shared read-only resources for the perturbation techniques.
#[derive(Debug, Clone, Copy)]
pub struct PerturbContext<'a> {
    pub kb: &'a KnowledgeBase,
    pub ft: &'a FrequencyTable,
    pub pos: &'a PosLexicon,
    pub verbs: &'a VerbLexicon,
    /// Stories that sentence-level substitution may borrow from.
    pub pool: &'a [Story],
}
