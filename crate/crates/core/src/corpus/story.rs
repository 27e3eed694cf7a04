use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::tokenize::{split_sentences, tokenize};
use crate::error::{Error, Result};

/// Number of human judges per annotated story.
pub const ANNOTATORS: usize = 7;

/// A leading context plus the ordered body sentences that continue it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Story {
    pub id: String,
    pub context: Vec<String>,
    pub body: Vec<Vec<String>>,
}

impl Story {
    /// Builds a story from token sequences, checking the structural invariants.
    pub fn new(id: impl Into<String>, context: Vec<String>, body: Vec<Vec<String>>) -> Result<Self> {
        let story = Story {
            id: id.into(),
            context,
            body,
        };
        story.validate()?;
        Ok(story)
    }

    /// Tokenizes raw context text and body sentences. Body entries that hold
    /// more than one sentence are split further; empty entries are dropped.
    pub fn from_text<S: AsRef<str>>(id: impl Into<String>, context: &str, body: &[S]) -> Result<Self> {
        let body = body
            .iter()
            .flat_map(|s| split_sentences(s.as_ref()))
            .map(|s| tokenize(&s))
            .filter(|t| !t.is_empty())
            .collect();
        Story::new(id, tokenize(context), body)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: &str| {
            Err(Error::InvalidStory {
                id: self.id.clone(),
                message: message.to_string(),
            })
        };
        if self.body.is_empty() {
            return fail("body has no sentences");
        }
        if self.body.iter().any(Vec::is_empty) {
            return fail("body contains an empty sentence");
        }
        let bad_token = |t: &String| t.is_empty() || t.chars().any(char::is_whitespace);
        if self.context.iter().chain(self.body.iter().flatten()).any(bad_token) {
            return fail("token is empty or contains whitespace");
        }
        Ok(())
    }

    pub fn body_tokens(&self) -> impl Iterator<Item = &String> {
        self.body.iter().flatten()
    }

    /// Context followed by body, the sequence fed to the scorer.
    pub fn all_tokens(&self) -> impl Iterator<Item = &String> {
        self.context.iter().chain(self.body_tokens())
    }

    pub fn body_len(&self) -> usize {
        self.body.iter().map(Vec::len).sum()
    }

    pub fn body_text(&self) -> String {
        self.body.iter().map(|s| s.join(" ")).collect::<Vec<_>>().join(" ")
    }
}

/// Error categories a judge may attach to an unreasonable story.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorType {
    /// repeated plots
    Repe,
    /// poor coherence
    Cohe,
    /// conflicting logic
    Conf,
    /// chaotic scenes
    Chao,
    Others,
}

impl ErrorType {
    pub const ALL: [ErrorType; 5] = [
        ErrorType::Repe,
        ErrorType::Cohe,
        ErrorType::Conf,
        ErrorType::Chao,
        ErrorType::Others,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::Repe => "repe",
            ErrorType::Cohe => "cohe",
            ErrorType::Conf => "conf",
            ErrorType::Chao => "chao",
            ErrorType::Others => "others",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ErrorType::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown error type {s:?}"))
    }
}

/// A story with seven binary judgments and per-judge error flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedStory {
    pub story: Story,
    pub labels: [u8; ANNOTATORS],
    pub error_flags: [BTreeSet<ErrorType>; ANNOTATORS],
}

impl AnnotatedStory {
    pub fn new(
        story: Story,
        labels: [u8; ANNOTATORS],
        error_flags: [BTreeSet<ErrorType>; ANNOTATORS],
    ) -> std::result::Result<Self, String> {
        for (i, (&label, flags)) in labels.iter().zip(&error_flags).enumerate() {
            if label > 1 {
                return Err(format!("annotator {i}: label {label} is not 0 or 1"));
            }
            if (label == 1) != flags.is_empty() {
                return Err(format!(
                    "annotator {i}: error types must be empty exactly when the label is 1"
                ));
            }
        }
        Ok(AnnotatedStory {
            story,
            labels,
            error_flags,
        })
    }

    pub fn id(&self) -> &str {
        &self.story.id
    }

    /// Number of judges who rated the story reasonable, the `k` of `k/7`.
    pub fn quality_level(&self) -> u32 {
        self.labels.iter().map(|&l| u32::from(l)).sum()
    }

    /// Exact mean label.
    pub fn mean_label(&self) -> Ratio<u32> {
        Ratio::new(self.quality_level(), ANNOTATORS as u32)
    }

    pub fn mean_label_f64(&self) -> f64 {
        f64::from(self.quality_level()) / ANNOTATORS as f64
    }

    /// How many judges flagged `error`.
    pub fn flag_count(&self, error: ErrorType) -> usize {
        self.error_flags.iter().filter(|f| f.contains(&error)).count()
    }
}
