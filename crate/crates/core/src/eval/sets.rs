use num_rational::Ratio;
use rand::Rng;

use crate::corpus::{AnnotatedStory, ErrorType, ANNOTATORS};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Judges needed before an error type is attributed to a story.
pub const ERROR_FLAG_THRESHOLD: usize = 3;

pub const BIASED_SETS: u32 = 8;

/// Biased set `I`, over-representing stories with quality level `k = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BiasedSetSpec {
    index: u32,
}

impl BiasedSetSpec {
    pub fn new(index: u32) -> Result<Self> {
        if !(1..=BIASED_SETS).contains(&index) {
            return Err(Error::InvalidArgument(format!("biased set index {index} outside 1..={BIASED_SETS}")));
        }
        Ok(BiasedSetSpec { index })
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// `1 / (|I - k| + 1)`.
    pub fn probability(&self, k: u32) -> Ratio<u32> {
        Ratio::new(1, self.index.abs_diff(k) + 1)
    }

    /// Inclusion draw for one story; depends only on `(seed, I, id)`.
    pub fn includes(&self, story: &AnnotatedStory, seed: u64) -> bool {
        let p = self.probability(story.quality_level());
        let mut rng = substream(seed, &format!("bias/{}/{}", self.index, story.id()));
        rng.random_ratio(*p.numer(), *p.denom())
    }
}

pub fn biased_set(annotations: &[AnnotatedStory], index: u32, seed: u64) -> Result<Vec<AnnotatedStory>> {
    let spec = BiasedSetSpec::new(index)?;
    Ok(annotations.iter().filter(|a| spec.includes(a, seed)).cloned().collect())
}

/// All eight biased sets, in index order.
pub fn biased_sets(annotations: &[AnnotatedStory], seed: u64) -> Vec<Vec<AnnotatedStory>> {
    (1..=BIASED_SETS)
        .map(|i| biased_set(annotations, i, seed).expect("index in range"))
        .collect()
}

pub fn has_error_type(story: &AnnotatedStory, error: ErrorType) -> bool {
    story.flag_count(error) >= ERROR_FLAG_THRESHOLD
}

pub fn is_reasonable(story: &AnnotatedStory) -> bool {
    story.quality_level() == ANNOTATORS as u32
}

/// Stories attributed `error`, optionally together with the unanimously
/// reasonable ones.
pub fn error_subset(annotations: &[AnnotatedStory], error: ErrorType, include_reasonable: bool) -> Vec<AnnotatedStory> {
    annotations
        .iter()
        .filter(|a| has_error_type(a, error) || (include_reasonable && is_reasonable(a)))
        .cloned()
        .collect()
}
