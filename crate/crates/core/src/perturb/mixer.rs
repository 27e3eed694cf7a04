use rand::Rng;
use serde::{Deserialize, Serialize};

use super::negation::alter_negation;
use super::reorder::reorder;
use super::repetition::repetition;
use super::substitution::{substitute, SubstitutionMode};
use super::{Edit, PerturbContext, Technique, TrainingPair};
use crate::corpus::Story;
use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechniqueWeights {
    pub repetition: f64,
    pub substitution: f64,
    pub reordering: f64,
    pub negation: f64,
}

impl TechniqueWeights {
    pub fn get(&self, t: Technique) -> f64 {
        match t {
            Technique::Repetition => self.repetition,
            Technique::Substitution => self.substitution,
            Technique::Reordering => self.reordering,
            Technique::Negation => self.negation,
        }
    }

    pub fn set(&mut self, t: Technique, w: f64) {
        match t {
            Technique::Repetition => self.repetition = w,
            Technique::Substitution => self.substitution = w,
            Technique::Reordering => self.reordering = w,
            Technique::Negation => self.negation = w,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        Technique::ALL.map(|t| self.get(t))
    }
}

impl Default for TechniqueWeights {
    fn default() -> Self {
        TechniqueWeights {
            repetition: 0.1,
            substitution: 0.3,
            reordering: 0.4,
            negation: 0.2,
        }
    }
}

/// Sampling distributions for composing techniques into one negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixerConfig {
    /// P(n) for n = 1..=4 techniques per negative.
    pub count_distribution: [f64; 4],
    pub technique_weights: TechniqueWeights,
    /// Fraction of keyword tokens replaced by word-level substitution.
    pub keyword_substitution_rate: f64,
    /// Probability that an inserted `not` is contracted.
    pub contraction_prob: f64,
}

impl Default for MixerConfig {
    fn default() -> Self {
        MixerConfig {
            count_distribution: [0.5, 0.2, 0.2, 0.1],
            technique_weights: TechniqueWeights::default(),
            keyword_substitution_rate: 0.15,
            contraction_prob: 0.5,
        }
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

impl MixerConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, w: &[f64]| {
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Config(format!("{name} has a negative or non-finite entry")));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::Config(format!("{name} sums to {sum}, expected 1")));
            }
            Ok(())
        };
        check("count_distribution", &self.count_distribution)?;
        check("technique_weights", &self.technique_weights.as_array())?;
        if !(self.keyword_substitution_rate > 0.0 && self.keyword_substitution_rate <= 1.0) {
            return Err(Error::Config("keyword_substitution_rate must lie in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.contraction_prob) {
            return Err(Error::Config("contraction_prob must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Same mixer with `removed` disabled and the remaining weights rescaled
    /// to sum to one.
    pub fn without(&self, removed: Technique) -> Self {
        let mut out = *self;
        out.technique_weights.set(removed, 0.0);
        let total: f64 = out.technique_weights.as_array().iter().sum();
        if total > 0.0 {
            for t in Technique::ALL {
                let w = out.technique_weights.get(t);
                out.technique_weights.set(t, w / total);
            }
        }
        out
    }

    /// Mixer that applies exactly one technique, always `only`.
    pub fn only(&self, only: Technique) -> Self {
        let mut out = *self;
        out.count_distribution = [1.0, 0.0, 0.0, 0.0];
        for t in Technique::ALL {
            out.technique_weights.set(t, if t == only { 1.0 } else { 0.0 });
        }
        out
    }
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn apply<R: Rng + ?Sized>(
    technique: Technique,
    story: &Story,
    ctx: &PerturbContext<'_>,
    cfg: &MixerConfig,
    rng: &mut R,
) -> Result<(Story, Vec<Edit>)> {
    match technique {
        Technique::Repetition => repetition(story, rng),
        Technique::Substitution => {
            let (first, second) = if rng.random_bool(0.5) {
                (SubstitutionMode::Word, SubstitutionMode::Sentence)
            } else {
                (SubstitutionMode::Sentence, SubstitutionMode::Word)
            };
            let rate = cfg.keyword_substitution_rate;
            substitute(story, ctx, rate, first, rng).or_else(|e| {
                if e.is_inapplicable() {
                    substitute(story, ctx, rate, second, rng)
                } else {
                    Err(e)
                }
            })
        }
        Technique::Reordering => reorder(story, rng),
        Technique::Negation => alter_negation(story, ctx.verbs, cfg.contraction_prob, rng),
    }
}

/// One negative sample: draws the number of techniques, then that many
/// distinct techniques without replacement (weights renormalized after each
/// draw), applying them in draw order. An inapplicable technique is replaced
/// by a further draw from the remaining ones.
pub fn make_negative<R: Rng + ?Sized>(
    story: &Story,
    ctx: &PerturbContext<'_>,
    cfg: &MixerConfig,
    rng: &mut R,
) -> Result<TrainingPair> {
    let n = sample_index(&cfg.count_distribution, rng) + 1;
    let mut remaining: Vec<Technique> = Technique::ALL
        .into_iter()
        .filter(|&t| cfg.technique_weights.get(t) > 0.0)
        .collect();
    let mut current = story.clone();
    let mut edits = Vec::new();
    let mut applied = 0;
    while applied < n && !remaining.is_empty() {
        let weights: Vec<f64> = remaining.iter().map(|&t| cfg.technique_weights.get(t)).collect();
        let technique = remaining.remove(sample_index(&weights, rng));
        match apply(technique, &current, ctx, cfg, rng) {
            // a later edit can undo an earlier one, e.g. a pool sentence equal to the original
            Ok((next, _)) if next == *story => continue,
            Ok((next, new_edits)) => {
                current = next;
                edits.extend(new_edits);
                applied += 1;
            }
            Err(e) if e.is_inapplicable() => continue,
            Err(e) => return Err(e),
        }
    }
    if applied == 0 || current == *story {
        return Err(Error::Unperturbable(story.id.clone()));
    }
    Ok(TrainingPair {
        s: current,
        r: story.clone(),
        y: 0,
        edits,
    })
}

/// Pairs built from a corpus, plus the ids whose negative was skipped.
#[derive(Debug, Clone, Default)]
pub struct TrainingSet {
    pub pairs: Vec<TrainingPair>,
    pub skipped: Vec<String>,
}

/// One positive and one negative pair per story. Each story's negative draws
/// from its own stream `perturb/<id>` so results do not depend on corpus
/// order or on other stories.
pub fn build_training_set(corpus: &[Story], ctx: &PerturbContext<'_>, cfg: &MixerConfig, seed: u64) -> TrainingSet {
    let mut set = TrainingSet::default();
    for story in corpus {
        set.pairs.push(TrainingPair::positive(story));
        let mut rng = substream(seed, &format!("perturb/{}", story.id));
        match make_negative(story, ctx, cfg, &mut rng) {
            Ok(pair) => set.pairs.push(pair),
            Err(e) => {
                log::warn!("skipping negative for story {}: {e}", story.id);
                set.skipped.push(story.id.clone());
            }
        }
    }
    set
}
