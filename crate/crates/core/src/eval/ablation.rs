use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::metric::evaluate_metric;
use super::sets::error_subset;
use crate::corpus::{AnnotatedStory, ErrorType, Story};
use crate::error::{Error, Result};
use crate::model::{fit, score_story, Fitted, ModelConfig, TrainConfig};
use crate::num::Scalar;
use crate::perturb::{build_training_set, MixerConfig, PerturbContext, Technique, TrainingSet};

/// Everything an ablation run needs; `seed` drives both perturbation and
/// training.
#[derive(Debug, Clone, Copy)]
pub struct AblationSetup<'a> {
    pub corpus: &'a [Story],
    pub annotations: &'a [AnnotatedStory],
    pub ctx: PerturbContext<'a>,
    pub mixer: MixerConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub min_freq: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetCorrelation {
    pub set: String,
    pub n: usize,
    /// `None` when the correlation is undefined on this set.
    pub pearson: Option<f64>,
    /// Percent change against the full model.
    pub relative_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationResult {
    pub removed: Option<Technique>,
    pub sets: Vec<SetCorrelation>,
}

/// Evaluation sets: every annotated story, then one subset per error type
/// mixed with the unanimously reasonable stories.
pub fn evaluation_sets(annotations: &[AnnotatedStory]) -> Vec<(String, Vec<AnnotatedStory>)> {
    let mut sets = vec![("all".to_string(), annotations.to_vec())];
    for e in ErrorType::ALL {
        sets.push((e.as_str().to_string(), error_subset(annotations, e, true)));
    }
    sets
}

pub fn ablated_training_set(setup: &AblationSetup<'_>, removed: Option<Technique>) -> TrainingSet {
    let mixer = match removed {
        Some(t) => setup.mixer.without(t),
        None => setup.mixer,
    };
    build_training_set(setup.corpus, &setup.ctx, &mixer, setup.seed)
}

pub fn train_ablated<T: Scalar>(setup: &AblationSetup<'_>, removed: Option<Technique>) -> Result<Fitted<T>> {
    let set = ablated_training_set(setup, removed);
    let tcfg = TrainConfig { seed: setup.seed, ..setup.train };
    fit(&set.pairs, setup.min_freq, &setup.model, &tcfg)
}

pub fn ablation_run<T: Scalar>(setup: &AblationSetup<'_>, removed: Option<Technique>) -> Result<AblationResult> {
    let fitted = train_ablated::<T>(setup, removed)?;
    let scores: BTreeMap<String, f64> = setup
        .annotations
        .iter()
        .map(|a| (a.id().to_string(), score_story(&fitted.model, &fitted.vocab, &a.story).to_f64_lossy()))
        .collect();
    let mut sets = Vec::new();
    for (name, subset) in evaluation_sets(setup.annotations) {
        let pearson = match evaluate_metric(&scores, &subset) {
            Ok(r) => Some(r.pearson.coef),
            Err(Error::UndefinedCorrelation(_)) => None,
            Err(e) => return Err(e),
        };
        sets.push(SetCorrelation { set: name, n: subset.len(), pearson, relative_change: None });
    }
    Ok(AblationResult { removed, sets })
}

/// Full model first, then one row per removed technique.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationTable {
    pub rows: Vec<AblationResult>,
}

impl AblationTable {
    pub fn from_rows(mut rows: Vec<AblationResult>) -> Result<Self> {
        let Some(full) = rows.iter().position(|r| r.removed.is_none()) else {
            return Err(Error::InvalidArgument("ablation table needs the full-model row".into()));
        };
        rows.swap(0, full);
        let baseline: Vec<Option<f64>> = rows[0].sets.iter().map(|s| s.pearson).collect();
        for row in &mut rows {
            for (cell, base) in row.sets.iter_mut().zip(&baseline) {
                cell.relative_change = match (cell.pearson, *base) {
                    (Some(r), Some(b)) if b != 0.0 => Some((r - b) / b.abs() * 100.0),
                    _ => None,
                };
            }
        }
        Ok(AblationTable { rows })
    }
}

pub fn ablation_table<T: Scalar>(setup: &AblationSetup<'_>) -> Result<AblationTable> {
    let removals = std::iter::once(None).chain(Technique::ALL.into_iter().map(Some));
    let rows = removals.map(|r| ablation_run::<T>(setup, r)).collect::<Result<Vec<_>>>()?;
    AblationTable::from_rows(rows)
}

impl fmt::Display for AblationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(first) = self.rows.first() else { return Ok(()) };
        write!(f, "{:<14}", "removed")?;
        for s in &first.sets {
            write!(f, " {:>18}", format!("{} (n={})", s.set, s.n))?;
        }
        writeln!(f)?;
        for row in &self.rows {
            let label = row.removed.map_or("none".to_string(), |t| format!("-{t}"));
            write!(f, "{label:<14}")?;
            for s in &row.sets {
                let cell = match (s.pearson, s.relative_change, row.removed) {
                    (None, ..) => "n/a".to_string(),
                    (Some(r), _, None) => format!("{r:.4}"),
                    (Some(r), Some(c), Some(_)) => format!("{r:.4} ({c:+.1}%)"),
                    (Some(r), None, Some(_)) => format!("{r:.4}"),
                };
                write!(f, " {cell:>18}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(removed: Option<Technique>, rs: &[Option<f64>]) -> AblationResult {
        AblationResult {
            removed,
            sets: rs
                .iter()
                .enumerate()
                .map(|(i, &r)| SetCorrelation { set: format!("set{i}"), n: 10, pearson: r, relative_change: None })
                .collect(),
        }
    }

    #[test]
    fn relative_change_against_full_row() {
        let t = AblationTable::from_rows(vec![
            row(Some(Technique::Negation), &[Some(0.3), None]),
            row(None, &[Some(0.4), Some(0.2)]),
        ])
        .unwrap();
        assert_eq!(t.rows[0].removed, None);
        assert_eq!(t.rows[0].sets[0].relative_change, Some(0.0));
        assert!((t.rows[1].sets[0].relative_change.unwrap() + 25.0).abs() < 1e-9);
        assert_eq!(t.rows[1].sets[1].relative_change, None);
        let text = t.to_string();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("-NEGATION") && text.contains("(-25.0%)") && text.contains("n/a"));
    }

    #[test]
    fn needs_full_row() {
        assert!(AblationTable::from_rows(vec![row(Some(Technique::Repetition), &[Some(0.1)])]).is_err());
    }
}
