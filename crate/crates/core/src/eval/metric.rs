use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::correlation::{kendall, pearson, spearman, Correlation};
use crate::corpus::io::{jsonl_values, open};
use crate::corpus::AnnotatedStory;
use crate::error::{Error, Result};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport<T> {
    pub n: usize,
    pub pearson: Correlation<T>,
    pub spearman: Correlation<T>,
    pub kendall: Correlation<T>,
}

impl<T: Scalar> CorrelationReport<T> {
    pub fn compute(x: &[T], y: &[T]) -> Result<Self> {
        Ok(CorrelationReport {
            n: x.len(),
            pearson: pearson(x, y)?,
            spearman: spearman(x, y)?,
            kendall: kendall(x, y)?,
        })
    }
}

impl<T: Scalar> fmt::Display for CorrelationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n        {}", self.n)?;
        for (name, c) in [("pearson", self.pearson), ("spearman", self.spearman), ("kendall", self.kendall)] {
            writeln!(f, "{name:<8} {:>8.4}  p = {:.3e}", c.coef.to_f64_lossy(), c.p_value.to_f64_lossy())?;
        }
        Ok(())
    }
}

/// Pairs metric scores with mean human labels and correlates them, in
/// annotation order.
pub fn evaluate_metric<T: Scalar>(scores: &BTreeMap<String, T>, annotations: &[AnnotatedStory]) -> Result<CorrelationReport<T>> {
    let missing: BTreeSet<&str> = annotations.iter().map(|a| a.id()).filter(|id| !scores.contains_key(*id)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingIds(missing.into_iter().map(String::from).collect()));
    }
    let metric: Vec<T> = annotations.iter().map(|a| scores[a.id()]).collect();
    let human: Vec<T> = annotations.iter().map(|a| T::of(a.mean_label_f64())).collect();
    CorrelationReport::compute(&metric, &human)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRecord {
    pub id: String,
    pub score: f64,
}

pub fn read_scores(reader: impl BufRead, source: &str) -> Result<Vec<ScoreRecord>> {
    jsonl_values(reader, source)?
        .into_iter()
        .map(|(line, value)| {
            serde_json::from_value(value).map_err(|e| Error::Schema {
                path: source.to_string(),
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    read_scores(open(path)?, &path.display().to_string())
}

/// Scores keyed by id; a repeated id is a schema error.
pub fn score_map(records: &[ScoreRecord]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for r in records {
        if map.insert(r.id.clone(), r.score).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate score for {}", r.id)));
        }
    }
    Ok(map)
}

pub fn write_scores<'a>(mut writer: impl Write, scores: impl IntoIterator<Item = &'a ScoreRecord>) -> std::io::Result<()> {
    for s in scores {
        serde_json::to_writer(&mut writer, s)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::corpus::{ErrorType, Story, ANNOTATORS};

    fn fixture(n: usize) -> Vec<AnnotatedStory> {
        (0..n)
            .map(|i| {
                let k = (i * 3) % 8;
                let mut labels = [0u8; ANNOTATORS];
                let mut flags: [BTreeSet<ErrorType>; ANNOTATORS] = Default::default();
                for (j, (l, f)) in labels.iter_mut().zip(flags.iter_mut()).enumerate() {
                    if j < k {
                        *l = 1;
                    } else {
                        f.insert(ErrorType::Cohe);
                    }
                }
                let story = Story::from_text(format!("s{i}"), "Ann sat.", &["She left."]).unwrap();
                AnnotatedStory::new(story, labels, flags).unwrap()
            })
            .collect()
    }

    #[test]
    fn identical_and_negated_metric() {
        let ann = fixture(20);
        let same: BTreeMap<String, f64> = ann.iter().map(|a| (a.id().to_string(), a.mean_label_f64())).collect();
        let r = evaluate_metric(&same, &ann).unwrap();
        assert!((r.pearson.coef - 1.0).abs() < 1e-12 && (r.spearman.coef - 1.0).abs() < 1e-12);
        assert_eq!(r.n, 20);
        let neg: BTreeMap<String, f64> = same.iter().map(|(k, v)| (k.clone(), -v)).collect();
        assert!((evaluate_metric(&neg, &ann).unwrap().pearson.coef + 1.0).abs() < 1e-12);
    }

    #[test]
    fn twenty_story_fixture_matches_direct_correlations() {
        let ann = fixture(20);
        let scores: BTreeMap<String, f64> =
            ann.iter().enumerate().map(|(i, a)| (a.id().to_string(), ((i * 7) % 11) as f64 / 10.0)).collect();
        let x: Vec<f64> = ann.iter().map(|a| scores[a.id()]).collect();
        let y: Vec<f64> = ann.iter().map(|a| f64::from(a.quality_level()) / 7.0).collect();
        let r = evaluate_metric(&scores, &ann).unwrap();
        assert_eq!(r, CorrelationReport::compute(&x, &y).unwrap());
    }

    #[test]
    fn missing_ids_are_listed() {
        let ann = fixture(5);
        let partial: BTreeMap<String, f64> = [("s0".to_string(), 0.5), ("s2".to_string(), 0.1)].into();
        match evaluate_metric(&partial, &ann) {
            Err(Error::MissingIds(ids)) => assert_eq!(ids, ["s1", "s3", "s4"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scores_round_trip() {
        let recs = vec![ScoreRecord { id: "a".into(), score: 0.25 }, ScoreRecord { id: "b".into(), score: 0.75 }];
        let mut buf = b"{\"_meta\":{\"seed\":1}}\n".to_vec();
        write_scores(&mut buf, &recs).unwrap();
        assert_eq!(read_scores(&buf[..], "mem").unwrap(), recs);
        assert!(score_map(&[recs[0].clone(), recs[0].clone()]).is_err());
        assert!(read_scores(&b"{\"id\":\"a\"}\n"[..], "mem").is_err());
    }

    #[test]
    fn report_renders_and_serializes() {
        let r = CorrelationReport::compute(&[1.0, 2.0, 3.0, 4.0, 5.0f64], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        let text = r.to_string();
        assert!(text.contains("pearson") && text.contains("0.8000"));
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["n"], 5);
        assert!((json["kendall"]["coef"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    }
}
