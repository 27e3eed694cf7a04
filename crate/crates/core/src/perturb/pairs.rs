//! `pairs.jsonl`: one training pair per line.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edit, TrainingPair};
use crate::corpus::io::{jsonl_values, open};
use crate::corpus::Story;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStory {
    pub context: String,
    pub body: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub y: u8,
    pub s: PairStory,
    pub r: PairStory,
    pub edits: Vec<Edit>,
}

fn join(story: &Story) -> PairStory {
    PairStory {
        context: story.context.join(" "),
        body: story.body.iter().map(|s| s.join(" ")).collect(),
    }
}

fn split(id: &str, rec: &PairStory) -> Result<Story> {
    let words = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
    Story::new(id, words(&rec.context), rec.body.iter().map(|s| words(s)).collect())
}

impl PairRecord {
    pub fn from_pair(pair: &TrainingPair) -> Self {
        PairRecord {
            id: pair.id().to_string(),
            y: pair.y,
            s: join(&pair.s),
            r: join(&pair.r),
            edits: pair.edits.clone(),
        }
    }

    /// Stored text is already tokenized, so sentences split on whitespace.
    pub fn into_pair(self) -> Result<TrainingPair> {
        Ok(TrainingPair {
            s: split(&self.id, &self.s)?,
            r: split(&self.id, &self.r)?,
            y: self.y,
            edits: self.edits,
        })
    }
}

pub fn read_pairs(reader: impl BufRead, source: &str) -> Result<Vec<TrainingPair>> {
    jsonl_values(reader, source)?
        .into_iter()
        .map(|(line, value)| {
            let schema = |message: String| Error::Schema {
                path: source.to_string(),
                line,
                message,
            };
            let rec: PairRecord = serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
            let pair = rec.into_pair().map_err(|e| schema(e.to_string()))?;
            if !pair.is_valid() {
                return Err(schema(format!("pair {} is inconsistent with its label", pair.id())));
            }
            Ok(pair)
        })
        .collect()
}

pub fn load_pairs(path: &Path) -> Result<Vec<TrainingPair>> {
    read_pairs(open(path)?, &path.display().to_string())
}

pub fn write_pairs<'a>(mut writer: impl Write, pairs: impl IntoIterator<Item = &'a TrainingPair>) -> std::io::Result<()> {
    for pair in pairs {
        serde_json::to_writer(&mut writer, &PairRecord::from_pair(pair))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
