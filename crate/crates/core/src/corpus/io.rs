//! JSONL readers and writers for corpus and annotation files.
//!
//! Lines holding an object with a `_meta` key are provenance headers written
//! by the pipeline and are skipped by every reader.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::story::{AnnotatedStory, ErrorType, Story, ANNOTATORS};
use crate::error::{Error, Result};

pub const META_KEY: &str = "_meta";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoryRecord {
    pub id: String,
    pub context: String,
    pub body: Vec<String>,
}

impl StoryRecord {
    pub fn from_story(story: &Story) -> Self {
        StoryRecord {
            id: story.id.clone(),
            context: story.context.join(" "),
            body: story.body.iter().map(|s| s.join(" ")).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    pub context: String,
    pub body: Vec<String>,
    pub labels: Vec<i64>,
    pub error_types: Vec<Vec<String>>,
}

impl AnnotationRecord {
    pub fn from_annotated(a: &AnnotatedStory) -> Self {
        let story = StoryRecord::from_story(&a.story);
        AnnotationRecord {
            id: story.id,
            context: story.context,
            body: story.body,
            labels: a.labels.iter().map(|&l| i64::from(l)).collect(),
            error_types: a
                .error_flags
                .iter()
                .map(|f| f.iter().map(|e| e.as_str().to_string()).collect())
                .collect(),
        }
    }
}

/// Parsed JSON objects of a JSONL stream with their 1-based line numbers,
/// skipping blank lines and provenance headers.
pub(crate) fn jsonl_values(reader: impl BufRead, source: &str) -> Result<Vec<(usize, Value)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if value.get(META_KEY).is_some() {
            continue;
        }
        out.push((i + 1, value));
    }
    Ok(out)
}

pub(crate) fn open(path: &Path) -> Result<std::io::BufReader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufReader::new(file))
}

fn schema(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

pub fn read_corpus(reader: impl BufRead, source: &str) -> Result<Vec<Story>> {
    jsonl_values(reader, source)?
        .into_iter()
        .map(|(line, value)| {
            let rec: StoryRecord =
                serde_json::from_value(value).map_err(|e| schema(source, line, e.to_string()))?;
            Story::from_text(rec.id, &rec.context, &rec.body)
                .map_err(|e| schema(source, line, e.to_string()))
        })
        .collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<Story>> {
    read_corpus(open(path)?, &path.display().to_string())
}

pub fn read_annotations(reader: impl BufRead, source: &str) -> Result<Vec<AnnotatedStory>> {
    jsonl_values(reader, source)?
        .into_iter()
        .map(|(line, value)| {
            let rec: AnnotationRecord =
                serde_json::from_value(value).map_err(|e| schema(source, line, e.to_string()))?;
            if rec.labels.len() != ANNOTATORS {
                return Err(schema(
                    source,
                    line,
                    format!("expected {ANNOTATORS} labels, found {}", rec.labels.len()),
                ));
            }
            if rec.error_types.len() != ANNOTATORS {
                return Err(schema(
                    source,
                    line,
                    format!("expected {ANNOTATORS} error type lists, found {}", rec.error_types.len()),
                ));
            }
            let mut labels = [0u8; ANNOTATORS];
            for (slot, &l) in labels.iter_mut().zip(&rec.labels) {
                *slot = match l {
                    0 => 0,
                    1 => 1,
                    other => return Err(schema(source, line, format!("label {other} is not 0 or 1"))),
                };
            }
            let mut flags: [BTreeSet<ErrorType>; ANNOTATORS] = Default::default();
            for (slot, names) in flags.iter_mut().zip(&rec.error_types) {
                for name in names {
                    slot.insert(name.parse().map_err(|e: String| schema(source, line, e))?);
                }
            }
            let story = Story::from_text(rec.id, &rec.context, &rec.body)
                .map_err(|e| schema(source, line, e.to_string()))?;
            AnnotatedStory::new(story, labels, flags).map_err(|e| schema(source, line, e))
        })
        .collect()
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotatedStory>> {
    read_annotations(open(path)?, &path.display().to_string())
}

pub fn write_corpus<'a>(mut writer: impl Write, stories: impl IntoIterator<Item = &'a Story>) -> std::io::Result<()> {
    for story in stories {
        serde_json::to_writer(&mut writer, &StoryRecord::from_story(story))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_annotations<'a>(
    mut writer: impl Write,
    stories: impl IntoIterator<Item = &'a AnnotatedStory>,
) -> std::io::Result<()> {
    for story in stories {
        serde_json::to_writer(&mut writer, &AnnotationRecord::from_annotated(story))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
