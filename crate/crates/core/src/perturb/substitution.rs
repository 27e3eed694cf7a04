use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edit, PerturbContext, SubMode, Technique};
use crate::corpus::Story;
use crate::error::{Error, Result};
use crate::knowledge::sample_keyword;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstitutionMode {
    Word,
    Sentence,
}

const MAX_DRAWS: usize = 64;

/// Number of keyword tokens to replace: `rate * count` rounded half up, at
/// least one.
pub(crate) fn replacement_count(rate: f64, keywords: usize) -> usize {
    ((rate * keywords as f64 + 0.5).floor() as usize).max(1)
}

fn replacement<R: Rng + ?Sized>(token: &str, ctx: &PerturbContext<'_>, rng: &mut R) -> Option<String> {
    if let Some(antonyms) = ctx.kb.antonyms(token) {
        let choices: Vec<&String> = antonyms.iter().filter(|a| *a != token).collect();
        if !choices.is_empty() {
            return Some(choices[rng.random_range(0..choices.len())].clone());
        }
    }
    let tag = ctx.pos.tag(token);
    for _ in 0..MAX_DRAWS {
        match sample_keyword(ctx.ft, tag, rng) {
            Ok(k) if k != token => return Some(k.to_string()),
            Ok(_) => continue,
            Err(_) => return None,
        }
    }
    None
}

/// Replaces a `rate` fraction of keyword tokens in the body: by a uniformly
/// chosen antonym when one exists, otherwise by a frequency-weighted keyword
/// with the same tag.
pub fn substitute_words<R: Rng + ?Sized>(
    story: &Story,
    ctx: &PerturbContext<'_>,
    rate: f64,
    rng: &mut R,
) -> Result<(Story, Vec<Edit>)> {
    let mut sites: Vec<(usize, usize)> = story
        .body
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().enumerate().map(move |(j, t)| (i, j, t)))
        .filter(|(_, _, t)| ctx.kb.is_keyword(t))
        .map(|(i, j, _)| (i, j))
        .collect();
    if sites.is_empty() {
        return Err(Error::Inapplicable("story has no keywords"));
    }
    let target = replacement_count(rate, sites.len());
    sites.shuffle(rng);
    let mut out = story.clone();
    let mut done: Vec<(usize, usize, String)> = Vec::new();
    for (i, j) in sites {
        if done.len() == target {
            break;
        }
        if let Some(new) = replacement(&story.body[i][j], ctx, rng) {
            out.body[i][j] = new.clone();
            done.push((i, j, new));
        }
    }
    if done.is_empty() {
        return Err(Error::Inapplicable("no keyword has a replacement"));
    }
    done.sort();
    let edits = done
        .into_iter()
        .map(|(i, j, new)| Edit {
            technique: Technique::Substitution,
            sub_mode: SubMode::Word,
            sentence: i,
            span: Some([j, j + 1]),
            before: story.body[i][j].clone(),
            after: new,
        })
        .collect();
    Ok((out, edits))
}

/// Replaces one random body sentence with a random sentence of another story
/// from the pool.
pub fn substitute_sentence<R: Rng + ?Sized>(story: &Story, pool: &[Story], rng: &mut R) -> Result<(Story, Vec<Edit>)> {
    let mut donor = None;
    for _ in 0..MAX_DRAWS.min(pool.len().max(1) * 4) {
        if pool.is_empty() {
            break;
        }
        let cand = &pool[rng.random_range(0..pool.len())];
        if cand.id != story.id {
            donor = Some(cand);
            break;
        }
    }
    if donor.is_none() {
        let others: Vec<&Story> = pool.iter().filter(|s| s.id != story.id).collect();
        if others.is_empty() {
            return Err(Error::Inapplicable("pool has no other story"));
        }
        donor = Some(others[rng.random_range(0..others.len())]);
    }
    let donor = donor.expect("donor chosen above");
    for _ in 0..MAX_DRAWS {
        let i = rng.random_range(0..story.body.len());
        let replacement = &donor.body[rng.random_range(0..donor.body.len())];
        if *replacement != story.body[i] {
            let mut out = story.clone();
            out.body[i] = replacement.clone();
            let edit = Edit {
                technique: Technique::Substitution,
                sub_mode: SubMode::Sentence,
                sentence: i,
                span: Some([0, story.body[i].len()]),
                before: story.body[i].join(" "),
                after: replacement.join(" "),
            };
            return Ok((out, vec![edit]));
        }
    }
    Err(Error::Inapplicable("donor sentences equal the story's sentences"))
}

pub fn substitute<R: Rng + ?Sized>(
    story: &Story,
    ctx: &PerturbContext<'_>,
    rate: f64,
    mode: SubstitutionMode,
    rng: &mut R,
) -> Result<(Story, Vec<Edit>)> {
    match mode {
        SubstitutionMode::Word => substitute_words(story, ctx, rate, rng),
        SubstitutionMode::Sentence => substitute_sentence(story, ctx.pool, rng),
    }
}
