use rand::Rng;

use super::{Edit, SubMode, Technique};
use crate::corpus::Story;
use crate::error::{Error, Result};

const MAX_NGRAM: usize = 4;

/// Duplicates the `n` tokens starting at `start` of body sentence `sentence`
/// immediately after their occurrence.
pub fn repeat_ngram_at(story: &Story, sentence: usize, start: usize, n: usize) -> Result<(Story, Edit)> {
    let tokens = story
        .body
        .get(sentence)
        .ok_or(Error::Inapplicable("sentence index out of range"))?;
    if n == 0 || start + n > tokens.len() {
        return Err(Error::Inapplicable("n-gram does not fit in the sentence"));
    }
    let mut repeated = tokens[..start + n].to_vec();
    repeated.extend_from_slice(&tokens[start..start + n]);
    repeated.extend_from_slice(&tokens[start + n..]);
    let edit = Edit {
        technique: Technique::Repetition,
        sub_mode: SubMode::Ngram,
        sentence,
        span: Some([start, start + n]),
        before: tokens[start..start + n].join(" "),
        after: repeated[start..start + 2 * n].join(" "),
    };
    let mut out = story.clone();
    out.body[sentence] = repeated;
    Ok((out, edit))
}

/// Random N-gram (N = 1..=4, at most the sentence length) in a random body
/// sentence, repeated in place.
pub fn repeat_ngram<R: Rng + ?Sized>(story: &Story, rng: &mut R) -> Result<(Story, Vec<Edit>)> {
    if story.body.is_empty() {
        return Err(Error::Inapplicable("story has no body"));
    }
    let sentence = rng.random_range(0..story.body.len());
    let len = story.body[sentence].len();
    let n = rng.random_range(1..=MAX_NGRAM.min(len));
    let start = rng.random_range(0..=len - n);
    let (out, edit) = repeat_ngram_at(story, sentence, start, n)?;
    Ok((out, vec![edit]))
}

/// Copies body sentence `i` over sentence `i + 1`, keeping the sentence count.
pub fn repeat_sentence_at(story: &Story, i: usize) -> Result<(Story, Edit)> {
    if i + 1 >= story.body.len() {
        return Err(Error::Inapplicable("no following sentence to replace"));
    }
    if story.body[i] == story.body[i + 1] {
        return Err(Error::Inapplicable("following sentence is already identical"));
    }
    let mut out = story.clone();
    out.body[i + 1] = story.body[i].clone();
    let edit = Edit {
        technique: Technique::Repetition,
        sub_mode: SubMode::Sentence,
        sentence: i + 1,
        span: Some([0, story.body[i + 1].len()]),
        before: story.body[i + 1].join(" "),
        after: story.body[i].join(" "),
    };
    Ok((out, edit))
}

/// Random sentence repeated in place of its successor.
pub fn repeat_sentence<R: Rng + ?Sized>(story: &Story, rng: &mut R) -> Result<(Story, Vec<Edit>)> {
    let sites: Vec<usize> = (0..story.body.len().saturating_sub(1))
        .filter(|&i| story.body[i] != story.body[i + 1])
        .collect();
    if sites.is_empty() {
        return Err(Error::Inapplicable("no sentence can be repeated"));
    }
    let i = sites[rng.random_range(0..sites.len())];
    let (out, edit) = repeat_sentence_at(story, i)?;
    Ok((out, vec![edit]))
}

/// N-gram or sentence repetition, each chosen with probability 1/2; the other
/// mode is tried when the chosen one has no site.
pub fn repetition<R: Rng + ?Sized>(story: &Story, rng: &mut R) -> Result<(Story, Vec<Edit>)> {
    if rng.random_bool(0.5) {
        repeat_ngram(story, rng).or_else(|e| if e.is_inapplicable() { repeat_sentence(story, rng) } else { Err(e) })
    } else {
        repeat_sentence(story, rng).or_else(|e| if e.is_inapplicable() { repeat_ngram(story, rng) } else { Err(e) })
    }
}
