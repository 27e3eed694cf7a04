//! Story corpora: tokenization, sentence splitting, delexicalization,
//! truncation, annotation records and the model vocabulary.

pub(crate) mod io;
mod names;
mod story;
mod tokenize;
mod vocab;

pub use io::{
    load_annotations, load_corpus, read_annotations, read_corpus, write_annotations, write_corpus, AnnotationRecord,
    StoryRecord, META_KEY,
};
pub use names::{delexicalize, Gender, NameLexicon};
pub use story::{AnnotatedStory, ErrorType, Story, ANNOTATORS};
pub use tokenize::{split_sentences, tokenize, PLACEHOLDERS};
pub use vocab::{Vocab, BOS, BOS_ID, EOS, EOS_ID, PAD, PAD_ID, UNK, UNK_ID};

/// Longest prefix of whole body sentences whose token count stays within
/// `max_words`. A first sentence longer than the limit is kept alone.
///
/// The leading context is not counted; only the continuation is truncated.
pub fn truncate_words(story: &Story, max_words: usize) -> Story {
    assert!(max_words >= 1, "max_words must be at least 1");
    let mut kept = Vec::new();
    let mut total = 0usize;
    for sentence in &story.body {
        if !kept.is_empty() && total + sentence.len() > max_words {
            break;
        }
        total += sentence.len();
        kept.push(sentence.clone());
        if total > max_words {
            break;
        }
    }
    Story {
        id: story.id.clone(),
        context: story.context.clone(),
        body: kept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn story_with_lengths(lengths: &[usize]) -> Story {
        let body = lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| (0..n).map(|j| format!("w{i}_{j}")).collect())
            .collect();
        Story::new("t", vec!["ctx".into()], body).unwrap()
    }

    #[test]
    fn under_limit_is_unchanged() {
        let s = story_with_lengths(&[10, 10, 9, 10, 10]);
        assert_eq!(truncate_words(&s, 200), s);
    }

    #[test]
    fn keeps_prefix_under_limit() {
        let s = story_with_lengths(&[80, 80, 80]);
        let t = truncate_words(&s, 200);
        assert_eq!(t.body.len(), 2);
        assert_eq!(t.body[..], s.body[..2]);
    }

    #[test]
    fn oversize_first_sentence_is_kept_alone() {
        let s = story_with_lengths(&[300, 5]);
        let t = truncate_words(&s, 200);
        assert_eq!(t.body.len(), 1);
        assert_eq!(t.body[0].len(), 300);
    }

    proptest! {
        #[test]
        fn truncation_is_a_bounded_prefix(
            lengths in proptest::collection::vec(1usize..40, 1..12),
            max_words in 1usize..120,
        ) {
            let s = story_with_lengths(&lengths);
            let t = truncate_words(&s, max_words);
            let count: usize = t.body.iter().map(Vec::len).sum();
            prop_assert!(count <= max_words.max(lengths[0]));
            prop_assert!(!t.body.is_empty());
            prop_assert_eq!(&t.body[..], &s.body[..t.body.len()]);
            // Prefix-sum oracle: the kept count is the largest admissible prefix.
            let mut best = 1;
            let mut acc = 0;
            for (i, n) in lengths.iter().enumerate() {
                acc += n;
                if acc <= max_words { best = i + 1; }
            }
            prop_assert_eq!(t.body.len(), best);
        }
    }
}
