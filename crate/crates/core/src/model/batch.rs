use ndarray::Array2;

use crate::corpus::{Story, Vocab, BOS_ID, EOS_ID, PAD_ID};
use crate::perturb::TrainingPair;

/// `[BOS] context body [EOS]`, the words truncated to fit `max_len`.
pub fn encode_story(story: &Story, vocab: &Vocab, max_len: usize) -> Vec<usize> {
    let words = max_len.saturating_sub(2);
    let mut ids = Vec::with_capacity(words + 2);
    ids.push(BOS_ID);
    ids.extend(vocab.encode(story.all_tokens()).into_iter().take(words));
    ids.push(EOS_ID);
    ids
}

/// Padded id matrix with mask, labels and reconstruction targets.
///
/// Targets are aligned left to right: row `i` holds the original story's ids
/// cut or `PAD`-extended to the input's length, and `PAD` targets do not
/// count towards the reconstruction loss.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedBatch {
    pub ids: Array2<usize>,
    pub mask: Array2<bool>,
    pub y: Vec<u8>,
    pub targets: Array2<usize>,
}

impl EncodedBatch {
    pub fn new(inputs: Vec<Vec<usize>>, targets: Vec<Vec<usize>>, y: Vec<u8>) -> Self {
        assert_eq!(inputs.len(), targets.len(), "one target row per input");
        assert_eq!(inputs.len(), y.len(), "one label per input");
        let width = inputs.iter().map(Vec::len).max().unwrap_or(0);
        let b = inputs.len();
        let mut ids = Array2::from_elem((b, width), PAD_ID);
        let mut mask = Array2::from_elem((b, width), false);
        let mut tgt = Array2::from_elem((b, width), PAD_ID);
        for (i, (input, target)) in inputs.iter().zip(&targets).enumerate() {
            for (j, &id) in input.iter().enumerate() {
                ids[[i, j]] = id;
                mask[[i, j]] = true;
                tgt[[i, j]] = target.get(j).copied().unwrap_or(PAD_ID);
            }
        }
        EncodedBatch { ids, mask, y, targets: tgt }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = &'a TrainingPair>, vocab: &Vocab, max_len: usize) -> Self {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        let mut y = Vec::new();
        for p in pairs {
            inputs.push(encode_story(&p.s, vocab, max_len));
            targets.push(encode_story(&p.r, vocab, max_len));
            y.push(p.y);
        }
        Self::new(inputs, targets, y)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::test_support::story;

    #[test]
    fn stories_get_boundaries_and_truncation() {
        let s = story("a", &["x y z ."]);
        let vocab = Vocab::build([&s], 1);
        let ids = encode_story(&s, &vocab, 64);
        assert_eq!(ids.len(), 5 + 4 + 2);
        assert_eq!(ids[0], BOS_ID);
        assert_eq!(*ids.last().unwrap(), EOS_ID);
        let short = encode_story(&s, &vocab, 5);
        assert_eq!(short.len(), 5);
        assert_eq!(short[1..4], ids[1..4]);
    }

    #[test]
    fn rows_are_padded_and_targets_aligned() {
        let b = EncodedBatch::new(
            vec![vec![2, 5, 6, 3], vec![2, 7, 3]],
            vec![vec![2, 5, 3], vec![2, 7, 8, 9, 3]],
            vec![0, 1],
        );
        assert_eq!(b.ids.row(1).to_vec(), [2, 7, 3, PAD_ID]);
        assert_eq!(b.mask.row(1).to_vec(), [true, true, true, false]);
        assert_eq!(b.targets.row(0).to_vec(), [2, 5, 3, PAD_ID]);
        assert_eq!(b.targets.row(1).to_vec(), [2, 7, 8, PAD_ID]);
        assert!(b.ids.column(0).iter().all(|&i| i == BOS_ID));
    }

    #[test]
    fn positive_pairs_reconstruct_themselves() {
        let s = story("a", &["p q r ."]);
        let vocab = Vocab::build([&s], 1);
        let b = EncodedBatch::from_pairs([&TrainingPair::positive(&s)], &vocab, 64);
        assert_eq!(b.ids, b.targets);
    }
}
