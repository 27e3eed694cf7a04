use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edit, SubMode, Technique};
use crate::corpus::Story;
use crate::error::{Error, Result};

fn join_indices(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Permutes the body sentences by a uniformly drawn non-identity permutation
/// that changes the story. The context is left untouched.
pub fn reorder<R: Rng + ?Sized>(story: &Story, rng: &mut R) -> Result<(Story, Vec<Edit>)> {
    let n = story.body.len();
    if n < 2 {
        return Err(Error::Inapplicable("reordering needs at least two sentences"));
    }
    if story.body.iter().all(|s| *s == story.body[0]) {
        return Err(Error::Inapplicable("all sentences are identical"));
    }
    let identity: Vec<usize> = (0..n).collect();
    let mut perm = identity.clone();
    loop {
        perm.shuffle(rng);
        if perm != identity && perm.iter().enumerate().any(|(i, &p)| story.body[i] != story.body[p]) {
            break;
        }
    }
    let mut out = story.clone();
    out.body = perm.iter().map(|&p| story.body[p].clone()).collect();
    let edit = Edit {
        technique: Technique::Reordering,
        sub_mode: SubMode::Permute,
        sentence: perm.iter().enumerate().position(|(i, &p)| i != p).unwrap_or(0),
        span: None,
        before: join_indices(&identity),
        after: join_indices(&perm),
    };
    Ok((out, vec![edit]))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::story;
    use super::*;
    use crate::rng::substream;
    use std::collections::HashMap;

    #[test]
    fn single_sentence_is_inapplicable() {
        let s = story("t", &["a ."]);
        assert!(reorder(&s, &mut substream(0, "r")).unwrap_err().is_inapplicable());
        let same = story("t", &["a .", "a ."]);
        assert!(reorder(&same, &mut substream(0, "r")).unwrap_err().is_inapplicable());
    }

    #[test]
    fn preserves_sentence_multiset_and_context() {
        let s = story("t", &["a .", "b .", "c .", "d ."]);
        let mut rng = substream(1, "r");
        for _ in 0..200 {
            let (out, _) = reorder(&s, &mut rng).unwrap();
            assert_ne!(out, s);
            assert_eq!(out.context, s.context);
            let mut a = out.body.clone();
            let mut b = s.body.clone();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn swapping_the_last_two_sentences_is_reachable() {
        let s = story("t", &["the weather was crisp .", "ken felt good .", "he decided to keep jogging .", "ken went several more miles ."]);
        let mut rng = substream(2, "r");
        let target = "0 1 3 2";
        assert!((0..2000).any(|_| reorder(&s, &mut rng).unwrap().1[0].after == target));
    }

    #[test]
    fn non_identity_permutations_are_uniform() {
        let s = story("t", &["a .", "b .", "c ."]);
        let mut rng = substream(3, "r");
        let runs = 10_000;
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..runs {
            *counts.entry(reorder(&s, &mut rng).unwrap().1[0].after.clone()).or_default() += 1;
        }
        // S3 has six permutations; the identity is excluded.
        assert_eq!(counts.len(), 5);
        assert!(!counts.contains_key("0 1 2"));
        for (perm, c) in counts {
            let f = c as f64 / runs as f64;
            assert!((f - 0.2).abs() < 0.02, "{perm}: {f}");
        }
    }
}
