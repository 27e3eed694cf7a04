//! Rule-based insertion and removal of `not` with verb-form repair.
//!
//! | verb class                 | rule            | example                    |
//! |----------------------------|-----------------|----------------------------|
//! | be, modal                  | `~ not`         | was -> was not             |
//! | base                       | `do not v`      | go -> do not go            |
//! | 3rd singular present       | `does not v`    | goes -> does not go        |
//! | simple past                | `did not v`     | went -> did not go         |
//! | past participle, gerund    | `not ~`         | gone -> not gone           |
//!
//! When a sentence has several verbs, the target is the first verb of the
//! highest tier: be/modal, then participles (including a regular past form
//! right after `have`/`has`/`had`), then gerunds, then finite verbs.

use rand::Rng;

use super::{Edit, SubMode, Technique};
use crate::corpus::Story;
use crate::error::{Error, Result};
use crate::knowledge::{VerbClass, VerbLexicon, VerbSlot};

const NOT: &str = "not";
const PERFECT_AUX: [&str; 4] = ["have", "has", "had", "having"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegationRule {
    /// `not` after the verb (be, modals).
    AfterVerb,
    /// `not` before the verb (participles, gerunds).
    BeforeVerb,
    /// `do/does/did not` plus the base form.
    DoSupport(VerbSlot),
}

pub fn is_negation(token: &str, verbs: &VerbLexicon) -> bool {
    token == NOT || verbs.expand(token).is_some()
}

pub fn has_negation(sentence: &[String], verbs: &VerbLexicon) -> bool {
    sentence.iter().any(|t| is_negation(t, verbs))
}

/// The token index and rule `add_negation` would use.
pub fn find_negation_target(sentence: &[String], verbs: &VerbLexicon) -> Option<(usize, NegationRule)> {
    let classes: Vec<VerbClass> = sentence.iter().map(|t| verbs.classify(t)).collect();
    let first = |pred: &dyn Fn(usize) -> bool| (0..sentence.len()).find(|&i| pred(i));

    if let Some(i) = first(&|i| matches!(classes[i], VerbClass::Be | VerbClass::Modal)) {
        return Some((i, NegationRule::AfterVerb));
    }
    let participle = |i: usize| {
        classes[i] == VerbClass::PastParticiple
            || (i > 0
                && PERFECT_AUX.contains(&sentence[i - 1].as_str())
                && verbs.fills_slot(&sentence[i], VerbSlot::PastParticiple))
    };
    if let Some(i) = first(&participle) {
        return Some((i, NegationRule::BeforeVerb));
    }
    if let Some(i) = first(&|i| classes[i] == VerbClass::Gerund) {
        return Some((i, NegationRule::BeforeVerb));
    }
    first(&|i| matches!(classes[i], VerbClass::Base | VerbClass::ThirdSingular | VerbClass::Past)).map(|i| {
        let slot = match classes[i] {
            VerbClass::Base => VerbSlot::Base,
            VerbClass::ThirdSingular => VerbSlot::ThirdSingular,
            _ => VerbSlot::Past,
        };
        (i, NegationRule::DoSupport(slot))
    })
}

/// Negates an affirmative sentence. With probability `contraction_prob` the
/// inserted `not` merges with the preceding auxiliary (`was not` -> `wasn't`).
pub fn add_negation<R: Rng + ?Sized>(
    sentence: &[String],
    verbs: &VerbLexicon,
    contraction_prob: f64,
    rng: &mut R,
) -> Result<Vec<String>> {
    if has_negation(sentence, verbs) {
        return Err(Error::Inapplicable("sentence is already negated"));
    }
    let (i, rule) = find_negation_target(sentence, verbs).ok_or(Error::Inapplicable("sentence has no verb"))?;
    let mut out: Vec<String> = sentence[..i].to_vec();
    let not_at = match rule {
        NegationRule::AfterVerb => {
            out.push(sentence[i].clone());
            out.push(NOT.into());
            out.len() - 1
        }
        NegationRule::BeforeVerb => {
            out.push(NOT.into());
            out.push(sentence[i].clone());
            out.len() - 2
        }
        NegationRule::DoSupport(slot) => {
            let aux = match slot {
                VerbSlot::Base => "do",
                VerbSlot::ThirdSingular => "does",
                _ => "did",
            };
            let base = verbs.base_of(&sentence[i]).unwrap_or(&sentence[i]).to_string();
            out.extend([aux.to_string(), NOT.into(), base]);
            out.len() - 2
        }
    };
    out.extend_from_slice(&sentence[i + 1..]);
    if not_at > 0 && contraction_prob > 0.0 {
        if let Some(short) = verbs.contract(&out[not_at - 1]) {
            if rng.random_bool(contraction_prob.min(1.0)) {
                out.splice(not_at - 1..=not_at, [short.to_string()]);
            }
        }
    }
    Ok(out)
}

/// Removes the first negation, expanding a contraction first and collapsing
/// `do/does/did not v` back into the inflected verb.
pub fn remove_negation(sentence: &[String], verbs: &VerbLexicon) -> Result<Vec<String>> {
    let pos = sentence
        .iter()
        .position(|t| is_negation(t, verbs))
        .ok_or(Error::Inapplicable("sentence has no negation"))?;
    let mut tokens = sentence.to_vec();
    let n = if tokens[pos] == NOT {
        pos
    } else {
        let stem = verbs.expand(&tokens[pos]).expect("checked by is_negation");
        tokens.splice(pos..=pos, [stem, NOT.to_string()]);
        pos + 1
    };
    let aux_slot = match n.checked_sub(1).map(|p| tokens[p].as_str()) {
        Some("do") => Some(VerbSlot::Base),
        Some("does") => Some(VerbSlot::ThirdSingular),
        Some("did") => Some(VerbSlot::Past),
        _ => None,
    };
    if let (Some(slot), Some(next)) = (aux_slot, tokens.get(n + 1)) {
        if let Some(form) = verbs.base_of(next).and_then(|b| verbs.inflect(b, slot)) {
            let form = form.to_string();
            tokens.splice(n - 1..=n + 1, [form]);
            return Ok(tokens);
        }
    }
    tokens.remove(n);
    Ok(tokens)
}

/// Adds or removes negation in one uniformly chosen eligible body sentence:
/// negated sentences lose their negation, others gain one.
pub fn alter_negation<R: Rng + ?Sized>(
    story: &Story,
    verbs: &VerbLexicon,
    contraction_prob: f64,
    rng: &mut R,
) -> Result<(Story, Vec<Edit>)> {
    let eligible: Vec<usize> = story
        .body
        .iter()
        .enumerate()
        .filter(|(_, s)| has_negation(s, verbs) || find_negation_target(s, verbs).is_some())
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return Err(Error::Inapplicable("no sentence can be negated or affirmed"));
    }
    let i = eligible[rng.random_range(0..eligible.len())];
    let before = &story.body[i];
    let (after, mode) = if has_negation(before, verbs) {
        (remove_negation(before, verbs)?, SubMode::Remove)
    } else {
        (add_negation(before, verbs, contraction_prob, rng)?, SubMode::Add)
    };
    let edit = Edit::sentence_diff(Technique::Negation, mode, i, before, &after);
    let mut out = story.clone();
    out.body[i] = after;
    Ok((out, vec![edit]))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{story, toks};
    use super::*;
    use crate::rng::substream;

    fn add(s: &str) -> String {
        add_negation(&toks(s), &VerbLexicon::bundled(), 0.0, &mut substream(0, "n")).unwrap().join(" ")
    }

    fn remove(s: &str) -> String {
        remove_negation(&toks(s), &VerbLexicon::bundled()).unwrap().join(" ")
    }

    #[test]
    fn rule_table_forward() {
        assert_eq!(add("failure was an option ."), "failure was not an option .");
        assert_eq!(add("i can walk well ."), "i can not walk well .");
        assert_eq!(add("i go through the park ."), "i do not go through the park .");
        assert_eq!(add("he goes through the park ."), "he does not go through the park .");
        assert_eq!(add("he went through the park ."), "he did not go through the park .");
        assert_eq!(add("his insurance rate had gone up ."), "his insurance rate had not gone up .");
        assert_eq!(add("she ended up going elsewhere ."), "she ended up not going elsewhere .");
    }

    #[test]
    fn rule_table_reverse() {
        assert_eq!(remove("i can not walk well ."), "i can walk well .");
        assert_eq!(remove("he did not go ."), "he went .");
        assert_eq!(remove("he does not go ."), "he goes .");
        assert_eq!(remove("i don't go ."), "i go .");
        assert_eq!(remove("she wasn't late ."), "she was late .");
        assert_eq!(remove("he won't stop ."), "he will stop .");
        assert_eq!(remove("she ended up not going elsewhere ."), "she ended up going elsewhere .");
    }

    #[test]
    fn perfect_auxiliary_takes_not_before_regular_participle() {
        assert_eq!(add("he had walked home ."), "he had not walked home .");
        assert_eq!(add("he had a dog ."), "he did not have a dog .");
    }

    #[test]
    fn contraction_merges_with_the_auxiliary() {
        let lex = VerbLexicon::bundled();
        let out = add_negation(&toks("he went home ."), &lex, 1.0, &mut substream(0, "n")).unwrap();
        assert_eq!(out, toks("he didn't go home ."));
        let out = add_negation(&toks("i am here ."), &lex, 1.0, &mut substream(0, "n")).unwrap();
        assert_eq!(out, toks("i am not here ."));
        assert_eq!(remove_negation(&out, &lex).unwrap(), toks("i am here ."));
    }

    #[test]
    fn inapplicable_cases() {
        let lex = VerbLexicon::bundled();
        let mut rng = substream(0, "n");
        assert!(add_negation(&toks("the big table ."), &lex, 0.0, &mut rng).unwrap_err().is_inapplicable());
        assert!(add_negation(&toks("he did not go ."), &lex, 0.0, &mut rng).unwrap_err().is_inapplicable());
        assert!(remove_negation(&toks("he went ."), &lex).unwrap_err().is_inapplicable());
    }

    #[test]
    fn alter_negation_changes_one_sentence() {
        let lex = VerbLexicon::bundled();
        let s = story("t", &["the weather was crisp and cool .", "ken went several more miles out of his way ."]);
        let mut rng = substream(9, "n");
        for _ in 0..50 {
            let (out, edits) = alter_negation(&s, &lex, 0.0, &mut rng).unwrap();
            let diff: Vec<usize> = (0..2).filter(|&i| out.body[i] != s.body[i]).collect();
            assert_eq!(diff.len(), 1);
            assert_eq!(edits[0].sub_mode, SubMode::Add);
            if diff[0] == 1 {
                assert_eq!(out.body[1], toks("ken did not go several more miles out of his way ."));
                assert_eq!(edits[0].before, "went");
                assert_eq!(edits[0].after, "did not go");
            }
        }
    }

    #[test]
    fn fully_negated_story_loses_one_negation() {
        let lex = VerbLexicon::bundled();
        let s = story("t", &["he did not go .", "she was not late ."]);
        let (out, edits) = alter_negation(&s, &lex, 0.5, &mut substream(1, "n")).unwrap();
        assert_eq!(edits[0].sub_mode, SubMode::Remove);
        let negated = out.body.iter().filter(|x| has_negation(x, &lex)).count();
        assert_eq!(negated, 1);
    }
}
