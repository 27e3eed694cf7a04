//! Commonsense triples and the lexicons derived from them: keywords,
//! antonyms, coarse part-of-speech tags, verb inflections and keyword
//! mention frequencies.

mod freq;
mod kb;
mod pos;
mod verb_data;
mod verbs;

pub use freq::{mention_frequency, sample_keyword, FrequencyTable};
pub use kb::{antonyms, KnowledgeBase, Triple, NEGATED_RELATIONS};
pub use pos::{pos_tag, PosLexicon, PosTag};
pub use verbs::{classify_verb, VerbClass, VerbForms, VerbLexicon, VerbSlot};
