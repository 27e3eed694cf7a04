//! A small templated story world with known structure, used to exercise the
//! full pipeline without external corpora.
//!
//! Every story has one polarity. Its weather, object adjectives, verbs and
//! closing feeling all come from that side of the antonym pairs, and every
//! body sentence refers to the same object, landmark and protagonist. Each
//! perturbation therefore leaves a visible trace: a mixed polarity, a foreign
//! object, a broken sentence order, a stray `not` or a duplicated span.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_annotations, write_corpus, AnnotatedStory, ErrorType, Gender, NameLexicon, Story, ANNOTATORS};
use crate::error::{Error, Result};
use crate::knowledge::{KnowledgeBase, PosLexicon, PosTag, VerbForms, VerbLexicon};
use crate::perturb::{Technique, TrainingPair};
use crate::rng::substream;

const MALE: [&str; 10] = [
    "james", "john", "robert", "michael", "david", "william", "richard", "thomas", "charles", "daniel",
];
const FEMALE: [&str; 10] = [
    "mary", "patricia", "jennifer", "linda", "elizabeth", "susan", "jessica", "sarah", "karen", "lisa",
];

const TIMES: [&str; 5] = ["morning", "afternoon", "evening", "day", "night"];

struct Topic {
    place: &'static str,
    landmark: &'static str,
    objects: [&'static str; 8],
}

const TOPICS: [Topic; 16] = [
    Topic { place: "park", landmark: "fountain", objects: ["ball", "kite", "frisbee", "bench", "blanket", "puppy", "sandbox", "picnic"] },
    Topic { place: "beach", landmark: "pier", objects: ["shell", "towel", "bucket", "umbrella", "surfboard", "sandcastle", "starfish", "cooler"] },
    Topic { place: "library", landmark: "desk", objects: ["book", "map", "pencil", "notebook", "magazine", "lamp", "dictionary", "atlas"] },
    Topic { place: "kitchen", landmark: "stove", objects: ["cake", "pot", "spoon", "bowl", "pie", "kettle", "sandwich", "teapot"] },
    Topic { place: "garden", landmark: "shed", objects: ["flower", "wheelbarrow", "sprinkler", "trowel", "pumpkin", "tulip", "birdhouse", "scarecrow"] },
    Topic { place: "market", landmark: "stall", objects: ["apple", "basket", "hat", "scarf", "melon", "coin", "necklace", "carpet"] },
    Topic { place: "school", landmark: "blackboard", objects: ["ruler", "backpack", "eraser", "globe", "trophy", "poster", "calculator", "violin"] },
    Topic { place: "forest", landmark: "cabin", objects: ["pinecone", "mushroom", "acorn", "lantern", "tent", "axe", "compass", "canoe"] },
    Topic { place: "zoo", landmark: "aquarium", objects: ["parrot", "peacock", "ticket", "camera", "balloon", "sticker", "penguin", "giraffe"] },
    Topic { place: "garage", landmark: "workbench", objects: ["bicycle", "wrench", "hammer", "tire", "toolbox", "ladder", "motorcycle", "skateboard"] },
    Topic { place: "harbor", landmark: "lighthouse", objects: ["boat", "anchor", "net", "rope", "sail", "buoy", "crate", "oar"] },
    Topic { place: "farm", landmark: "barn", objects: ["tractor", "goat", "chicken", "pig", "haystack", "saddle", "pitchfork", "cart"] },
    Topic { place: "museum", landmark: "gallery", objects: ["painting", "statue", "vase", "sculpture", "fossil", "mask", "tapestry", "helmet"] },
    Topic { place: "bakery", landmark: "oven", objects: ["bread", "cookie", "muffin", "croissant", "bagel", "tray", "pretzel", "donut"] },
    Topic { place: "stadium", landmark: "scoreboard", objects: ["jersey", "whistle", "flag", "glove", "medal", "banner", "drum", "racket"] },
    Topic { place: "office", landmark: "printer", objects: ["laptop", "folder", "stapler", "calendar", "envelope", "mug", "keyboard", "clipboard"] },
];

/// (positive, negative) pairs.
const WEATHER: [(&str, &str); 5] = [
    ("sunny", "rainy"),
    ("warm", "cold"),
    ("bright", "dark"),
    ("calm", "stormy"),
    ("clear", "foggy"),
];

const QUALITIES: [(&str, &str); 15] = [
    ("new", "old"),
    ("clean", "dirty"),
    ("shiny", "dull"),
    ("whole", "broken"),
    ("soft", "hard"),
    ("smooth", "rough"),
    ("fresh", "stale"),
    ("safe", "dangerous"),
    ("strong", "weak"),
    ("full", "empty"),
    ("neat", "messy"),
    ("light", "heavy"),
    ("beautiful", "ugly"),
    ("quiet", "loud"),
    ("sweet", "sour"),
];

const FEELINGS: [(&str, &str); 15] = [
    ("happy", "sad"),
    ("glad", "upset"),
    ("proud", "ashamed"),
    ("relaxed", "tense"),
    ("cheerful", "gloomy"),
    ("grateful", "bitter"),
    ("hopeful", "hopeless"),
    ("brave", "afraid"),
    ("excited", "bored"),
    ("pleased", "annoyed"),
    ("content", "miserable"),
    ("confident", "nervous"),
    ("delighted", "disappointed"),
    ("joyful", "sorrowful"),
    ("peaceful", "anxious"),
];

/// Base forms, (positive, negative).
const VERBS: [(&str, &str); 15] = [
    ("like", "hate"),
    ("find", "lose"),
    ("fix", "break"),
    ("accept", "refuse"),
    ("remember", "forget"),
    ("praise", "blame"),
    ("build", "destroy"),
    ("save", "waste"),
    ("catch", "drop"),
    ("help", "hinder"),
    ("welcome", "reject"),
    ("protect", "harm"),
    ("trust", "doubt"),
    ("admire", "mock"),
    ("enjoy", "dread"),
];

/// Verbs used by the fixed parts of the templates.
const TEMPLATE_VERBS: [&str; 3] = ["go", "see", "feel"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub stories: usize,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(stories: usize, seed: u64) -> Self {
        SynthConfig { stories, seed }
    }
}

/// Generated corpus together with the lexical resources that describe it.
#[derive(Debug, Clone)]
pub struct SyntheticWorld {
    pub corpus: Vec<Story>,
    pub kb: KnowledgeBase,
    pub pos: PosLexicon,
    pub verbs: VerbLexicon,
    pub names: NameLexicon,
}

/// Paths written by [`SyntheticWorld::write_files`].
#[derive(Debug, Clone)]
pub struct SynthPaths {
    pub corpus: PathBuf,
    pub kb: PathBuf,
    pub pos: PathBuf,
    pub verbs: PathBuf,
    pub names: PathBuf,
}

fn verb_lexicon() -> VerbLexicon {
    let bundled = VerbLexicon::bundled();
    let mut lex = VerbLexicon::empty();
    let bases = VERBS.iter().flat_map(|&(p, n)| [p, n]).chain(TEMPLATE_VERBS);
    for base in bases {
        let forms = bundled.forms(base).cloned().unwrap_or_else(|| VerbForms::regular(base));
        lex.push(forms);
    }
    lex
}

fn past(verbs: &VerbLexicon, base: &str) -> String {
    verbs.forms(base).expect("template verb in lexicon").past.clone()
}

fn sentence(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

impl SyntheticWorld {
    pub fn generate(cfg: &SynthConfig) -> Self {
        let verbs = verb_lexicon();

        let mut kb = KnowledgeBase::new();
        for &(a, b) in WEATHER.iter().chain(&QUALITIES).chain(&FEELINGS) {
            kb.insert(a, "Antonym", b);
        }
        for &(a, b) in &VERBS {
            kb.insert(&past(&verbs, a), "Antonym", &past(&verbs, b));
        }
        for topic in &TOPICS {
            kb.insert(topic.landmark, "AtLocation", topic.place);
            for obj in topic.objects {
                kb.insert(obj, "AtLocation", topic.place);
            }
        }

        let mut pos = PosLexicon::new();
        for &(a, b) in WEATHER.iter().chain(&QUALITIES).chain(&FEELINGS) {
            pos.insert(a, PosTag::Adj);
            pos.insert(b, PosTag::Adj);
        }
        for &(a, b) in &VERBS {
            pos.insert(&past(&verbs, a), PosTag::Verb);
            pos.insert(&past(&verbs, b), PosTag::Verb);
        }
        for topic in &TOPICS {
            pos.insert(topic.place, PosTag::Noun);
            pos.insert(topic.landmark, PosTag::Noun);
            for obj in topic.objects {
                pos.insert(obj, PosTag::Noun);
            }
        }
        for t in TIMES {
            pos.insert(t, PosTag::Noun);
        }

        let mut names = NameLexicon::new();
        for n in MALE {
            names.insert(n, Gender::Male).expect("valid name");
        }
        for n in FEMALE {
            names.insert(n, Gender::Female).expect("valid name");
        }

        let mut rng = substream(cfg.seed, "synth");
        let corpus = (0..cfg.stories)
            .map(|i| Self::story(format!("syn-{i:05}"), &verbs, &mut rng))
            .collect();

        SyntheticWorld { corpus, kb, pos, verbs, names }
    }

    fn story<R: Rng + ?Sized>(id: String, verbs: &VerbLexicon, rng: &mut R) -> Story {
        let positive = rng.random_bool(0.5);
        let side = |pair: &(&'static str, &'static str)| if positive { pair.0 } else { pair.1 };
        let (name, pron) = if rng.random_bool(0.5) {
            (*MALE.choose(rng).unwrap(), "he")
        } else {
            (*FEMALE.choose(rng).unwrap(), "she")
        };
        let topic = TOPICS.choose(rng).unwrap();
        let object = *topic.objects.choose(rng).unwrap();
        let weather = side(WEATHER.choose(rng).unwrap());
        let time = *TIMES.choose(rng).unwrap();
        let quality = side(QUALITIES.choose(rng).unwrap());
        let state = side(QUALITIES.choose(rng).unwrap());
        let feeling = side(FEELINGS.choose(rng).unwrap());
        let mut verb_pairs = VERBS.choose_multiple(rng, 2);
        let v1 = past(verbs, side(verb_pairs.next().unwrap()));
        let v2 = past(verbs, side(verb_pairs.next().unwrap()));

        let context = sentence(&format!("{name} went to the {} on a {weather} {time} .", topic.place));
        let body = vec![
            sentence(&format!("{pron} saw a {quality} {object} near the {} .", topic.landmark)),
            sentence(&format!("{pron} {v1} the {object} and {v2} it .")),
            sentence(&format!("then the {object} was {state} .")),
            sentence(&format!("in the end {pron} felt {feeling} and went home .")),
        ];
        Story::new(id, context, body).expect("templates produce valid stories")
    }

    /// Distinct tokens across the corpus.
    pub fn word_inventory(&self) -> BTreeSet<&str> {
        self.corpus.iter().flat_map(|s| s.all_tokens()).map(String::as_str).collect()
    }

    /// Number of antonym pairs in the knowledge base.
    pub fn antonym_pairs(&self) -> usize {
        WEATHER.len() + QUALITIES.len() + FEELINGS.len() + VERBS.len()
    }

    /// Writes `corpus.jsonl`, `kb.tsv`, `pos.tsv`, `verbs.tsv` and `names.tsv`
    /// into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<SynthPaths> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = SynthPaths {
            corpus: dir.join("corpus.jsonl"),
            kb: dir.join("kb.tsv"),
            pos: dir.join("pos.tsv"),
            verbs: dir.join("verbs.tsv"),
            names: dir.join("names.tsv"),
        };
        let raw: Vec<Story> = self
            .corpus
            .iter()
            .map(|s| {
                let mut s = s.clone();
                if let Some(first) = s.context.first_mut() {
                    *first = capitalize(first);
                }
                s
            })
            .collect();
        write_with(&paths.corpus, |w| write_corpus(w, &raw))?;
        write_with(&paths.kb, |w| {
            for t in self.kb.triples() {
                writeln!(w, "{}\t{}\t{}", t.head, t.relation, t.tail)?;
            }
            Ok(())
        })?;
        write_with(&paths.pos, |w| {
            for (token, tag) in self.pos.rows() {
                writeln!(w, "{token}\t{}", tag.as_str())?;
            }
            Ok(())
        })?;
        write_with(&paths.verbs, |w| {
            for f in self.verbs.rows() {
                writeln!(w, "{}\t{}\t{}\t{}\t{}", f.base, f.third_singular, f.past, f.past_participle, f.gerund)?;
            }
            Ok(())
        })?;
        write_with(&paths.names, |w| {
            for (name, gender) in self.names.rows() {
                writeln!(w, "{name}\t{}", gender.code())?;
            }
            Ok(())
        })?;
        Ok(paths)
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub(crate) fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Per-annotator probability of judging a story reasonable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorModel {
    pub p_clean: f64,
    pub p_perturbed: f64,
}

impl Default for AnnotatorModel {
    fn default() -> Self {
        AnnotatorModel { p_clean: 0.85, p_perturbed: 0.15 }
    }
}

/// Error type an annotator reports for a perturbation.
pub fn error_type_of(technique: Technique) -> ErrorType {
    match technique {
        Technique::Repetition => ErrorType::Repe,
        Technique::Substitution => ErrorType::Cohe,
        Technique::Reordering | Technique::Negation => ErrorType::Conf,
    }
}

/// Id given to the annotated copy of a pair's input story.
pub fn annotated_id(pair: &TrainingPair) -> String {
    if pair.y == 1 {
        pair.id().to_string()
    } else {
        format!("{}-neg", pair.id())
    }
}

/// Simulated human judgments of the input side of each pair. Annotators
/// mark clean stories reasonable with probability `p_clean` and perturbed
/// ones with `p_perturbed`; an unreasonable verdict on a perturbed story
/// names the error types of its techniques, plus `chao` for three or more.
pub fn annotate(pairs: &[TrainingPair], model: &AnnotatorModel, seed: u64) -> Vec<AnnotatedStory> {
    pairs
        .iter()
        .map(|pair| {
            let id = annotated_id(pair);
            let mut rng = substream(seed, &format!("annotate/{id}"));
            let p = if pair.y == 1 { model.p_clean } else { model.p_perturbed };
            let mut errors: BTreeSet<ErrorType> = pair.techniques().into_iter().map(error_type_of).collect();
            if pair.techniques().len() >= 3 {
                errors.insert(ErrorType::Chao);
            }
            if errors.is_empty() {
                errors.insert(ErrorType::Others);
            }
            let mut labels = [0u8; ANNOTATORS];
            let mut flags: [BTreeSet<ErrorType>; ANNOTATORS] = Default::default();
            for (label, flag) in labels.iter_mut().zip(flags.iter_mut()) {
                if rng.random_bool(p) {
                    *label = 1;
                } else {
                    *flag = errors.clone();
                }
            }
            let mut story = pair.s.clone();
            story.id = id;
            AnnotatedStory::new(story, labels, flags).expect("flags set exactly on zero labels")
        })
        .collect()
}

/// Writes annotations as JSONL.
pub fn write_annotation_file(path: &Path, annotations: &[AnnotatedStory]) -> Result<()> {
    write_with(path, |w| write_annotations(w, annotations))
}
