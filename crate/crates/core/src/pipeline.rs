//! Stages behind the command-line tool. Every stage reads a [`RunConfig`],
//! writes its outputs under `paths.out`, and starts each JSONL output with
//! a `_meta` line carrying the config hash and seed.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::corpus::{
    delexicalize, load_annotations, load_corpus, truncate_words, write_annotations, AnnotatedStory,
    NameLexicon, Story, META_KEY,
};
use crate::error::{Error, Result};
use crate::eval::{
    ablation_table, biased_sets, evaluate_metric, load_scores, score_map, write_scores, AblationSetup, AblationTable,
    CorrelationReport, ScoreRecord, BIASED_SETS,
};
use crate::knowledge::{mention_frequency, FrequencyTable, KnowledgeBase, PosLexicon, VerbLexicon};
use crate::model::{self, fit, score_story, CheckpointHeader, EpochLoss};
use crate::perturb::{build_training_set, load_pairs, write_pairs, MixerConfig, PerturbContext, Technique};
use crate::synth::{annotate, AnnotatorModel, SynthConfig, SyntheticWorld};

pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const LOSS_FILE: &str = "loss.jsonl";
pub const SCORES_FILE: &str = "scores.jsonl";
pub const BIAS_DIR: &str = "bias";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Meta<'a> {
    kind: &'a str,
    config_hash: String,
    seed: u64,
}

fn meta_line(kind: &str, cfg: &RunConfig) -> String {
    let meta = Meta { kind, config_hash: cfg.hash(), seed: cfg.seed };
    serde_json::json!({ META_KEY: meta }).to_string()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes a JSONL file whose first line is the provenance header.
fn write_jsonl(
    path: &Path,
    kind: &str,
    cfg: &RunConfig,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", meta_line(kind, cfg))
        .and_then(|_| body(&mut w))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn out_path(cfg: &RunConfig, file: &str) -> PathBuf {
    cfg.paths.out.join(file)
}

/// Delexicalized and truncated, as every stage sees stories.
pub fn prepare_story(story: &Story, names: &NameLexicon, max_words: usize) -> Story {
    truncate_words(&delexicalize(story, names), max_words)
}

/// Lexicons and the prepared corpus.
#[derive(Debug, Clone)]
pub struct Resources {
    pub corpus: Vec<Story>,
    pub kb: KnowledgeBase,
    pub pos: PosLexicon,
    pub verbs: VerbLexicon,
    pub names: NameLexicon,
    pub ft: FrequencyTable,
}

impl Resources {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let p = &cfg.paths;
        let names = NameLexicon::load(&p.names)?;
        let corpus: Vec<Story> = load_corpus(&p.corpus)?
            .iter()
            .map(|s| prepare_story(s, &names, cfg.data.max_words))
            .collect();
        let kb = KnowledgeBase::load(&p.kb)?;
        let pos = PosLexicon::load(&p.pos)?;
        let verbs = VerbLexicon::load(&p.verbs)?;
        let ft = mention_frequency(&corpus, &kb, &pos);
        Ok(Resources { corpus, kb, pos, verbs, names, ft })
    }

    pub fn context(&self) -> PerturbContext<'_> {
        PerturbContext { kb: &self.kb, ft: &self.ft, pos: &self.pos, verbs: &self.verbs, pool: &self.corpus }
    }

    pub fn prepare_annotations(&self, annotations: Vec<AnnotatedStory>, max_words: usize) -> Vec<AnnotatedStory> {
        annotations
            .into_iter()
            .map(|mut a| {
                a.story = prepare_story(&a.story, &self.names, max_words);
                a
            })
            .collect()
    }
}

/// Counts over the negatives of a training set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerturbSummary {
    pub stories: usize,
    pub pairs: usize,
    pub skipped: Vec<String>,
    /// Negatives containing each technique.
    pub by_technique: [usize; 4],
    /// Negatives whose first applied technique is each technique.
    pub first_technique: [usize; 4],
    /// Negatives by number of distinct techniques applied.
    pub by_count: [usize; 4],
}

impl fmt::Display for PerturbSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let negatives = self.first_technique.iter().sum::<usize>().max(1) as f64;
        writeln!(f, "{} stories, {} pairs, {} skipped", self.stories, self.pairs, self.skipped.len())?;
        for t in Technique::ALL {
            let i = t.index();
            writeln!(
                f,
                "{:<13} used {:>6}  first {:>6} ({:.3})",
                t.as_str(),
                self.by_technique[i],
                self.first_technique[i],
                self.first_technique[i] as f64 / negatives
            )?;
        }
        for (n, &c) in self.by_count.iter().enumerate() {
            writeln!(f, "n={} {:>6} ({:.3})", n + 1, c, c as f64 / negatives)?;
        }
        Ok(())
    }
}

pub fn run_perturb(cfg: &RunConfig) -> Result<PerturbSummary> {
    let res = Resources::load(cfg)?;
    let set = build_training_set(&res.corpus, &res.context(), &cfg.mixer, cfg.seed);
    write_jsonl(&out_path(cfg, PAIRS_FILE), "pairs", cfg, |w| write_pairs(w, &set.pairs))?;
    let mut summary = PerturbSummary {
        stories: res.corpus.len(),
        pairs: set.pairs.len(),
        skipped: set.skipped,
        by_technique: [0; 4],
        first_technique: [0; 4],
        by_count: [0; 4],
    };
    for pair in set.pairs.iter().filter(|p| p.y == 0) {
        let techniques = pair.techniques();
        for t in &techniques {
            summary.by_technique[t.index()] += 1;
        }
        summary.first_technique[techniques[0].index()] += 1;
        summary.by_count[techniques.len() - 1] += 1;
    }
    Ok(summary)
}

pub fn run_train(cfg: &RunConfig) -> Result<Vec<EpochLoss>> {
    let pairs = load_pairs(&out_path(cfg, PAIRS_FILE))?;
    let fitted = fit::<f32>(&pairs, cfg.data.min_freq, &cfg.model, &cfg.train)?;
    let header = CheckpointHeader { config: fitted.model.config, config_hash: cfg.hash(), seed: cfg.seed };
    let ckpt = out_path(cfg, CHECKPOINT_FILE);
    if let Some(dir) = ckpt.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    model::save(&ckpt, &fitted.model, &fitted.vocab, &header)?;
    write_jsonl(&out_path(cfg, LOSS_FILE), "loss", cfg, |w| {
        for epoch in &fitted.history {
            serde_json::to_writer(&mut *w, epoch)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    Ok(fitted.history)
}

/// Scores every story of `stories` (corpus or annotation format) in file
/// order and returns the number scored.
pub fn run_score(cfg: &RunConfig, checkpoint: &Path, stories: &Path, out: &Path) -> Result<usize> {
    let (model, vocab, _) = model::load::<f32>(checkpoint)?;
    let names = NameLexicon::load(&cfg.paths.names)?;
    let records: Vec<ScoreRecord> = load_corpus(stories)?
        .iter()
        .map(|s| {
            let story = prepare_story(s, &names, cfg.data.max_words);
            ScoreRecord { id: s.id.clone(), score: f64::from(score_story(&model, &vocab, &story)) }
        })
        .collect();
    write_jsonl(out, "scores", cfg, |w| write_scores(w, &records))?;
    Ok(records.len())
}

pub fn render_report(report: &CorrelationReport<f64>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => report.to_string(),
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
    }
}

pub fn run_evaluate(cfg: &RunConfig, scores: &Path, annotations: &Path, format: ReportFormat) -> Result<CorrelationReport<f64>> {
    let scores = score_map(&load_scores(scores)?)?;
    let annotations = load_annotations(annotations)?;
    let report = evaluate_metric(&scores, &annotations)?;
    write_text(&out_path(cfg, &format!("report.{}", format.extension())), &render_report(&report, format))?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasedSetReport {
    pub index: u32,
    pub size: usize,
    pub report: Option<CorrelationReport<f64>>,
}

/// Writes the eight biased sets and, given scores, their correlation
/// reports.
pub fn run_bias(cfg: &RunConfig, scores: Option<&Path>) -> Result<Vec<BiasedSetReport>> {
    let annotations = load_annotations(cfg.annotations()?)?;
    let scores = scores.map(|p| load_scores(p).and_then(|s| score_map(&s))).transpose()?;
    let dir = cfg.paths.out.join(BIAS_DIR);
    let mut out = Vec::new();
    for (i, set) in (1..=BIASED_SETS).zip(biased_sets(&annotations, cfg.seed)) {
        let kind = format!("biased_set_{i}");
        write_jsonl(&dir.join(format!("{kind}.jsonl")), &kind, cfg, |w| write_annotations(w, &set))?;
        let report = match &scores {
            Some(s) => match evaluate_metric(s, &set) {
                Ok(r) => Some(r),
                Err(Error::UndefinedCorrelation(_)) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        out.push(BiasedSetReport { index: i, size: set.len(), report });
    }
    if scores.is_some() {
        let json = serde_json::to_string_pretty(&out)? + "\n";
        write_text(&dir.join("reports.json"), &json)?;
    }
    Ok(out)
}

pub fn run_ablate(cfg: &RunConfig, format: ReportFormat) -> Result<AblationTable> {
    let res = Resources::load(cfg)?;
    let annotations = res.prepare_annotations(load_annotations(cfg.annotations()?)?, cfg.data.max_words);
    let setup = AblationSetup {
        corpus: &res.corpus,
        annotations: &annotations,
        ctx: res.context(),
        mixer: cfg.mixer,
        model: cfg.model,
        train: cfg.train,
        min_freq: cfg.data.min_freq,
        seed: cfg.seed,
    };
    let table = ablation_table::<f32>(&setup)?;
    let text = match format {
        ReportFormat::Text => table.to_string(),
        ReportFormat::Json => serde_json::to_string_pretty(&table)? + "\n",
    };
    write_text(&out_path(cfg, &format!("ablation.{}", format.extension())), &text)?;
    Ok(table)
}

/// Writes a synthetic world to `dir`: corpus and lexicons from the first
/// `stories` stories, judged perturbations of `annotated` further stories,
/// and a config file pointing at them. Returns the config path.
pub fn synth_dataset(dir: &Path, stories: usize, annotated: usize, seed: u64) -> Result<PathBuf> {
    let mut world = SyntheticWorld::generate(&SynthConfig::new(stories + annotated, seed));
    let held = world.corpus.split_off(stories);
    let paths = world.write_files(dir)?;

    let train: Vec<Story> = world.corpus.iter().map(|s| delexicalize(s, &world.names)).collect();
    let held: Vec<Story> = held.iter().map(|s| delexicalize(s, &world.names)).collect();
    let ft = mention_frequency(&train, &world.kb, &world.pos);
    let ctx = PerturbContext { kb: &world.kb, ft: &ft, pos: &world.pos, verbs: &world.verbs, pool: &held };
    let pairs = build_training_set(&held, &ctx, &MixerConfig::default(), seed).pairs;
    let annotations = annotate(&pairs, &AnnotatorModel::default(), seed);
    let annotations_path = dir.join("annotations.jsonl");
    crate::synth::write_annotation_file(&annotations_path, &annotations)?;

    let file = |p: &Path| PathBuf::from(p.file_name().expect("file path"));
    let cfg = RunConfig {
        seed,
        paths: crate::config::PathsConfig {
            corpus: file(&paths.corpus),
            kb: file(&paths.kb),
            pos: file(&paths.pos),
            verbs: file(&paths.verbs),
            names: file(&paths.names),
            annotations: Some(file(&annotations_path)),
            out: PathBuf::from("out"),
        },
        data: Default::default(),
        mixer: MixerConfig::default(),
        model: Default::default(),
        train: crate::model::TrainConfig { seed, ..Default::default() },
    };
    let config_path = dir.join(CONFIG_FILE);
    write_text(&config_path, &cfg.to_toml()?)?;
    Ok(config_path)
}
