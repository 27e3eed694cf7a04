//! `union`: negative sampling, scorer training and metric evaluation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info};
use union_core::config::RunConfig;
use union_core::pipeline::{self, out_path, ReportFormat, CHECKPOINT_FILE, SCORES_FILE};

#[derive(Parser)]
#[command(name = "union", version, about = "Unreferenced story-quality metric toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the reconstruction loss weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus, lexicons, annotations and config.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        stories: usize,
        #[arg(long, default_value_t = 200)]
        annotated: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build positive and perturbed training pairs.
    Perturb(Common),
    /// Train the scorer on the pairs file.
    Train(Common),
    /// Score stories with a checkpoint.
    Score {
        #[command(flatten)]
        common: Common,
        /// Defaults to the trained checkpoint in the output directory.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stories to score; defaults to the configured annotations.
        #[arg(long)]
        stories: Option<PathBuf>,
    },
    /// Correlate scores with human judgments.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the eight quality-biased annotation subsets.
    Bias {
        #[command(flatten)]
        common: Common,
        /// Also report correlations on each subset.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Retrain without each perturbation technique in turn.
    Ablate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn load_config(c: &Common) -> union_core::Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(seed) = c.seed {
        cfg.set_seed(seed);
    }
    if let Some(lambda) = c.lambda {
        cfg.model.lambda = lambda;
    }
    if let Some(out) = &c.out {
        cfg.paths.out = out.clone();
    }
    cfg.validate()?;
    info!("config {} (hash {}, seed {})", c.config.display(), cfg.hash(), cfg.seed);
    Ok(cfg)
}

fn or_default(path: &Option<PathBuf>, fallback: impl FnOnce() -> union_core::Result<PathBuf>) -> union_core::Result<PathBuf> {
    match path {
        Some(p) => Ok(p.clone()),
        None => fallback(),
    }
}

fn run(cli: Cli) -> union_core::Result<()> {
    match cli.command {
        Command::Synth { out, stories, annotated, seed } => {
            let config = pipeline::synth_dataset(&out, stories, annotated, seed)?;
            info!("wrote synthetic data; config at {}", config.display());
        }
        Command::Perturb(c) => {
            let cfg = load_config(&c)?;
            let summary = pipeline::run_perturb(&cfg)?;
            for id in &summary.skipped {
                info!("skipped {id}: no technique applies");
            }
            eprint!("{summary}");
        }
        Command::Train(c) => {
            let cfg = load_config(&c)?;
            for e in pipeline::run_train(&cfg)? {
                info!(
                    "epoch {} loss {:.5} (classification {:.5}, reconstruction {:.5})",
                    e.epoch, e.loss, e.classification, e.reconstruction
                );
            }
            info!("checkpoint written to {}", out_path(&cfg, CHECKPOINT_FILE).display());
        }
        Command::Score { common, checkpoint, stories } => {
            let cfg = load_config(&common)?;
            let checkpoint = checkpoint.unwrap_or_else(|| out_path(&cfg, CHECKPOINT_FILE));
            let stories = or_default(&stories, || cfg.annotations().map(Path::to_path_buf))?;
            let out = out_path(&cfg, SCORES_FILE);
            let n = pipeline::run_score(&cfg, &checkpoint, &stories, &out)?;
            info!("scored {n} stories into {}", out.display());
        }
        Command::Evaluate { common, scores, annotations, format } => {
            let cfg = load_config(&common)?;
            let scores = scores.unwrap_or_else(|| out_path(&cfg, SCORES_FILE));
            let annotations = or_default(&annotations, || cfg.annotations().map(Path::to_path_buf))?;
            let report = pipeline::run_evaluate(&cfg, &scores, &annotations, format.into())?;
            eprint!("{}", pipeline::render_report(&report, format.into()));
        }
        Command::Bias { common, scores } => {
            let cfg = load_config(&common)?;
            for set in pipeline::run_bias(&cfg, scores.as_deref())? {
                match set.report {
                    Some(r) => info!("set {}: {} stories, pearson {:.4}", set.index, set.size, r.pearson.coef),
                    None => info!("set {}: {} stories", set.index, set.size),
                }
            }
        }
        Command::Ablate { common, format } => {
            let cfg = load_config(&common)?;
            let table = pipeline::run_ablate(&cfg, format.into())?;
            eprint!("{table}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
