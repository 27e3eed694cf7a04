//! Run configuration: one TOML file with paths, data, mixer, model and
//! training tables plus the global seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{ModelConfig, TrainConfig};
use crate::perturb::MixerConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: PathBuf,
    pub kb: PathBuf,
    pub pos: PathBuf,
    pub verbs: PathBuf,
    pub names: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Continuations are cut to whole sentences within this many tokens.
    pub max_words: usize,
    pub min_freq: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig { max_words: 200, min_freq: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub paths: PathsConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub mixer: MixerConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.train.seed = cfg.seed;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses `path`, resolves relative paths against its directory and
    /// validates the result.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        for slot in [&mut p.corpus, &mut p.kb, &mut p.pos, &mut p.verbs, &mut p.names, &mut p.out] {
            if slot.is_relative() {
                *slot = base.join(&*slot);
            }
        }
        if let Some(a) = p.annotations.as_mut().filter(|a| a.is_relative()) {
            *a = base.join(&*a);
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.train.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.paths;
        let inputs = [&p.corpus, &p.kb, &p.pos, &p.verbs, &p.names];
        for path in inputs.into_iter().chain(p.annotations.as_ref()) {
            if !path.is_file() {
                return Err(Error::Config(format!("input file {} does not exist", path.display())));
            }
        }
        if self.data.max_words == 0 || self.data.min_freq == 0 {
            return Err(Error::Config("max_words and min_freq must be at least 1".into()));
        }
        if self.seed != self.train.seed {
            return Err(Error::Config("train.seed must equal the global seed".into()));
        }
        self.mixer.validate()?;
        let mut model = self.model;
        if model.vocab_size == 0 {
            model.vocab_size = crate::corpus::Vocab::from_tokens(Vec::new()).len() + 1;
        }
        model.validate()?;
        self.train.validate()
    }

    /// SHA-256 over the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn annotations(&self) -> Result<&Path> {
        self.paths
            .annotations
            .as_deref()
            .ok_or_else(|| Error::Config("paths.annotations is not set".into()))
    }
}
