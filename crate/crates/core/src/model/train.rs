use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::batch::{encode_story, EncodedBatch};
use super::encoder::ScorerModel;
use super::params::Params;
use super::ModelConfig;
use crate::corpus::{Story, Vocab};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::perturb::TrainingPair;
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub seed: u64,
    pub clip_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 10,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 10,
            seed: 0,
            clip_norm: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("beta1 and beta2 must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) || !(self.clip_norm > 0.0) {
            return Err(Error::Config("epsilon and clip_norm must be positive".into()));
        }
        Ok(())
    }
}

/// Mean training losses of one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub loss: f64,
    pub classification: f64,
    pub reconstruction: f64,
}

struct Adam<T> {
    m: Params<T>,
    v: Params<T>,
    t: i32,
}

impl<T: Scalar> Adam<T> {
    fn new(cfg: &ModelConfig) -> Self {
        Adam { m: Params::zeros(cfg), v: Params::zeros(cfg), t: 0 }
    }

    fn step(&mut self, params: &mut Params<T>, grads: &Params<T>, tc: &TrainConfig) {
        self.t += 1;
        let (b1, b2) = (T::of(tc.beta1), T::of(tc.beta2));
        let c1 = T::one() - b1.powi(self.t);
        let c2 = T::one() - b2.powi(self.t);
        let lr = T::of(tc.learning_rate);
        let eps = T::of(tc.epsilon);
        let tensors = params.tensors_mut().into_iter().zip(grads.tensors());
        let moments = self.m.tensors_mut().into_iter().zip(self.v.tensors_mut());
        for ((p, g), (m, v)) in tensors.zip(moments) {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (T::one() - b1) * g[i];
                v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
            }
        }
    }
}

/// Trains a freshly initialized model. A zero `vocab_size` in `mcfg` is
/// taken from `vocab`.
pub fn train<T: Scalar>(
    pairs: &[TrainingPair],
    vocab: &Vocab,
    mcfg: &ModelConfig,
    tcfg: &TrainConfig,
) -> Result<(ScorerModel<T>, Vec<EpochLoss>)> {
    let mut cfg = *mcfg;
    if cfg.vocab_size == 0 {
        cfg.vocab_size = vocab.len();
    }
    let model = ScorerModel::new(cfg, tcfg.seed)?;
    train_with_init(model, pairs, vocab, tcfg)
}

/// Continues training `model`, returning it with the per-epoch losses.
pub fn train_with_init<T: Scalar>(
    mut model: ScorerModel<T>,
    pairs: &[TrainingPair],
    vocab: &Vocab,
    tcfg: &TrainConfig,
) -> Result<(ScorerModel<T>, Vec<EpochLoss>)> {
    tcfg.validate()?;
    if model.config.vocab_size != vocab.len() {
        return Err(Error::Config(format!(
            "model vocab_size {} differs from vocabulary size {}",
            model.config.vocab_size,
            vocab.len()
        )));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no training pairs".into()));
    }
    if !pairs.iter().any(|p| p.y == 1) || !pairs.iter().any(|p| p.y == 0) {
        return Err(Error::InvalidArgument("training pairs must contain both labels".into()));
    }
    let max_len = model.config.max_len;
    let lambda = model.config.lambda;
    let inputs: Vec<Vec<usize>> = pairs.iter().map(|p| encode_story(&p.s, vocab, max_len)).collect();
    let targets: Vec<Vec<usize>> = pairs.iter().map(|p| encode_story(&p.r, vocab, max_len)).collect();

    let mut rng = substream(tcfg.seed, "train");
    let mut adam = Adam::new(&model.config);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut history = Vec::with_capacity(tcfg.epochs);
    let clip = T::of(tcfg.clip_norm);
    for epoch in 0..tcfg.epochs {
        order.shuffle(&mut rng);
        let (mut sum, mut sum_c, mut sum_r) = (0.0, 0.0, 0.0);
        for (bi, chunk) in order.chunks(tcfg.batch_size).enumerate() {
            let batch = EncodedBatch::new(
                chunk.iter().map(|&i| inputs[i].clone()).collect(),
                chunk.iter().map(|&i| targets[i].clone()).collect(),
                chunk.iter().map(|&i| pairs[i].y).collect(),
            );
            let (parts, mut grads) = model.loss_and_grad(&batch, lambda, Some(&mut rng))?;
            if !parts.combined.is_finite() || !grads.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: bi });
            }
            let norm = grads.sq_norm().sqrt();
            if norm > clip {
                grads.scale(clip / norm);
            }
            adam.step(&mut model.params, &grads, tcfg);
            let w = chunk.len() as f64;
            sum += parts.combined.to_f64_lossy() * w;
            sum_c += parts.classification.to_f64_lossy() * w;
            sum_r += parts.reconstruction.to_f64_lossy() * w;
        }
        let n = pairs.len() as f64;
        let record = EpochLoss { epoch, loss: sum / n, classification: sum_c / n, reconstruction: sum_r / n };
        log::info!(
            "epoch {epoch}: loss {:.4} (classification {:.4}, reconstruction {:.4})",
            record.loss,
            record.classification,
            record.reconstruction
        );
        history.push(record);
    }
    Ok((model, history))
}

/// Score of a story: words outside the vocabulary map to `UNK` and the
/// sequence is truncated to the model's maximum length.
/// A trained scorer with the vocabulary it was trained against.
#[derive(Debug, Clone)]
pub struct Fitted<T> {
    pub model: ScorerModel<T>,
    pub vocab: Vocab,
    pub history: Vec<EpochLoss>,
}

/// Builds the vocabulary from the pairs' input stories and trains a fresh
/// model on them.
pub fn fit<T: Scalar>(pairs: &[TrainingPair], min_freq: usize, mcfg: &ModelConfig, tcfg: &TrainConfig) -> Result<Fitted<T>> {
    let vocab = Vocab::build(pairs.iter().map(|p| &p.s), min_freq);
    let (model, history) = train(pairs, &vocab, mcfg, tcfg)?;
    Ok(Fitted { model, vocab, history })
}

pub fn score_story<T: Scalar>(model: &ScorerModel<T>, vocab: &Vocab, story: &Story) -> T {
    let ids = encode_story(story, vocab, model.config.max_len);
    let mask = vec![true; ids.len()];
    model.score(&ids, &mask).expect("encoded stories fit the model")
}
