//! Transformer encoder scorer with a classification head and a token
//! reconstruction head, trained jointly by hand-written backpropagation.

mod batch;
mod checkpoint;
mod encoder;
mod gradcheck;
mod layers;
mod loss;
mod params;
mod train;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use batch::{encode_story, EncodedBatch};
pub use checkpoint::{load, load_compatible, read_checkpoint, save, write_checkpoint, CheckpointHeader, FORMAT_VERSION, MAGIC};
pub use encoder::{Forward, ScorerModel};
pub use gradcheck::{gradient_check, numeric_gradient, GradCheckReport};
pub use loss::{classification_loss, classification_loss_from_logit, combined_loss, reconstruction_loss, LossParts};
pub use params::{Block, Params};
pub use train::{fit, score_story, train, Fitted, train_with_init, EpochLoss, TrainConfig};

/// Architecture and objective settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub d_model: usize,
    pub layers: usize,
    pub heads: usize,
    pub d_ff: usize,
    /// Maximum sequence length, boundary tokens included.
    pub max_len: usize,
    /// Filled in from the vocabulary when left at zero.
    pub vocab_size: usize,
    /// Weight of the reconstruction loss.
    pub lambda: f64,
    pub dropout: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            d_model: 128,
            layers: 2,
            heads: 4,
            d_ff: 512,
            max_len: 64,
            vocab_size: 0,
            lambda: 0.1,
            dropout: 0.1,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.d_model == 0 || self.heads == 0 || self.d_model % self.heads != 0 {
            return fail("d_model must be a positive multiple of heads");
        }
        if self.d_ff == 0 {
            return fail("d_ff must be positive");
        }
        if self.max_len < 3 {
            return fail("max_len must be at least 3");
        }
        if self.vocab_size < 5 {
            return fail("vocab_size must cover the reserved tokens and at least one word");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return fail("lambda must be a finite non-negative number");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail("dropout must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.heads
    }

    /// Whether a model built for `self` can hold parameters saved for `other`.
    pub fn same_architecture(&self, other: &ModelConfig) -> bool {
        self.d_model == other.d_model
            && self.layers == other.layers
            && self.heads == other.heads
            && self.d_ff == other.d_ff
            && self.max_len == other.max_len
            && self.vocab_size == other.vocab_size
    }
}
