//! Decoder-only transformer over the joint text and SVG vocabulary.
//!
//! Inputs are the shifted sequence `<SOS> ++ text ++ icon`. Location tokens
//! are embedded as the sum of a token row and one row each from the x and y
//! coordinate tables; every other token uses a single table row. A learned
//! absolute position table is added on top.

mod checkpoint;
mod forward;
mod loss;
mod params;
mod scalar;
mod session;
mod train;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint, CheckpointHeader, CHECKPOINT_VERSION};
pub use forward::{ForwardMode, Logits};
pub use loss::{loss, LossBreakdown};
pub use params::{Layout, Params, TensorSpec};
pub use scalar::Scalar;
pub use session::Session;
pub use train::{batch_loss_and_grad, clip_global_norm, train_step, AdamConfig, Optimizer, Schedule, StepMetrics, TrainConfig, Trainer};

use crate::joint::JointVocab;
use crate::svg::GRID;
use crate::tokenizer::SVG_VOCAB_SIZE;
use serde::{Deserialize, Serialize};

pub const LN_EPS: f64 = 1e-5;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("token id {id} at position {position} is outside the joint vocabulary")]
    TokenId { id: u32, position: usize },
    #[error("sequence of length {len} exceeds max_len {max}")]
    TooLong { len: usize, max: usize },
    #[error("non-finite loss at step {step}: text {text}, icon {icon}")]
    NonFinite { step: u64, text: f64, icon: f64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How non-location SVG tokens use the coordinate tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordMode {
    /// No coordinate terms.
    #[default]
    Zero,
    /// A learned extra row in each coordinate table.
    LearnedNull,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub layers: usize,
    pub heads: usize,
    pub dim: usize,
    pub dropout: f64,
    pub max_len: usize,
    pub text_vocab_size: usize,
    pub lambda: f64,
    pub seed: u64,
    pub coord_mode: CoordMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            layers: 4,
            heads: 4,
            dim: 128,
            dropout: 0.1,
            max_len: crate::dataset::SEQ_LEN,
            text_vocab_size: 4,
            lambda: 7.0,
            seed: 0,
            coord_mode: CoordMode::Zero,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let sizes = [
            ("layers", self.layers),
            ("heads", self.heads),
            ("dim", self.dim),
            ("max_len", self.max_len),
            ("text_vocab_size", self.text_vocab_size),
        ];
        for (name, v) in sizes {
            if v == 0 {
                return Err(ModelError::Config(format!("{name} must be positive")));
            }
        }
        if self.dim % self.heads != 0 {
            return Err(ModelError::Config(format!("dim {} is not divisible by heads {}", self.dim, self.heads)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ModelError::Config(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(ModelError::Config(format!("lambda {} must be finite and non-negative", self.lambda)));
        }
        Ok(())
    }

    pub fn joint(&self) -> JointVocab {
        JointVocab::new(self.text_vocab_size)
    }

    pub fn head_dim(&self) -> usize {
        self.dim / self.heads
    }

    pub fn coord_rows(&self) -> usize {
        match self.coord_mode {
            CoordMode::Zero => GRID as usize,
            CoordMode::LearnedNull => GRID as usize + 1,
        }
    }

    /// Total scalar parameters:
    ///
    /// ```text
    /// D * (S + 2C + T + 2 + L_max)            embeddings
    ///   + layers * (12 D^2 + 13 D)            blocks
    ///   + 2D                                  final norm
    ///   + (D + 1) * (T + S + 2)               output head
    /// ```
    ///
    /// with `S` the SVG vocabulary, `C` the coordinate rows and `T` the text
    /// vocabulary.
    pub fn param_count(&self) -> usize {
        let d = self.dim;
        let joint = self.text_vocab_size + SVG_VOCAB_SIZE + 2;
        d * (SVG_VOCAB_SIZE + 2 * self.coord_rows() + self.text_vocab_size + 2 + self.max_len)
            + self.layers * (12 * d * d + 13 * d)
            + 2 * d
            + (d + 1) * joint
    }
}
