//! TESGAN: unconditional text synthesis by adversarial training over
//! continuous "seed" embedding spaces.
//!
//! A frozen autoregressive language model (the seed interpreter) decodes an
//! `L x d` seed matrix into text. Real seeds are sigmoid-squashed embeddings
//! of first sentences; a convolutional generator maps uniform noise to fake
//! seeds and is trained against two discriminators (structure and order)
//! plus two auxiliary losses (distribution and frame prediction). Synthesis
//! is then seed generation from noise followed by decoding.
//!
//! Module map:
//! - [`corpus`]: multi-turn datasets, token grids, seed sentences
//! - [`tokenizer`]: byte-pair encoding trained on the corpus
//! - [`interpreter`]: the frozen seed interpretation language model
//! - [`generator`]: noise-to-seed transposed-convolution generator
//! - [`discriminators`]: seed structure (SSD) and seed order (SOD) critics
//! - [`objectives`]: BCE, seed distribution (SDP) and seed frame (SFP) losses
//! - [`trainer`]: the alternating adversarial schedule and synthesis
//! - [`evaluation`]: FBD, MSJ, DSR, LM score, Self-BLEU
//! - [`config`]: run configuration files and snapshots
//! - [`nn`]: tensor building blocks shared by the models

pub mod error;
pub mod nn;

pub use error::{Error, Result};

use candle_core::{DType, Device};

/// All model arithmetic runs in f64 on the CPU backend.
pub const DTYPE: DType = DType::F64;

/// The compute device used throughout.
pub fn device() -> Device {
    Device::Cpu
}
