//! Tensor building blocks: parameter registry, initializers, layers, the
//! Adam optimizer, and the checkpoint container.
//!
//! Everything here runs in f64 on CPU and keeps gradients flowing through
//! candle's tape. Layers that candle only ships with f32 kernels or without
//! a backward pass (layer norm, transposed convolution) are composed from
//! differentiable primitives instead.

mod adam;
mod attention;
mod checkpoint;
mod conv;
pub mod init;
mod linear;
mod lstm;
mod norm;
mod params;

pub use adam::Adam;
pub use attention::{causal_mask, MultiHeadAttention, NormStyle, TransformerBlock};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use conv::ConvTranspose1d;
pub use linear::Linear;
pub use lstm::{BiLstm, LstmLayer};
pub use norm::LayerNorm;
pub use params::ParamSet;

use crate::error::Result;
use candle_core::Tensor;

/// Leaky rectifier; `slope` must lie in (0, 1) so `max(x, slope*x)` selects
/// the identity branch for positive inputs.
pub fn leaky_relu(x: &Tensor, slope: f64) -> Result<Tensor> {
    debug_assert!(slope > 0.0 && slope < 1.0);
    Ok(x.maximum(&(x * slope)?)?)
}

/// Scalar sigmoid on a tensor.
pub fn sigmoid(x: &Tensor) -> Result<Tensor> {
    Ok(candle_nn::ops::sigmoid(x)?)
}

/// True when every element of the scalar tensor is finite.
pub fn is_finite_scalar(x: &Tensor) -> Result<bool> {
    let v = x.to_dtype(candle_core::DType::F64)?.to_scalar::<f64>()?;
    Ok(v.is_finite())
}
