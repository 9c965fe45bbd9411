//! Multi-head self-attention and the transformer block used by both the
//! decoder-style interpreter (pre-norm, causal) and the encoder-style
//! discriminator (post-norm, bidirectional).

use crate::error::{Error, Result};
use crate::nn::{LayerNorm, Linear, ParamSet};
use crate::{device, DTYPE};
use candle_core::{Tensor, D};
use rand::Rng;

/// Additive causal mask: `0` on and below the diagonal, a large negative
/// value above it. Softmax then zeroes attention to future positions.
pub fn causal_mask(len: usize) -> Result<Tensor> {
    let mut data = vec![0f64; len * len];
    for i in 0..len {
        for j in (i + 1)..len {
            data[i * len + j] = -1e9;
        }
    }
    Ok(Tensor::from_vec(data, &[len, len], &device())?.to_dtype(DTYPE)?)
}

#[derive(Debug)]
pub struct MultiHeadAttention {
    qkv: Linear,
    out: Linear,
    heads: usize,
    dim: usize,
}

impl MultiHeadAttention {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        dim: usize,
        heads: usize,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        if dim % heads != 0 {
            return Err(Error::validation(format!(
                "attention dim {dim} not divisible by {heads} heads"
            )));
        }
        Ok(Self {
            qkv: Linear::new(params, &format!("{name}.qkv"), dim, 3 * dim, rng, std)?,
            out: Linear::new(params, &format!("{name}.out"), dim, dim, rng, std)?,
            heads,
            dim,
        })
    }

    /// `x`: `(B, T, dim)`; `mask`: optional additive `(T, T)` bias.
    pub fn forward(&self, x: &Tensor, mask: Option<&Tensor>) -> Result<Tensor> {
        let (batch, len, _) = x.dims3()?;
        let head_dim = self.dim / self.heads;
        let qkv = self.qkv.forward(x)?;
        let split = |i: usize| -> Result<Tensor> {
            let part = qkv.narrow(D::Minus1, i * self.dim, self.dim)?;
            Ok(part
                .reshape((batch, len, self.heads, head_dim))?
                .transpose(1, 2)?
                .contiguous()?)
        };
        let q = split(0)?;
        let k = split(1)?;
        let v = split(2)?;

        let scale = 1.0 / (head_dim as f64).sqrt();
        let mut scores = (q.matmul(&k.transpose(2, 3)?.contiguous()?)? * scale)?;
        if let Some(mask) = mask {
            scores = scores.broadcast_add(mask)?;
        }
        let attn = candle_nn::ops::softmax(&scores, D::Minus1)?;
        let ctx = attn
            .matmul(&v)?
            .transpose(1, 2)?
            .reshape((batch, len, self.dim))?;
        self.out.forward(&ctx)
    }
}

/// Residual placement of the layer norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormStyle {
    /// Norm before each sublayer (decoder LM convention).
    Pre,
    /// Norm after each residual sum (encoder convention).
    Post,
}

#[derive(Debug)]
pub struct TransformerBlock {
    ln1: LayerNorm,
    attn: MultiHeadAttention,
    ln2: LayerNorm,
    fc_in: Linear,
    fc_out: Linear,
    style: NormStyle,
}

impl TransformerBlock {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        dim: usize,
        heads: usize,
        ffn_mult: usize,
        style: NormStyle,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        Ok(Self {
            ln1: LayerNorm::new(params, &format!("{name}.ln1"), dim)?,
            attn: MultiHeadAttention::new(params, &format!("{name}.attn"), dim, heads, rng, std)?,
            ln2: LayerNorm::new(params, &format!("{name}.ln2"), dim)?,
            fc_in: Linear::new(params, &format!("{name}.mlp.fc_in"), dim, ffn_mult * dim, rng, std)?,
            fc_out: Linear::new(params, &format!("{name}.mlp.fc_out"), ffn_mult * dim, dim, rng, std)?,
            style,
        })
    }

    fn mlp(&self, x: &Tensor) -> Result<Tensor> {
        self.fc_out.forward(&self.fc_in.forward(x)?.gelu()?)
    }

    pub fn forward(&self, x: &Tensor, mask: Option<&Tensor>) -> Result<Tensor> {
        match self.style {
            NormStyle::Pre => {
                let x = (x + self.attn.forward(&self.ln1.forward(x)?, mask)?)?;
                Ok((&x + self.mlp(&self.ln2.forward(&x)?)?)?)
            }
            NormStyle::Post => {
                let x = self.ln1.forward(&(x + self.attn.forward(x, mask)?)?)?;
                Ok(self.ln2.forward(&(&x + self.mlp(&x)?)?)?)
            }
        }
    }
}
