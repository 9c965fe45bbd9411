//! Layer normalization composed from primitive ops.
//!
//! candle-nn's fused layer norm has no f64 CPU kernel, so the forward pass
//! is written out; the tape differentiates every step.

use crate::error::Result;
use crate::nn::{init, ParamSet};
use candle_core::{Tensor, Var};

#[derive(Debug)]
pub struct LayerNorm {
    gamma: Var,
    beta: Var,
    eps: f64,
}

impl LayerNorm {
    pub fn new(params: &mut ParamSet, name: &str, dim: usize) -> Result<Self> {
        Ok(Self {
            gamma: params.var(&format!("{name}.gamma"), init::ones(&[dim])?)?,
            beta: params.var(&format!("{name}.beta"), init::zeros(&[dim])?)?,
            eps: 1e-5,
        })
    }

    /// Same layer with randomly drawn scale/shift, for models whose whole
    /// parameter vector is sampled from one distribution.
    pub fn new_random(
        params: &mut ParamSet,
        name: &str,
        dim: usize,
        rng: &mut impl rand::Rng,
        std: f64,
    ) -> Result<Self> {
        Ok(Self {
            gamma: params.var(&format!("{name}.gamma"), init::normal(rng, std, &[dim])?)?,
            beta: params.var(&format!("{name}.beta"), init::normal(rng, std, &[dim])?)?,
            eps: 1e-5,
        })
    }

    /// Normalizes over the last axis.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let last = x.rank() - 1;
        let mean = x.mean_keepdim(last)?;
        let centered = x.broadcast_sub(&mean)?;
        let var = centered.sqr()?.mean_keepdim(last)?;
        let normed = centered.broadcast_div(&(var + self.eps)?.sqrt()?)?;
        Ok(normed
            .broadcast_mul(self.gamma.as_tensor())?
            .broadcast_add(self.beta.as_tensor())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn normalizes_rows() {
        let mut ps = ParamSet::new();
        let ln = LayerNorm::new(&mut ps, "ln", 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = init::normal(&mut rng, 3.0, &[5, 4]).unwrap();
        let y = ln.forward(&x).unwrap();
        for row in y.to_vec2::<f64>().unwrap() {
            let mean = row.iter().sum::<f64>() / 4.0;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-4);
        }
    }
}
