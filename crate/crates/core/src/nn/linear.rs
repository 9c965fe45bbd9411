//! Affine layer over the last axis.

use crate::error::Result;
use crate::nn::{init, ParamSet};
use candle_core::{Tensor, Var};
use rand::Rng;

/// `y = x W + b` with `W` stored as `(in, out)` so batched inputs go through
/// a single broadcast matmul.
#[derive(Debug)]
pub struct Linear {
    weight: Var,
    bias: Var,
}

impl Linear {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        in_dim: usize,
        out_dim: usize,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        let weight = params.var(&format!("{name}.weight"), init::normal(rng, std, &[in_dim, out_dim])?)?;
        let bias = params.var(&format!("{name}.bias"), init::normal(rng, std, &[out_dim])?)?;
        Ok(Self { weight, bias })
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(x.broadcast_matmul(self.weight.as_tensor())?
            .broadcast_add(self.bias.as_tensor())?)
    }

    pub fn in_dim(&self) -> usize {
        self.weight.as_tensor().dims()[0]
    }

    pub fn out_dim(&self) -> usize {
        self.weight.as_tensor().dims()[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn forward_shape_and_bias() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut ps = ParamSet::new();
        let lin = Linear::new(&mut ps, "l", 3, 5, &mut rng, 0.1).unwrap();
        let x = init::zeros(&[2, 4, 3]).unwrap();
        let y = lin.forward(&x).unwrap();
        assert_eq!(y.dims(), &[2, 4, 5]);
        // zero input leaves only the bias
        let b: Vec<f64> = lin.bias.as_tensor().to_vec1().unwrap();
        let y0: Vec<f64> = y.narrow(0, 0, 1).unwrap().narrow(1, 0, 1).unwrap().flatten_all().unwrap().to_vec1().unwrap();
        assert_eq!(y0, b);
    }
}
