//! LSTM layers unrolled over candle ops so gradients flow through the tape.

use crate::error::{Error, Result};
use crate::nn::{init, ParamSet};
use candle_core::{Tensor, D};
use rand::Rng;

/// Single-direction LSTM; gate order in the fused weights is i, f, g, o.
#[derive(Debug)]
pub struct LstmLayer {
    w_ih: candle_core::Var,
    w_hh: candle_core::Var,
    bias: candle_core::Var,
    hidden: usize,
}

impl LstmLayer {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        input: usize,
        hidden: usize,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        Ok(Self {
            w_ih: params.var(&format!("{name}.w_ih"), init::normal(rng, std, &[input, 4 * hidden])?)?,
            w_hh: params.var(&format!("{name}.w_hh"), init::normal(rng, std, &[hidden, 4 * hidden])?)?,
            bias: params.var(&format!("{name}.bias"), init::normal(rng, std, &[4 * hidden])?)?,
            hidden,
        })
    }

    /// Runs over `(B, T, input)` in the given time order and returns the
    /// hidden states stacked back into natural order `(B, T, hidden)`.
    fn run(&self, xs: &Tensor, reversed: bool) -> Result<Tensor> {
        let (batch, len, _) = xs.dims3()?;
        let mut h = init::zeros(&[batch, self.hidden])?;
        let mut c = init::zeros(&[batch, self.hidden])?;
        let mut outputs: Vec<Tensor> = Vec::with_capacity(len);
        let order: Vec<usize> = if reversed {
            (0..len).rev().collect()
        } else {
            (0..len).collect()
        };
        for t in order {
            let x_t = xs.narrow(1, t, 1)?.squeeze(1)?;
            let gates = x_t
                .matmul(self.w_ih.as_tensor())?
                .add(&h.matmul(self.w_hh.as_tensor())?)?
                .broadcast_add(self.bias.as_tensor())?;
            let i = candle_nn::ops::sigmoid(&gates.narrow(D::Minus1, 0, self.hidden)?)?;
            let f = candle_nn::ops::sigmoid(&gates.narrow(D::Minus1, self.hidden, self.hidden)?)?;
            let g = gates.narrow(D::Minus1, 2 * self.hidden, self.hidden)?.tanh()?;
            let o = candle_nn::ops::sigmoid(&gates.narrow(D::Minus1, 3 * self.hidden, self.hidden)?)?;
            c = ((f * &c)? + (i * g)?)?;
            h = (o * c.tanh()?)?;
            outputs.push(h.clone());
        }
        if reversed {
            outputs.reverse();
        }
        let stacked = Tensor::stack(&outputs.iter().collect::<Vec<_>>(), 1)?;
        Ok(stacked)
    }
}

/// Stack of bidirectional LSTM layers; each layer emits the concatenation of
/// both directions, so layer `k > 0` consumes `2 * hidden` features.
#[derive(Debug)]
pub struct BiLstm {
    layers: Vec<(LstmLayer, LstmLayer)>,
    hidden: usize,
}

impl BiLstm {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        input: usize,
        hidden: usize,
        layers: usize,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        if layers == 0 {
            return Err(Error::validation("BiLstm needs at least one layer"));
        }
        let mut stack = Vec::with_capacity(layers);
        for l in 0..layers {
            let in_dim = if l == 0 { input } else { 2 * hidden };
            stack.push((
                LstmLayer::new(params, &format!("{name}.l{l}.fwd"), in_dim, hidden, rng, std)?,
                LstmLayer::new(params, &format!("{name}.l{l}.bwd"), in_dim, hidden, rng, std)?,
            ));
        }
        Ok(Self { layers: stack, hidden })
    }

    /// `(B, T, input)` to `(B, T, 2 * hidden)`.
    pub fn forward(&self, xs: &Tensor) -> Result<Tensor> {
        let mut x = xs.clone();
        for (fwd, bwd) in &self.layers {
            let f = fwd.run(&x, false)?;
            let b = bwd.run(&x, true)?;
            x = Tensor::cat(&[&f, &b], D::Minus1)?;
        }
        Ok(x)
    }

    pub fn output_dim(&self) -> usize {
        2 * self.hidden
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn output_shape_and_determinism() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let mut ps = ParamSet::new();
        let lstm = BiLstm::new(&mut ps, "lstm", 6, 5, 2, &mut rng, 0.1).unwrap();
        let x = init::normal(&mut rng, 1.0, &[3, 7, 6]).unwrap();
        let y1 = lstm.forward(&x).unwrap();
        let y2 = lstm.forward(&x).unwrap();
        assert_eq!(y1.dims(), &[3, 7, 10]);
        assert_eq!(
            y1.flatten_all().unwrap().to_vec1::<f64>().unwrap(),
            y2.flatten_all().unwrap().to_vec1::<f64>().unwrap()
        );
    }

    #[test]
    fn backward_direction_sees_the_end_of_the_sequence() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let mut ps = ParamSet::new();
        let lstm = BiLstm::new(&mut ps, "lstm", 4, 3, 1, &mut rng, 0.3).unwrap();
        let x = init::normal(&mut rng, 1.0, &[1, 5, 4]).unwrap();
        let base: Vec<f64> = lstm
            .forward(&x)
            .unwrap()
            .narrow(1, 0, 1)
            .unwrap()
            .flatten_all()
            .unwrap()
            .to_vec1()
            .unwrap();
        // perturb the last timestep; position-0 output must move through the
        // backward pass
        let bump = init::normal(&mut rng, 1.0, &[1, 1, 4]).unwrap();
        let x2 = Tensor::cat(&[&x.narrow(1, 0, 4).unwrap(), &bump], 1).unwrap();
        let moved: Vec<f64> = lstm
            .forward(&x2)
            .unwrap()
            .narrow(1, 0, 1)
            .unwrap()
            .flatten_all()
            .unwrap()
            .to_vec1()
            .unwrap();
        assert!(base.iter().zip(&moved).any(|(a, b)| (a - b).abs() > 1e-9));
    }
}
