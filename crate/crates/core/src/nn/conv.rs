//! 1-D transposed convolution composed from zero-stuffing and a stride-1
//! convolution.
//!
//! candle ships a native `conv_transpose1d` forward but no backward for it;
//! the classic equivalence (insert `stride - 1` zeros between inputs, pad by
//! `kernel - 1 - padding`, convolve with the flipped kernel) uses only ops
//! the tape can differentiate, so the generator stays trainable.

use crate::error::{Error, Result};
use crate::nn::{init, ParamSet};
use crate::device;
use candle_core::{Tensor, Var};
use rand::Rng;

#[derive(Debug)]
pub struct ConvTranspose1d {
    /// Stored in candle's transposed layout `(c_in, c_out, kernel)`.
    weight: Var,
    bias: Var,
    stride: usize,
    padding: usize,
}

impl ConvTranspose1d {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        c_in: usize,
        c_out: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        rng: &mut impl Rng,
        std: f64,
    ) -> Result<Self> {
        if stride == 0 || kernel == 0 {
            return Err(Error::validation("kernel and stride must be positive"));
        }
        if padding + 1 > kernel {
            return Err(Error::validation(format!(
                "padding {padding} too large for kernel {kernel}"
            )));
        }
        Ok(Self {
            weight: params.var(
                &format!("{name}.weight"),
                init::normal(rng, std, &[c_in, c_out, kernel])?,
            )?,
            bias: params.var(&format!("{name}.bias"), init::normal(rng, std, &[c_out])?)?,
            stride,
            padding,
        })
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len - 1) * self.stride + self.kernel() - 2 * self.padding
    }

    fn kernel(&self) -> usize {
        self.weight.as_tensor().dims()[2]
    }

    pub fn param_count(&self) -> usize {
        self.weight.as_tensor().elem_count() + self.bias.as_tensor().elem_count()
    }

    /// `(B, c_in, L)` to `(B, c_out, (L-1)*stride + kernel - 2*padding)`.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (batch, c_in, len) = x.dims3()?;
        let w_dims = self.weight.as_tensor().dims3()?;
        if c_in != w_dims.0 {
            return Err(Error::validation(format!(
                "conv-transpose input has {c_in} channels, weight expects {}",
                w_dims.0
            )));
        }
        let kernel = self.kernel();

        // zero-stuff along length: value i lands at position i*stride
        let stuffed = if self.stride == 1 {
            x.clone()
        } else {
            let zeros = x.zeros_like()?;
            let mut parts = vec![x.clone()];
            for _ in 1..self.stride {
                parts.push(zeros.clone());
            }
            let refs: Vec<&Tensor> = parts.iter().collect();
            Tensor::stack(&refs, 3)?
                .reshape((batch, c_in, len * self.stride))?
                .narrow(2, 0, (len - 1) * self.stride + 1)?
        };

        let side = kernel - 1 - self.padding;
        let padded = stuffed.pad_with_zeros(2, side, side)?;

        // conv1d wants (c_out, c_in, k) with the taps reversed
        let rev: Vec<u32> = (0..kernel as u32).rev().collect();
        let rev_idx = Tensor::from_vec(rev, &[kernel], &device())?;
        let flipped = self
            .weight
            .as_tensor()
            .transpose(0, 1)?
            .index_select(&rev_idx, 2)?
            .contiguous()?;

        let out = padded.conv1d(&flipped, 0, 1, 1, 1)?;
        Ok(out.broadcast_add(&self.bias.as_tensor().reshape((1, w_dims.1, 1))?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// The composed path must match candle's native forward bit-for-bit in
    /// structure (same math, f64), so compare at tight tolerance.
    #[test]
    fn matches_native_conv_transpose_forward() {
        for (c_in, c_out, kernel, stride, padding, len) in [
            (4, 5, 4, 2, 1, 3),
            (3, 2, 2, 2, 0, 5),
            (2, 3, 5, 3, 2, 4),
            (6, 6, 4, 1, 1, 7),
        ] {
            let mut rng = ChaCha20Rng::seed_from_u64(11);
            let mut ps = ParamSet::new();
            let conv = ConvTranspose1d::new(
                &mut ps, "c", c_in, c_out, kernel, stride, padding, &mut rng, 0.5,
            )
            .unwrap();
            let x = init::normal(&mut rng, 1.0, &[2, c_in, len]).unwrap();
            let ours = conv.forward(&x).unwrap();
            let native = x
                .conv_transpose1d(conv.weight.as_tensor(), padding, 0, stride, 1, 1)
                .unwrap()
                .broadcast_add(&conv.bias.as_tensor().reshape((1, c_out, 1)).unwrap())
                .unwrap();
            assert_eq!(ours.dims(), native.dims());
            assert_eq!(ours.dims()[2], conv.output_len(len));
            let a: Vec<f64> = ours.flatten_all().unwrap().to_vec1().unwrap();
            let b: Vec<f64> = native.flatten_all().unwrap().to_vec1().unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn gradients_reach_the_weights() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut ps = ParamSet::new();
        let conv = ConvTranspose1d::new(&mut ps, "c", 3, 4, 4, 2, 1, &mut rng, 0.2).unwrap();
        let x = init::normal(&mut rng, 1.0, &[1, 3, 4]).unwrap();
        let loss = conv.forward(&x).unwrap().sqr().unwrap().sum_all().unwrap();
        let grads = loss.backward().unwrap();
        for var in ps.vars() {
            let g = grads.get(var.as_tensor()).expect("missing grad");
            let any_nonzero = g
                .flatten_all()
                .unwrap()
                .to_vec1::<f64>()
                .unwrap()
                .iter()
                .any(|v| v.abs() > 0.0);
            assert!(any_nonzero);
        }
    }
}
