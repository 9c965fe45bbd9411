//! Deterministic tensor initializers driven by an explicit RNG.
//!
//! candle's built-in random constructors use their own thread-local state;
//! routing every draw through a caller-supplied RNG keeps runs reproducible
//! from a single seed.

use crate::error::Result;
use crate::{device, DTYPE};
use candle_core::Tensor;
use rand::Rng;

/// Zero-mean normal draws with the given standard deviation.
pub fn normal(rng: &mut impl Rng, std: f64, shape: &[usize]) -> Result<Tensor> {
    let n: usize = shape.iter().product();
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(gaussian(rng) * std);
    }
    Ok(Tensor::from_vec(data, shape, &device())?)
}

/// Uniform draws over the half-open interval `[low, high)`.
pub fn uniform(rng: &mut impl Rng, low: f64, high: f64, shape: &[usize]) -> Result<Tensor> {
    let n: usize = shape.iter().product();
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(low + (high - low) * rng.random::<f64>());
    }
    Ok(Tensor::from_vec(data, shape, &device())?)
}

pub fn zeros(shape: &[usize]) -> Result<Tensor> {
    Ok(Tensor::zeros(shape, DTYPE, &device())?)
}

pub fn ones(shape: &[usize]) -> Result<Tensor> {
    Ok(Tensor::ones(shape, DTYPE, &device())?)
}

/// One standard-normal draw via Box-Muller; `random::<f64>()` is in [0, 1).
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn normal_moments() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let t = normal(&mut rng, 0.08, &[200_000]).unwrap();
        let v: Vec<f64> = t.to_vec1().unwrap();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 1e-3, "mean {mean}");
        assert!((var.sqrt() - 0.08).abs() < 2e-3, "std {}", var.sqrt());
    }

    #[test]
    fn uniform_half_open_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let t = uniform(&mut rng, -10.0, 10.0, &[100_000]).unwrap();
        let v: Vec<f64> = t.to_vec1().unwrap();
        assert!(v.iter().all(|x| *x >= -10.0 && *x < 10.0));
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = normal(&mut ChaCha20Rng::seed_from_u64(3), 1.0, &[64]).unwrap();
        let b = normal(&mut ChaCha20Rng::seed_from_u64(3), 1.0, &[64]).unwrap();
        assert_eq!(a.to_vec1::<f64>().unwrap(), b.to_vec1::<f64>().unwrap());
    }
}
