//! Named parameter registry backing each model.
//!
//! Models register every trainable tensor here once; the registry then
//! serves the optimizer, checkpoints, parameter counting, and the
//! freeze-invariant checksum.

use crate::error::{Error, Result};
use candle_core::{Tensor, Var};
use sha2::{Digest, Sha256};

#[derive(Debug, Default)]
pub struct ParamSet {
    entries: Vec<(String, Var)>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a tensor as a named variable and returns a handle to it.
    pub fn var(&mut self, name: &str, init: Tensor) -> Result<Var> {
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(Error::validation(format!("duplicate parameter {name}")));
        }
        let var = Var::from_tensor(&init)?;
        self.entries.push((name.to_string(), var.clone()));
        Ok(var)
    }

    pub fn named(&self) -> &[(String, Var)] {
        &self.entries
    }

    pub fn vars(&self) -> Vec<Var> {
        self.entries.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, v)| v.as_tensor().elem_count())
            .sum()
    }

    /// SHA-256 over names and little-endian parameter bytes. Two calls agree
    /// iff no parameter changed, which is what the freeze invariants assert.
    pub fn checksum(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        for (name, var) in &self.entries {
            hasher.update(name.as_bytes());
            let flat: Vec<f64> = var.as_tensor().flatten_all()?.to_vec1()?;
            for x in flat {
                hasher.update(x.to_le_bytes());
            }
        }
        Ok(format!("{:x}", hasher.finalize()))
    }

    /// Deep copy of the current parameter values.
    pub fn snapshot(&self) -> Result<Vec<(String, Tensor)>> {
        self.entries
            .iter()
            .map(|(n, v)| Ok((n.clone(), v.as_tensor().copy()?)))
            .collect()
    }

    /// Overwrites parameters from a snapshot or loaded checkpoint; every
    /// registered name must be present with a matching shape.
    pub fn restore(&self, values: &[(String, Tensor)]) -> Result<()> {
        for (name, var) in &self.entries {
            let tensor = values
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t)
                .ok_or_else(|| Error::validation(format!("missing parameter {name}")))?;
            if tensor.dims() != var.as_tensor().dims() {
                return Err(Error::validation(format!(
                    "parameter {name}: shape {:?} does not match checkpoint {:?}",
                    var.as_tensor().dims(),
                    tensor.dims()
                )));
            }
            var.set(tensor)?;
        }
        Ok(())
    }

    /// Empirical standard deviation over all parameters.
    pub fn param_std(&self) -> Result<f64> {
        let mut all = Vec::new();
        for (_, v) in &self.entries {
            all.extend(v.as_tensor().flatten_all()?.to_vec1::<f64>()?);
        }
        let n = all.len() as f64;
        let mean = all.iter().sum::<f64>() / n;
        let var = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Ok(var.sqrt())
    }
}
