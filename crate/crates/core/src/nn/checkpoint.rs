//! Versioned binary checkpoint container.
//!
//! Layout: magic, format version, a JSON metadata blob (model kind, dims,
//! tokenizer id, mode flags), then named f64 tensors. All integers are
//! little-endian u64 unless noted.

use crate::error::{Error, Result};
use crate::device;
use candle_core::Tensor;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"TESGANCK";
const VERSION: u32 = 1;

/// A loaded checkpoint: metadata plus named tensors.
pub struct Checkpoint {
    pub meta: serde_json::Value,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn meta_str(&self, key: &str) -> Result<String> {
        self.meta
            .get(key)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| Error::validation(format!("checkpoint metadata missing '{key}'")))
    }

    pub fn meta_usize(&self, key: &str) -> Result<usize> {
        self.meta
            .get(key)
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| Error::validation(format!("checkpoint metadata missing '{key}'")))
    }

    pub fn meta_f64(&self, key: &str) -> Result<f64> {
        self.meta
            .get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::validation(format!("checkpoint metadata missing '{key}'")))
    }
}

pub fn save_checkpoint(
    path: &Path,
    meta: &serde_json::Value,
    tensors: &[(String, Tensor)],
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    let meta_bytes = serde_json::to_vec(meta).expect("metadata serializes");
    w.write_all(&(meta_bytes.len() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&meta_bytes).map_err(io_err)?;
    w.write_all(&(tensors.len() as u64).to_le_bytes()).map_err(io_err)?;
    for (name, tensor) in tensors {
        let name_bytes = name.as_bytes();
        w.write_all(&(name_bytes.len() as u64).to_le_bytes()).map_err(io_err)?;
        w.write_all(name_bytes).map_err(io_err)?;
        let dims = tensor.dims();
        w.write_all(&(dims.len() as u64).to_le_bytes()).map_err(io_err)?;
        for d in dims {
            w.write_all(&(*d as u64).to_le_bytes()).map_err(io_err)?;
        }
        let data: Vec<f64> = tensor.flatten_all()?.to_vec1()?;
        for x in data {
            w.write_all(&x.to_le_bytes()).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |msg: &str| Error::Checkpoint {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };

    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic, path)?;
    if &magic != MAGIC {
        return Err(bad("not a checkpoint file (bad magic)"));
    }
    let version = read_u32(&mut r, path)?;
    if version != VERSION {
        return Err(bad(&format!("unsupported checkpoint version {version}")));
    }
    let meta_len = read_u64(&mut r, path)? as usize;
    let mut meta_bytes = vec![0u8; meta_len];
    read_exact(&mut r, &mut meta_bytes, path)?;
    let meta: serde_json::Value =
        serde_json::from_slice(&meta_bytes).map_err(|e| bad(&format!("metadata: {e}")))?;

    let n_tensors = read_u64(&mut r, path)? as usize;
    let mut tensors = Vec::with_capacity(n_tensors);
    for _ in 0..n_tensors {
        let name_len = read_u64(&mut r, path)? as usize;
        let mut name_bytes = vec![0u8; name_len];
        read_exact(&mut r, &mut name_bytes, path)?;
        let name = String::from_utf8(name_bytes).map_err(|_| bad("tensor name not utf-8"))?;
        let ndims = read_u64(&mut r, path)? as usize;
        let mut dims = Vec::with_capacity(ndims);
        for _ in 0..ndims {
            dims.push(read_u64(&mut r, path)? as usize);
        }
        let count: usize = dims.iter().product();
        let mut data = Vec::with_capacity(count);
        let mut buf = [0u8; 8];
        for _ in 0..count {
            read_exact(&mut r, &mut buf, path)?;
            data.push(f64::from_le_bytes(buf));
        }
        tensors.push((name, Tensor::from_vec(data, dims.as_slice(), &device())?));
    }
    Ok(Checkpoint { meta, tensors })
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| Error::io(path, e))
}

fn read_u32(r: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, path)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, path)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let t1 = init::normal(&mut rng, 1.0, &[3, 4]).unwrap();
        let t2 = init::normal(&mut rng, 1.0, &[5]).unwrap();
        let meta = serde_json::json!({"kind": "test", "dim": 4});
        save_checkpoint(
            &path,
            &meta,
            &[("a".to_string(), t1.clone()), ("b".to_string(), t2.clone())],
        )
        .unwrap();
        let ck = load_checkpoint(&path).unwrap();
        assert_eq!(ck.meta_str("kind").unwrap(), "test");
        assert_eq!(ck.meta_usize("dim").unwrap(), 4);
        assert_eq!(ck.tensors.len(), 2);
        assert_eq!(
            ck.tensors[0].1.to_vec2::<f64>().unwrap(),
            t1.to_vec2::<f64>().unwrap()
        );
        assert_eq!(
            ck.tensors[1].1.to_vec1::<f64>().unwrap(),
            t2.to_vec1::<f64>().unwrap()
        );
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ckpt");
        std::fs::write(&path, b"definitely not a checkpoint").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
