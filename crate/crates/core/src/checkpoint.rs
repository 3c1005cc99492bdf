//! Binary checkpoint formats.
//!
//! All multi-byte values are little-endian. Three layouts share the style:
//!
//! Dictionary (`VQDICT\0\0`, version 1): magic, `u32` version, `u32`
//! image_len, `u32` centroid count, then centroid values row-major as `f32`.
//!
//! Distribution (`VQDIST\0\0`, version 1): magic, `u32` version, `u32`
//! dimension, mean as `f64`, then the dense square-root factor `A` row-major
//! as `f64`. `f64` keeps save/resume lossless for the optimizer state.
//!
//! Run archive (`VQNESRUN`, version 1): magic, `u32` version, `u64` config
//! hash, `u32` generation, `u32` inputs, `u32` neurons, RNG state (32-byte
//! seed, `u64` stream, `u128` word position), the canonical config text
//! (`u32` length + UTF-8 bytes), then the embedded dictionary and
//! distribution sections. Carrying the config makes a checkpoint replayable
//! on its own.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compressor::{Centroid, Dictionary};
use crate::controller::ControllerShape;
use crate::error::{Error, Result};
use crate::optimizer::SearchDistribution;

const DICT_MAGIC: &[u8; 8] = b"VQDICT\0\0";
const DIST_MAGIC: &[u8; 8] = b"VQDIST\0\0";
const RUN_MAGIC: &[u8; 8] = b"VQNESRUN";
const VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 8], what: &str) -> Result<()> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    if &buf != magic {
        return Err(Error::Format(format!("bad {what} magic")));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported {what} version {version}"
        )));
    }
    Ok(())
}

pub fn write_dictionary<W: Write>(w: &mut W, dict: &Dictionary) -> Result<()> {
    w.write_all(DICT_MAGIC)?;
    write_u32(w, VERSION)?;
    write_u32(w, dict.image_len() as u32)?;
    write_u32(w, dict.len() as u32)?;
    for centroid in dict.centroids() {
        for value in centroid.values() {
            w.write_all(&value.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dictionary<R: Read>(r: &mut R) -> Result<Dictionary> {
    expect_magic(r, DICT_MAGIC, "dictionary")?;
    let image_len = read_u32(r)? as usize;
    let count = read_u32(r)? as usize;
    let mut dict = Dictionary::new(image_len)?;
    let mut buf = [0u8; 4];
    for _ in 0..count {
        let mut values = Vec::with_capacity(image_len);
        for _ in 0..image_len {
            r.read_exact(&mut buf)?;
            values.push(f32::from_le_bytes(buf));
        }
        dict.push(Centroid::new(values)?)?;
    }
    Ok(dict)
}

pub fn save_dictionary(path: &Path, dict: &Dictionary) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dictionary(&mut w, dict)?;
    w.flush()?;
    Ok(())
}

pub fn load_dictionary(path: &Path) -> Result<Dictionary> {
    read_dictionary(&mut BufReader::new(File::open(path)?))
}

pub fn write_distribution<W: Write>(w: &mut W, dist: &SearchDistribution) -> Result<()> {
    w.write_all(DIST_MAGIC)?;
    write_u32(w, VERSION)?;
    let dim = dist.dim();
    write_u32(w, dim as u32)?;
    for value in dist.mu().iter() {
        w.write_all(&value.to_le_bytes())?;
    }
    for row in 0..dim {
        for col in 0..dim {
            w.write_all(&dist.a_factor()[(row, col)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_distribution<R: Read>(r: &mut R) -> Result<SearchDistribution> {
    expect_magic(r, DIST_MAGIC, "distribution")?;
    let dim = read_u32(r)? as usize;
    let mut buf = [0u8; 8];
    let mut mu = DVector::zeros(dim);
    for i in 0..dim {
        r.read_exact(&mut buf)?;
        mu[i] = f64::from_le_bytes(buf);
    }
    let mut a_factor = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            r.read_exact(&mut buf)?;
            a_factor[(row, col)] = f64::from_le_bytes(buf);
        }
    }
    SearchDistribution::from_parts(mu, a_factor)
}

/// Serializable ChaCha state; restoring it resumes the stream exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngSnapshot {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngSnapshot {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

/// Everything needed to continue a run: generation counter, network shape,
/// RNG state, dictionary and distribution, tied to the config that produced
/// them (hash plus canonical text).
#[derive(Debug, Clone)]
pub struct RunCheckpoint {
    pub config_hash: u64,
    pub generation: u32,
    pub shape: ControllerShape,
    pub rng: RngSnapshot,
    pub config_text: String,
    pub dictionary: Dictionary,
    pub distribution: SearchDistribution,
}

impl RunCheckpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(RUN_MAGIC)?;
        write_u32(&mut w, VERSION)?;
        write_u64(&mut w, self.config_hash)?;
        write_u32(&mut w, self.generation)?;
        write_u32(&mut w, self.shape.n_inputs as u32)?;
        write_u32(&mut w, self.shape.n_neurons as u32)?;
        w.write_all(&self.rng.seed)?;
        write_u64(&mut w, self.rng.stream)?;
        w.write_all(&self.rng.word_pos.to_le_bytes())?;
        write_u32(&mut w, self.config_text.len() as u32)?;
        w.write_all(self.config_text.as_bytes())?;
        write_dictionary(&mut w, &self.dictionary)?;
        write_distribution(&mut w, &self.distribution)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        expect_magic(&mut r, RUN_MAGIC, "run checkpoint")?;
        let config_hash = read_u64(&mut r)?;
        let generation = read_u32(&mut r)?;
        let n_inputs = read_u32(&mut r)? as usize;
        let n_neurons = read_u32(&mut r)? as usize;
        let shape = ControllerShape::new(n_inputs, n_neurons)?;
        let mut seed = [0u8; 32];
        r.read_exact(&mut seed)?;
        let stream = read_u64(&mut r)?;
        let mut word_pos_bytes = [0u8; 16];
        r.read_exact(&mut word_pos_bytes)?;
        let rng = RngSnapshot {
            seed,
            stream,
            word_pos: u128::from_le_bytes(word_pos_bytes),
        };
        let text_len = read_u32(&mut r)? as usize;
        let mut text_bytes = vec![0u8; text_len];
        r.read_exact(&mut text_bytes)?;
        let config_text = String::from_utf8(text_bytes)
            .map_err(|_| Error::Format("checkpoint config text is not utf-8".into()))?;
        let dictionary = read_dictionary(&mut r)?;
        let distribution = read_distribution(&mut r)?;
        let loaded = Self {
            config_hash,
            generation,
            shape,
            rng,
            config_text,
            dictionary,
            distribution,
        };
        loaded.check_consistency()?;
        Ok(loaded)
    }

    /// Distribution dimension must match the shape's weight count and the
    /// code length implied by the dictionary.
    pub fn check_consistency(&self) -> Result<()> {
        if self.shape.n_inputs != self.dictionary.len() {
            return Err(Error::Format(format!(
                "checkpoint inconsistent: {} inputs vs {} centroids",
                self.shape.n_inputs,
                self.dictionary.len()
            )));
        }
        if self.distribution.dim() != self.shape.weight_count() {
            return Err(Error::Format(format!(
                "checkpoint inconsistent: distribution dim {} vs weight count {}",
                self.distribution.dim(),
                self.shape.weight_count()
            )));
        }
        Ok(())
    }

    pub fn verify_config(&self, expected_hash: u64) -> Result<()> {
        if self.config_hash != expected_hash {
            return Err(Error::ConfigMismatch {
                expected: expected_hash,
                got: self.config_hash,
            });
        }
        Ok(())
    }
}
