//! Checkpoint container:
//!
//! ```text
//! b"VECTICON"  u32 version  u32 header_len  header (JSON, UTF-8)
//! tensors: f32 little-endian, in header order, row-major
//! ```

use super::{ModelConfig, ModelError, Params, TensorSpec};
use crate::text::TextVocab;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"VECTICON";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub version: u32,
    pub config: ModelConfig,
    pub text_vocab_hash: String,
    pub text_vocab: Vec<String>,
    pub tensors: Vec<TensorSpec>,
    pub step: u64,
    /// Effective run configuration, opaque to the model.
    #[serde(default)]
    pub run_config: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub params: Params<f32>,
    pub vocab: TextVocab,
    pub step: u64,
    pub run_config: serde_json::Value,
}

impl Checkpoint {
    pub fn header(&self) -> CheckpointHeader {
        CheckpointHeader {
            version: CHECKPOINT_VERSION,
            config: self.params.config.clone(),
            text_vocab_hash: self.vocab.hash(),
            text_vocab: self.vocab.words().to_vec(),
            tensors: self.params.layout.specs().to_vec(),
            step: self.step,
            run_config: self.run_config.clone(),
        }
    }

    /// Short stable identifier derived from the header and weights.
    pub fn id(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.header()).expect("header serializes"));
        for x in &self.params.data {
            h.update(x.to_le_bytes());
        }
        crate::text::hex(&h.finalize()[..8])
    }
}

fn bad(msg: impl Into<String>) -> ModelError {
    ModelError::Checkpoint(msg.into())
}

pub fn write_checkpoint<W: Write>(mut w: W, ckpt: &Checkpoint) -> Result<(), ModelError> {
    let header = serde_json::to_vec(&ckpt.header()).map_err(|e| bad(e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    for x in &ckpt.params.data {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint, ModelError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CHECKPOINT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    r.read_exact(&mut word)?;
    let mut header = vec![0u8; u32::from_le_bytes(word) as usize];
    r.read_exact(&mut header)?;
    let header: CheckpointHeader = serde_json::from_slice(&header).map_err(|e| bad(format!("header: {e}")))?;
    let vocab = TextVocab::read(header.text_vocab.join("\n").as_bytes()).map_err(|e| bad(e.to_string()))?;
    if vocab.hash() != header.text_vocab_hash {
        return Err(bad("text vocabulary hash mismatch"));
    }
    if vocab.len() != header.config.text_vocab_size {
        return Err(bad(format!(
            "config expects {} text ids, vocabulary has {}",
            header.config.text_vocab_size,
            vocab.len()
        )));
    }
    let expected = super::Layout::new(&header.config);
    if expected.specs() != header.tensors.as_slice() {
        return Err(bad("tensor table does not match the configuration"));
    }
    let mut bytes = vec![0u8; expected.len() * 4];
    r.read_exact(&mut bytes)?;
    let data: Vec<f32> = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(bad("trailing bytes after tensors"));
    }
    Ok(Checkpoint {
        params: Params::from_data(&header.config, data)?,
        vocab,
        step: header.step,
        run_config: header.run_config,
    })
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), ModelError> {
    let tmp = path.with_extension("tmp");
    write_checkpoint(BufWriter::new(fs::File::create(&tmp)?), ckpt)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, ModelError> {
    read_checkpoint(BufReader::new(fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let vocab = TextVocab::build(&["circle star", "star"], 1).unwrap();
        let cfg = ModelConfig {
            layers: 1,
            dim: 8,
            heads: 2,
            max_len: 16,
            text_vocab_size: vocab.len(),
            ..Default::default()
        };
        Checkpoint {
            params: Params::init(&cfg).unwrap(),
            vocab,
            step: 12,
            run_config: serde_json::json!({"seed": 3}),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let c = sample();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &c).unwrap();
        let back = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back.params.data, c.params.data);
        assert_eq!(back.params.config, c.params.config);
        assert_eq!(back.vocab, c.vocab);
        assert_eq!(back.step, 12);
        assert_eq!(back.run_config, c.run_config);
        assert_eq!(back.id(), c.id());
    }

    #[test]
    fn rejects_corruption() {
        let c = sample();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &c).unwrap();
        assert!(read_checkpoint(&buf[..buf.len() - 4]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_checkpoint(extra.as_slice()).is_err());
        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(read_checkpoint(wrong.as_slice()).is_err());
    }
}
