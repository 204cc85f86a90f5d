//! Binary model checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "IMCK"  u8 version
//! u32 json_len   json: {"frame_spec": …, "train_config": …}
//! u32 tensor_count
//! per tensor: u8 name_len, name, u8 rank, rank × u32 dims, f32 × ∏dims
//! ```
//!
//! Checkpoints carry every tensor needed for inference — trainable weights
//! plus batch-norm running moments — but no optimizer state.

use super::{ModelParams, TrainConfig};
use crate::render::FrameSpec;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

const MAGIC: &[u8; 4] = b"IMCK";
const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    Format(String),
}

/// Everything needed to reproduce inference: weights plus the rendering and
/// training settings the weights were produced with.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: ModelParams<f32>,
    pub frame_spec: FrameSpec,
    pub train_config: TrainConfig,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    frame_spec: FrameSpec,
    train_config: TrainConfig,
}

pub fn save_checkpoint<W: Write>(
    writer: &mut W,
    params: &ModelParams<f32>,
    frame_spec: &FrameSpec,
    train_config: &TrainConfig,
) -> Result<(), CheckpointError> {
    writer.write_all(MAGIC)?;
    writer.write_all(&[VERSION])?;

    let meta = Meta { frame_spec: frame_spec.clone(), train_config: train_config.clone() };
    let json = serde_json::to_vec(&meta).map_err(|e| CheckpointError::Format(e.to_string()))?;
    writer.write_all(&(json.len() as u32).to_le_bytes())?;
    writer.write_all(&json)?;

    let tensors = params.state();
    writer.write_all(&(tensors.len() as u32).to_le_bytes())?;
    for (name, view) in tensors {
        writer.write_all(&[name.len() as u8])?;
        writer.write_all(name.as_bytes())?;
        writer.write_all(&[view.ndim() as u8])?;
        for &d in view.shape() {
            writer.write_all(&(d as u32).to_le_bytes())?;
        }
        let slice = view.as_slice().expect("owned tensors are contiguous");
        let mut bytes = Vec::with_capacity(slice.len() * 4);
        for &v in slice {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        writer.write_all(&bytes)?;
    }
    Ok(())
}

fn read_exact_buf<R: Read>(reader: &mut R, len: usize) -> Result<Vec<u8>, CheckpointError> {
    let mut buf = vec![0u8; len];
    reader.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(reader: &mut R) -> Result<u32, CheckpointError> {
    let b = read_exact_buf(reader, 4)?;
    Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

pub fn load_checkpoint<R: Read>(reader: &mut R) -> Result<Checkpoint, CheckpointError> {
    let magic = read_exact_buf(reader, 4)?;
    if magic != MAGIC {
        return Err(CheckpointError::Format("bad magic; not a model checkpoint".into()));
    }
    let version = read_exact_buf(reader, 1)?[0];
    if version != VERSION {
        return Err(CheckpointError::Format(format!("unsupported checkpoint version {version}")));
    }

    let json_len = read_u32(reader)? as usize;
    let json = read_exact_buf(reader, json_len)?;
    let meta: Meta =
        serde_json::from_slice(&json).map_err(|e| CheckpointError::Format(format!("metadata: {e}")))?;

    let mut params = ModelParams::<f32>::zeros();
    let expected: Vec<&'static str> = params.state().iter().map(|(n, _)| *n).collect();
    let count = read_u32(reader)? as usize;
    if count != expected.len() {
        return Err(CheckpointError::Format(format!(
            "expected {} tensors, file declares {count}",
            expected.len()
        )));
    }

    let mut seen = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = read_exact_buf(reader, 1)?[0] as usize;
        let name = String::from_utf8(read_exact_buf(reader, name_len)?)
            .map_err(|_| CheckpointError::Format("tensor name is not utf-8".into()))?;
        let rank = read_exact_buf(reader, 1)?[0] as usize;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(read_u32(reader)? as usize);
        }
        let len: usize = dims.iter().product();
        let data = read_exact_buf(reader, len * 4)?;

        let mut view = params
            .state_tensor_mut(&name)
            .ok_or_else(|| CheckpointError::Format(format!("unknown tensor '{name}'")))?;
        if view.shape() != dims.as_slice() {
            return Err(CheckpointError::Format(format!(
                "tensor '{name}' has shape {:?} in the file but {:?} in the model",
                dims,
                view.shape()
            )));
        }
        let dst = view.as_slice_mut().expect("owned tensors are contiguous");
        for (i, chunk) in data.chunks_exact(4).enumerate() {
            dst[i] = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        }
        if seen.contains(&name) {
            return Err(CheckpointError::Format(format!("tensor '{name}' appears twice")));
        }
        seen.push(name);
    }
    if seen.len() != expected.len() {
        return Err(CheckpointError::Format("checkpoint is missing tensors".into()));
    }

    let mut trailing = [0u8; 1];
    match reader.read(&mut trailing)? {
        0 => {}
        _ => return Err(CheckpointError::Format("trailing bytes after the last tensor".into())),
    }

    Ok(Checkpoint { params, frame_spec: meta.frame_spec, train_config: meta.train_config })
}
