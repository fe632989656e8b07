//! Model checkpoints: the GNNWM1 JSON format.
//!
//! A checkpoint is a single JSON document carrying the format tag, the
//! model dimensions, an echo of the training configuration, and every
//! parameter tensor as a flat row-major array with its shape. Floats
//! use the shortest decimal representation that round-trips, so saving
//! and reloading is bit-exact.

use super::{SageModel, TrainConfig};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CHECKPOINT_FORMAT: &str = "GNNWM1";

/// A loaded checkpoint: the model plus its training provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: SageModel,
    pub config: TrainConfig,
    /// Epoch the saved weights come from (best validation epoch).
    pub epoch: usize,
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl TensorFile {
    fn of(shape: Vec<usize>, data: &[f64]) -> TensorFile {
        TensorFile {
            shape,
            data: data.to_vec(),
        }
    }

    fn expect(&self, name: &str, shape: &[usize]) -> Result<&[f64]> {
        if self.shape != shape {
            return Err(Error::Format(format!(
                "tensor {name}: shape {:?}, expected {shape:?}",
                self.shape
            )));
        }
        let len: usize = shape.iter().product();
        if self.data.len() != len {
            return Err(Error::Format(format!(
                "tensor {name}: {} values for shape {shape:?}",
                self.data.len()
            )));
        }
        if !self.data.iter().all(|x| x.is_finite()) {
            return Err(Error::Format(format!("tensor {name}: non-finite value")));
        }
        Ok(&self.data)
    }
}

#[derive(Serialize, Deserialize)]
struct DimsFile {
    d: usize,
    h: usize,
    c: usize,
}

#[derive(Serialize, Deserialize)]
struct TensorsFile {
    w1: TensorFile,
    b1: TensorFile,
    w2: TensorFile,
    b2: TensorFile,
    w_out: TensorFile,
    b_out: TensorFile,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    dims: DimsFile,
    config: TrainConfig,
    seed: u64,
    epoch: usize,
    tensors: TensorsFile,
}

/// Serialize a checkpoint to the GNNWM1 JSON text.
pub fn checkpoint_to_json(model: &SageModel, config: &TrainConfig, epoch: usize) -> Result<String> {
    if !model.all_finite() {
        return Err(Error::input("refusing to save a model with non-finite parameters"));
    }
    let (d, h, c) = (model.input_dim(), model.hidden_dim(), model.num_classes());
    let file = CheckpointFile {
        format: CHECKPOINT_FORMAT.to_string(),
        dims: DimsFile { d, h, c },
        config: config.clone(),
        seed: config.seed,
        epoch,
        tensors: TensorsFile {
            w1: TensorFile::of(vec![d, h], model.w1.as_slice()),
            b1: TensorFile::of(vec![h], &model.b1),
            w2: TensorFile::of(vec![h, h], model.w2.as_slice()),
            b2: TensorFile::of(vec![h], &model.b2),
            w_out: TensorFile::of(vec![h, c], model.w_out.as_slice()),
            b_out: TensorFile::of(vec![c], &model.b_out),
        },
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

/// Parse and validate GNNWM1 JSON text.
pub fn checkpoint_from_json(text: &str) -> Result<Checkpoint> {
    let file: CheckpointFile = serde_json::from_str(text)?;
    if file.format != CHECKPOINT_FORMAT {
        return Err(Error::Format(format!(
            "unsupported checkpoint format {:?}, expected {CHECKPOINT_FORMAT:?}",
            file.format
        )));
    }
    let DimsFile { d, h, c } = file.dims;
    if d == 0 || h == 0 || c < 2 {
        return Err(Error::Format(format!("invalid dims d={d}, h={h}, c={c}")));
    }
    file.config.validate()?;
    let t = &file.tensors;
    let model = SageModel {
        w1: mat_from(d, h, t.w1.expect("w1", &[d, h])?),
        b1: t.b1.expect("b1", &[h])?.to_vec(),
        w2: mat_from(h, h, t.w2.expect("w2", &[h, h])?),
        b2: t.b2.expect("b2", &[h])?.to_vec(),
        w_out: mat_from(h, c, t.w_out.expect("w_out", &[h, c])?),
        b_out: t.b_out.expect("b_out", &[c])?.to_vec(),
        d,
        h,
        c,
    };
    Ok(Checkpoint {
        model,
        config: file.config,
        epoch: file.epoch,
    })
}

fn mat_from(rows: usize, cols: usize, data: &[f64]) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    m.as_mut_slice().copy_from_slice(data);
    m
}

pub fn save_checkpoint(
    path: &Path,
    model: &SageModel,
    config: &TrainConfig,
    epoch: usize,
) -> Result<()> {
    std::fs::write(path, checkpoint_to_json(model, config, epoch)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path)?;
    checkpoint_from_json(&text)
}
