//! A self-contained GraphSAGE-mean engine.
//!
//! Two aggregation layers (`h' = ReLU((mean of self and neighbors)·W + b)`)
//! followed by a linear softmax head, trained with exact analytic
//! gradients and Adam, entirely in 64-bit floats. Everything downstream
//! of a seed is deterministic, which is what lets a watermark be
//! re-verified long after training.

mod adam;
mod backward;
mod checkpoint;
mod forward;
mod train;

pub use adam::{adam_step, AdamState};
pub use backward::backward;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use forward::{
    cross_entropy, forward, mean_aggregate, predict_labels, predict_probs, sample_neighbors,
    ForwardCache, Neighborhood,
};
pub use train::{accuracy_of, train, EpochStats};
pub(crate) use train::run_epoch;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rng::{derive_seed, RandomStream};
use serde::{Deserialize, Serialize};

/// Hidden width of both aggregation layers in the reference setup.
pub const HIDDEN_WIDTH: usize = 128;

/// Hyperparameters of the training loop.
///
/// Deserialization fills omitted fields from the defaults, so config
/// files only need to name what they change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    /// Neighbors sampled per node per layer during training.
    pub sample_size: usize,
    /// Maximum number of epochs.
    pub epochs: usize,
    /// Stop after this many epochs without a new best validation
    /// accuracy. `0` disables early stopping.
    pub early_stop_patience: usize,
    pub seed: u64,
    /// Relative weight of the trigger batch's loss.
    pub trigger_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 128,
            sample_size: 5,
            epochs: 200,
            early_stop_patience: 20,
            seed: 0,
            trigger_weight: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::input("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::input("adam betas must lie in [0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::input("adam epsilon must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::input("batch_size must be at least 1"));
        }
        if self.sample_size == 0 {
            return Err(Error::input("sample_size must be at least 1"));
        }
        if !(self.trigger_weight >= 0.0) {
            return Err(Error::input("trigger_weight must be non-negative"));
        }
        Ok(())
    }
}

/// A two-layer GraphSAGE-mean classifier with a linear softmax head.
#[derive(Debug, Clone, PartialEq)]
pub struct SageModel {
    pub(crate) w1: Mat, // D × H
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Mat, // H × H
    pub(crate) b2: Vec<f64>,
    pub(crate) w_out: Mat, // H × C
    pub(crate) b_out: Vec<f64>,
    d: usize,
    h: usize,
    c: usize,
}

fn glorot(rows: usize, cols: usize, stream: &mut RandomStream) -> Mat {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = Mat::zeros(rows, cols);
    for w in m.as_mut_slice() {
        *w = limit * (2.0 * stream.next_float() - 1.0);
    }
    m
}

impl SageModel {
    /// Glorot-uniform weights (drawn in order w1, w2, w_out from the
    /// seed's "init" stream), zero biases.
    pub fn init(d: usize, h: usize, c: usize, seed: u64) -> Result<SageModel> {
        if d == 0 || h == 0 {
            return Err(Error::input("model dims must be positive"));
        }
        if c < 2 {
            return Err(Error::input("model needs at least two classes"));
        }
        let mut s = RandomStream::new(derive_seed(&seed.to_le_bytes(), "init")?);
        Ok(SageModel {
            w1: glorot(d, h, &mut s),
            b1: vec![0.0; h],
            w2: glorot(h, h, &mut s),
            b2: vec![0.0; h],
            w_out: glorot(h, c, &mut s),
            b_out: vec![0.0; c],
            d,
            h,
            c,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn hidden_dim(&self) -> usize {
        self.h
    }

    pub fn num_classes(&self) -> usize {
        self.c
    }

    /// Total parameter count, biases included.
    pub fn num_params(&self) -> usize {
        self.d * self.h + self.h + self.h * self.h + self.h + self.h * self.c + self.c
    }

    /// All parameter tensors as flat slices, in the pinned order
    /// `[w1, b1, w2, b2, w_out, b_out]`.
    ///
    /// This is the order every flat parameter walk uses — checkpoints,
    /// pruning tie-breaks, and gradient checks.
    pub fn param_slices(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice(),
            &self.b1,
            self.w2.as_slice(),
            &self.b2,
            self.w_out.as_slice(),
            &self.b_out,
        ]
    }

    /// Mutable companion of [`param_slices`](Self::param_slices).
    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 6] {
        let SageModel {
            w1,
            b1,
            w2,
            b2,
            w_out,
            b_out,
            ..
        } = self;
        [
            w1.as_mut_slice(),
            b1,
            w2.as_mut_slice(),
            b2,
            w_out.as_mut_slice(),
            b_out,
        ]
    }

    /// The three weight matrices (no biases), in the pinned order
    /// `[w1, w2, w_out]`.
    pub(crate) fn weight_matrices_mut(&mut self) -> [&mut Mat; 3] {
        let SageModel { w1, w2, w_out, .. } = self;
        [w1, w2, w_out]
    }

    pub fn all_finite(&self) -> bool {
        self.param_slices()
            .iter()
            .all(|s| s.iter().all(|x| x.is_finite()))
    }
}

/// Gradients congruent to a [`SageModel`]'s parameters.
#[derive(Debug, Clone)]
pub struct SageGrads {
    pub(crate) w1: Mat,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Mat,
    pub(crate) b2: Vec<f64>,
    pub(crate) w_out: Mat,
    pub(crate) b_out: Vec<f64>,
}

impl SageGrads {
    pub fn zeros_like(m: &SageModel) -> SageGrads {
        SageGrads {
            w1: Mat::zeros(m.d, m.h),
            b1: vec![0.0; m.h],
            w2: Mat::zeros(m.h, m.h),
            b2: vec![0.0; m.h],
            w_out: Mat::zeros(m.h, m.c),
            b_out: vec![0.0; m.c],
        }
    }

    /// Flat gradient slices in the same pinned order as
    /// [`SageModel::param_slices`].
    pub fn param_slices(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice(),
            &self.b1,
            self.w2.as_slice(),
            &self.b2,
            self.w_out.as_slice(),
            &self.b_out,
        ]
    }
}
