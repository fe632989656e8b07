//! Adam optimizer with bias correction.

use super::{SageGrads, SageModel, TrainConfig};

/// First/second moment accumulators congruent to a model's parameters.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new(model: &SageModel) -> AdamState {
        let zeros: Vec<Vec<f64>> = model
            .param_slices()
            .iter()
            .map(|s| vec![0.0; s.len()])
            .collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    pub fn timestep(&self) -> u64 {
        self.t
    }
}

/// One Adam update:
/// `m ← β₁m + (1−β₁)g`, `v ← β₂v + (1−β₂)g²`,
/// `θ ← θ − lr · (m/(1−β₁ᵗ)) / (√(v/(1−β₂ᵗ)) + ε)`.
pub fn adam_step(
    model: &mut SageModel,
    grads: &SageGrads,
    state: &mut AdamState,
    cfg: &TrainConfig,
) {
    state.t += 1;
    let bc1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let bc2 = 1.0 - cfg.beta2.powi(state.t as i32);
    let params = model.param_slices_mut();
    let gslices = grads.param_slices();
    for (i, (p, g)) in params.into_iter().zip(gslices).enumerate() {
        assert_eq!(p.len(), g.len(), "gradient shape mismatch in tensor {i}");
        let (m, v) = (&mut state.m[i], &mut state.v[i]);
        for j in 0..p.len() {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            let m_hat = m[j] / bc1;
            let v_hat = v[j] / bc2;
            p[j] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}
