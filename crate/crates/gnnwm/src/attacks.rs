//! Watermark-removal attacks: magnitude pruning and fine-tuning.
//!
//! These model the adversary of the robustness experiments — someone
//! holding the marked checkpoint who tries to destroy the watermark
//! while keeping the model useful.

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeSplit};
use crate::rng::{derive_seed, RandomStream};
use crate::sage::{AdamState, SageModel, TrainConfig};
use serde::{Deserialize, Serialize};

/// Attack knobs, grouped for experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Fraction of weight-matrix entries zeroed by pruning.
    pub pruning_rate: f64,
    pub finetune_epochs: usize,
    /// Fraction of the test set the fine-tuning adversary has labels for.
    pub finetune_test_fraction: f64,
    pub seed: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            pruning_rate: 0.5,
            finetune_epochs: 30,
            finetune_test_fraction: 0.3,
            seed: 0,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pruning_rate) {
            return Err(Error::input("pruning_rate must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.finetune_test_fraction) {
            return Err(Error::input("finetune_test_fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Global magnitude pruning: zero the `floor(rate · P)` weight-matrix
/// entries of smallest absolute value, where `P` counts weight-matrix
/// entries only (biases are kept).
///
/// Ranking is global across `w1`, `w2`, `w_out` in that flat order;
/// ties break toward the lower flat index, which makes pruning
/// deterministic and idempotent at a fixed rate.
pub fn prune(m: &SageModel, rate: f64) -> Result<SageModel> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::input(format!("pruning rate {rate} must lie in [0, 1]")));
    }
    let mut out = m.clone();
    let mats = out.weight_matrices_mut();
    let total: usize = mats.iter().map(|w| w.as_slice().len()).sum();
    let count = (rate * total as f64).floor() as usize;
    if count == 0 {
        return Ok(out);
    }

    // (|w|, global flat index) for every weight entry
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(total);
    let mut base = 0;
    for w in mats.iter() {
        for (i, &x) in w.as_slice().iter().enumerate() {
            order.push((x.abs(), base + i));
        }
        base += w.as_slice().len();
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| {
        a.0.partial_cmp(&b.0).expect("finite weights").then(a.1.cmp(&b.1))
    };
    if count < total {
        order.select_nth_unstable_by(count - 1, cmp);
    }

    let mut zero = vec![false; total];
    for &(_, idx) in &order[..count] {
        zero[idx] = true;
    }
    let mut base = 0;
    for w in out.weight_matrices_mut() {
        for (i, x) in w.as_mut_slice().iter_mut().enumerate() {
            if zero[base + i] {
                *x = 0.0;
            }
        }
        base += w.as_slice().len();
    }
    Ok(out)
}

/// Fine-tuning attack: continue training on the original train set plus
/// a seeded `test_fraction` of the test set (with true labels), with a
/// fresh Adam state and no trigger batch, for a fixed number of epochs
/// (no early stopping — the adversary runs a budget).
///
/// `epochs = 0` returns the model unchanged.
pub fn finetune(
    m: &SageModel,
    g: &AttributedGraph,
    split: &NodeSplit,
    epochs: usize,
    test_fraction: f64,
    cfg: &TrainConfig,
) -> Result<SageModel> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::input("test_fraction must lie in [0, 1]"));
    }
    let mut model = m.clone();
    if epochs == 0 {
        return Ok(model);
    }
    let mut stream = RandomStream::new(derive_seed(&cfg.seed.to_le_bytes(), "finetune")?);
    let take = (test_fraction * split.test.len() as f64 + 0.5).floor() as usize;
    let mut picked: Vec<usize> = stream
        .sample_distinct(split.test.len(), take)?
        .into_iter()
        .map(|i| split.test[i])
        .collect();
    picked.sort_unstable();

    let mut ids: Vec<usize> = split.train.iter().copied().chain(picked).collect();
    let mut adam = AdamState::new(&model);
    for _ in 0..epochs {
        crate::sage::run_epoch(&mut model, g, &mut ids, None, cfg, &mut stream, &mut adam)?;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::split_nodes;

    fn weight_entries(m: &SageModel) -> Vec<f64> {
        let mut m = m.clone();
        m.weight_matrices_mut()
            .iter()
            .flat_map(|w| w.as_slice().to_vec())
            .collect()
    }

    /// Full-sort reference implementation of global magnitude pruning.
    fn prune_oracle(m: &SageModel, rate: f64) -> SageModel {
        let mut out = m.clone();
        let entries = weight_entries(m);
        let mut idx: Vec<usize> = (0..entries.len()).collect();
        idx.sort_by(|&a, &b| {
            entries[a]
                .abs()
                .partial_cmp(&entries[b].abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        let count = (rate * entries.len() as f64).floor() as usize;
        let mut zero = vec![false; entries.len()];
        for &i in &idx[..count] {
            zero[i] = true;
        }
        let mut base = 0;
        for w in out.weight_matrices_mut() {
            for (i, x) in w.as_mut_slice().iter_mut().enumerate() {
                if zero[base + i] {
                    *x = 0.0;
                }
            }
            base += w.as_slice().len();
        }
        out
    }

    #[test]
    fn prune_extremes() {
        let mut m = SageModel::init(3, 4, 2, 1).unwrap();
        m.param_slices_mut()[1].fill(0.7); // nonzero biases must survive
        assert_eq!(prune(&m, 0.0).unwrap(), m);

        let dead = prune(&m, 1.0).unwrap();
        let weights = weight_entries(&dead);
        assert!(weights.iter().all(|&w| w == 0.0));
        assert!(dead.param_slices()[1].iter().all(|&b| b == 0.7));

        assert!(prune(&m, -0.1).is_err());
        assert!(prune(&m, 1.1).is_err());
    }

    #[test]
    fn prune_matches_full_sort_oracle() {
        for seed in 0..5 {
            let m = SageModel::init(5, 6, 3, seed).unwrap();
            for rate in [0.1, 0.37, 0.5, 0.73, 0.99] {
                let got = prune(&m, rate).unwrap();
                let want = prune_oracle(&m, rate);
                assert_eq!(got, want, "seed {seed}, rate {rate}");

                let total = weight_entries(&m).len();
                let zeros = weight_entries(&got).iter().filter(|&&w| w == 0.0).count();
                assert_eq!(zeros, (rate * total as f64).floor() as usize);
            }
        }
    }

    #[test]
    fn prune_is_idempotent_at_fixed_rate() {
        let m = SageModel::init(4, 5, 3, 9).unwrap();
        for rate in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let once = prune(&m, rate).unwrap();
            let twice = prune(&once, rate).unwrap();
            assert_eq!(once, twice, "rate {rate}");
        }
    }

    #[test]
    fn prune_ties_break_by_flat_index() {
        // All weights identical: exactly the first floor(P/2) flat
        // entries (w1 first, then w2, then w_out) must go.
        let mut m = SageModel::init(2, 2, 2, 0).unwrap();
        {
            let mats = m.weight_matrices_mut();
            for w in mats {
                w.as_mut_slice().fill(0.5);
            }
        }
        let total = weight_entries(&m).len();
        let pruned = prune(&m, 0.5).unwrap();
        let entries = weight_entries(&pruned);
        let cut = total / 2;
        assert!(entries[..cut].iter().all(|&w| w == 0.0));
        assert!(entries[cut..].iter().all(|&w| w == 0.5));
    }

    fn labeled_host(n: usize, d: usize) -> AttributedGraph {
        let feats: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..d)
                    .map(|j| if (j < d / 2) == (i % 2 == 0) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let edges: Vec<(usize, usize)> = (2..n).map(|i| (i - 2, i)).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        AttributedGraph::build(feats, &edges, Some(labels), 2).unwrap()
    }

    #[test]
    fn finetune_zero_epochs_is_identity() {
        let g = labeled_host(20, 4);
        let split = split_nodes(20, 0.4, 0.2, &mut RandomStream::new(1)).unwrap();
        let m = SageModel::init(4, 6, 2, 1).unwrap();
        let out = finetune(&m, &g, &split, 0, 0.3, &TrainConfig::default()).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn finetune_is_deterministic_and_moves_weights() {
        let g = labeled_host(30, 4);
        let split = split_nodes(30, 0.4, 0.2, &mut RandomStream::new(2)).unwrap();
        let m = SageModel::init(4, 6, 2, 2).unwrap();
        let cfg = TrainConfig {
            batch_size: 8,
            seed: 5,
            ..TrainConfig::default()
        };
        let a = finetune(&m, &g, &split, 3, 0.3, &cfg).unwrap();
        let b = finetune(&m, &g, &split, 3, 0.3, &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m);
        assert!(a.all_finite());

        let other = TrainConfig { seed: 6, ..cfg };
        let c = finetune(&m, &g, &split, 3, 0.3, &other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn attack_config_validation() {
        assert!(AttackConfig::default().validate().is_ok());
        let bad = AttackConfig {
            pruning_rate: 1.5,
            ..AttackConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AttackConfig {
            finetune_test_fraction: -0.1,
            ..AttackConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
