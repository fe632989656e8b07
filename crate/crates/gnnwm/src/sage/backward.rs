//! Exact analytic gradients of the batch cross-entropy loss.

use super::{ForwardCache, SageGrads, SageModel};
use crate::error::{Error, Result};

/// Gradients of `loss_scale · cross_entropy` with respect to every
/// parameter, for the batch recorded in `cache`.
///
/// The softmax and the loss fuse into `probs − onehot`; the mean
/// aggregation distributes each layer-2 gradient with a factor of
/// `1/(1 + #neighbors)` to every contributing layer-1 representation.
/// Input features receive no gradient (they are data, not parameters).
pub fn backward(
    m: &SageModel,
    cache: &ForwardCache,
    labels: &[usize],
    loss_scale: f64,
) -> Result<SageGrads> {
    if labels.len() != cache.batch.len() {
        return Err(Error::input(format!(
            "{} labels for a cached batch of {}",
            labels.len(),
            cache.batch.len()
        )));
    }
    if cache.num_classes != m.num_classes()
        || cache.nodes.iter().any(|n| n.h2.len() != m.hidden_dim())
    {
        return Err(Error::input(
            "forward cache does not match this model's dimensions",
        ));
    }
    let mut gr = SageGrads::zeros_like(m);
    if cache.batch.is_empty() {
        return Ok(gr);
    }
    let scale = loss_scale / cache.batch.len() as f64;

    for (node, &label) in cache.nodes.iter().zip(labels) {
        if label >= m.num_classes() {
            return Err(Error::input(format!(
                "label {label} out of range for {} classes",
                m.num_classes()
            )));
        }
        // d loss / d logits, softmax and cross-entropy fused
        let mut dlogits = node.probs.clone();
        dlogits[label] -= 1.0;
        for d in &mut dlogits {
            *d *= scale;
        }

        gr.w_out.add_outer(&node.h2, &dlogits, 1.0);
        for (g, d) in gr.b_out.iter_mut().zip(&dlogits) {
            *g += d;
        }
        let dh2 = m.w_out.backprop_vec(&dlogits);

        let dpre2: Vec<f64> = dh2
            .iter()
            .zip(&node.h2)
            .map(|(&d, &h)| if h > 0.0 { d } else { 0.0 })
            .collect();
        gr.w2.add_outer(&node.m2, &dpre2, 1.0);
        for (g, d) in gr.b2.iter_mut().zip(&dpre2) {
            *g += d;
        }
        let dm2 = m.w2.backprop_vec(&dpre2);

        // every layer-1 occurrence receives an equal share of dm2
        let inv = 1.0 / node.occs.len() as f64;
        let dh1: Vec<f64> = dm2.iter().map(|d| d * inv).collect();
        for occ in &node.occs {
            let dpre1: Vec<f64> = dh1
                .iter()
                .zip(&occ.h1)
                .map(|(&d, &h)| if h > 0.0 { d } else { 0.0 })
                .collect();
            gr.w1.add_outer(&occ.m1, &dpre1, 1.0);
            for (g, d) in gr.b1.iter_mut().zip(&dpre1) {
                *g += d;
            }
        }
    }
    Ok(gr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AttributedGraph;
    use crate::linalg::Mat;
    use crate::rng::RandomStream;
    use crate::sage::{cross_entropy, forward, Neighborhood};

    fn random_instance(seed: u64) -> (SageModel, AttributedGraph, Vec<usize>) {
        let mut s = RandomStream::new(seed);
        let (n, d, c) = (5usize, 4usize, 2usize);
        let feats: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| 2.0 * s.next_float() - 1.0).collect())
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if s.next_float() < 0.4 {
                    edges.push((i, j));
                }
            }
        }
        let g = AttributedGraph::build(feats, &edges, None, c).unwrap();
        let labels: Vec<usize> = (0..n).map(|_| s.next_index(c)).collect();
        let mut m = SageModel::init(d, 3, c, seed.wrapping_add(1000)).unwrap();
        // Zero-init biases park dead units exactly on the ReLU kink
        // (m2 = 0 gives pre2 = b2 = 0), where a central difference
        // reports half the one-sided slope and no subgradient choice
        // can match it. Random biases keep pre-activations off the
        // kinks, so the finite differences are trustworthy.
        for slice in m.param_slices_mut() {
            for p in slice.iter_mut() {
                if *p == 0.0 {
                    *p = s.next_float() - 0.5;
                }
            }
        }
        (m, g, labels)
    }

    fn param_add(m: &mut SageModel, idx: usize, delta: f64) {
        let mut off = idx;
        for s in m.param_slices_mut() {
            if off < s.len() {
                s[off] += delta;
                return;
            }
            off -= s.len();
        }
        panic!("index out of range");
    }

    fn grad_get(g: &SageGrads, idx: usize) -> f64 {
        let mut off = idx;
        for s in g.param_slices() {
            if off < s.len() {
                return s[off];
            }
            off -= s.len();
        }
        panic!("index out of range");
    }

    /// Count parameters whose analytic gradient disagrees with a central
    /// finite difference by relative error > 1e-5.
    fn check_instance<F>(m: &SageModel, loss: F, analytic: &SageGrads) -> usize
    where
        F: Fn(&SageModel) -> f64,
    {
        let h = 1e-5;
        let mut failures = 0;
        for idx in 0..m.num_params() {
            let mut plus = m.clone();
            param_add(&mut plus, idx, h);
            let mut minus = m.clone();
            param_add(&mut minus, idx, -h);
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let a = grad_get(analytic, idx);
            let denom = 1.0f64.max(a.abs()).max(numeric.abs());
            if (a - numeric).abs() / denom > 1e-5 {
                failures += 1;
            }
        }
        failures
    }

    #[test]
    fn full_mode_gradients_match_finite_differences() {
        let mut failures = 0;
        let mut total = 0;
        for seed in 0..20 {
            let (m, g, labels) = random_instance(seed);
            let batch: Vec<usize> = (0..g.num_nodes()).collect();
            let (probs, cache) = forward(&m, &g, &batch, Neighborhood::Full).unwrap();
            assert!(cross_entropy(&probs, &labels).is_finite());
            let analytic = backward(&m, &cache, &labels, 1.0).unwrap();
            let loss = |model: &SageModel| {
                let (p, _) = forward(model, &g, &batch, Neighborhood::Full).unwrap();
                cross_entropy(&p, &labels)
            };
            failures += check_instance(&m, loss, &analytic);
            total += m.num_params();
        }
        // ≥ 99% of parameters must pass across all instances
        assert!(
            (failures as f64) <= 0.01 * total as f64,
            "{failures} of {total} gradient checks failed"
        );
    }

    #[test]
    fn sampled_mode_gradients_match_with_replayed_stream() {
        let mut failures = 0;
        let mut total = 0;
        for seed in 0..10 {
            let (m, g, labels) = random_instance(seed + 100);
            let batch: Vec<usize> = (0..g.num_nodes()).collect();
            let base = RandomStream::new(seed * 31 + 7);
            let (_, cache) = forward(
                &m,
                &g,
                &batch,
                Neighborhood::Sampled {
                    k: 2,
                    stream: &mut base.clone(),
                },
            )
            .unwrap();
            let analytic = backward(&m, &cache, &labels, 1.0).unwrap();
            let loss = |model: &SageModel| {
                // replay exactly the same neighbor draws
                let mut s = base.clone();
                let (p, _) = forward(
                    model,
                    &g,
                    &batch,
                    Neighborhood::Sampled { k: 2, stream: &mut s },
                )
                .unwrap();
                cross_entropy(&p, &labels)
            };
            failures += check_instance(&m, loss, &analytic);
            total += m.num_params();
        }
        assert!(
            (failures as f64) <= 0.01 * total as f64,
            "{failures} of {total} sampled-mode gradient checks failed"
        );
    }

    #[test]
    fn loss_scale_scales_gradients_linearly() {
        let (m, g, labels) = random_instance(3);
        let batch: Vec<usize> = (0..g.num_nodes()).collect();
        let (_, cache) = forward(&m, &g, &batch, Neighborhood::Full).unwrap();
        let g1 = backward(&m, &cache, &labels, 1.0).unwrap();
        let (_, cache) = forward(&m, &g, &batch, Neighborhood::Full).unwrap();
        let g3 = backward(&m, &cache, &labels, 3.0).unwrap();
        for (a, b) in g1.param_slices().iter().zip(g3.param_slices().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((3.0 * x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn saturated_correct_prediction_gives_vanishing_gradients() {
        // Hugely confident and correct → probs ≈ one-hot → near-zero grads.
        let m = SageModel {
            w1: Mat::from_rows(vec![vec![30.0, 0.0], vec![0.0, 30.0]]),
            b1: vec![0.0, 0.0],
            w2: Mat::from_rows(vec![vec![30.0, 0.0], vec![0.0, 30.0]]),
            b2: vec![0.0, 0.0],
            w_out: Mat::from_rows(vec![vec![30.0, -30.0], vec![-30.0, 30.0]]),
            b_out: vec![0.0, 0.0],
            d: 2,
            h: 2,
            c: 2,
        };
        let g = AttributedGraph::build(vec![vec![1.0, 0.0]], &[], None, 2).unwrap();
        let (probs, cache) = forward(&m, &g, &[0], Neighborhood::Full).unwrap();
        assert!(probs[0][0] > 1.0 - 1e-12);
        let gr = backward(&m, &cache, &[0], 1.0).unwrap();
        for s in gr.param_slices() {
            for &x in s {
                assert!(x.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn backward_rejects_mismatched_inputs() {
        let (m, g, labels) = random_instance(0);
        let batch: Vec<usize> = (0..g.num_nodes()).collect();
        let (_, cache) = forward(&m, &g, &batch, Neighborhood::Full).unwrap();
        assert!(backward(&m, &cache, &labels[..3], 1.0).is_err());
        assert!(backward(&m, &cache, &[9; 5], 1.0).is_err());
        let other = SageModel::init(4, 8, 2, 0).unwrap();
        assert!(backward(&other, &cache, &labels, 1.0).is_err());
    }
}
