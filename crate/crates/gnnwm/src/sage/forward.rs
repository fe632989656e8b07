//! Forward pass: neighbor sampling, mean aggregation, softmax.

use super::SageModel;
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::linalg::{argmax, Mat};
use crate::rng::RandomStream;

/// How a forward pass gathers neighborhoods.
pub enum Neighborhood<'a> {
    /// All neighbors — deterministic, used for inference and validation.
    Full,
    /// `k` draws with replacement per node per layer, consumed from the
    /// stream in a pinned order (per batch node: its layer-2 sample,
    /// then one layer-1 sample per member of `{self} ∪ sample`).
    Sampled { k: usize, stream: &'a mut RandomStream },
}

/// Intermediates of one forward pass, kept for the backward pass.
pub struct ForwardCache {
    pub(crate) batch: Vec<usize>,
    pub(crate) nodes: Vec<NodeCache>,
    pub(crate) num_classes: usize,
}

pub(crate) struct NodeCache {
    /// Layer-1 computations feeding this node's layer-2 mean;
    /// index 0 is the node itself, the rest its layer-2 neighborhood.
    pub(crate) occs: Vec<OccCache>,
    pub(crate) m2: Vec<f64>,
    pub(crate) h2: Vec<f64>,
    pub(crate) probs: Vec<f64>,
}

pub(crate) struct OccCache {
    /// Mean-aggregated input features (length D).
    pub(crate) m1: Vec<f64>,
    /// Post-ReLU layer-1 output (length H).
    pub(crate) h1: Vec<f64>,
}

/// `k` neighbor draws with replacement; empty for isolated nodes.
pub fn sample_neighbors(
    g: &AttributedGraph,
    v: usize,
    k: usize,
    stream: &mut RandomStream,
) -> Vec<usize> {
    let nbrs = g.neighbors(v);
    if nbrs.is_empty() {
        return Vec::new();
    }
    (0..k).map(|_| nbrs[stream.next_index(nbrs.len())]).collect()
}

/// Element-wise mean of the self vector together with the neighbor
/// vectors; with no neighbors this is the identity.
pub fn mean_aggregate(self_h: &[f64], neighbors: &[&[f64]]) -> Result<Vec<f64>> {
    let mut acc = self_h.to_vec();
    for nh in neighbors {
        if nh.len() != self_h.len() {
            return Err(Error::input(format!(
                "mean_aggregate length mismatch: {} vs {}",
                nh.len(),
                self_h.len()
            )));
        }
        for (a, x) in acc.iter_mut().zip(nh.iter()) {
            *a += x;
        }
    }
    let inv = 1.0 / (1 + neighbors.len()) as f64;
    for a in &mut acc {
        *a *= inv;
    }
    Ok(acc)
}

fn affine_relu(x: &[f64], w: &Mat, b: &[f64]) -> Vec<f64> {
    let mut out = b.to_vec();
    w.vecmat_add(x, &mut out);
    for o in &mut out {
        if *o < 0.0 {
            *o = 0.0;
        }
    }
    out
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn node_forward(
    m: &SageModel,
    g: &AttributedGraph,
    v: usize,
    mode: &mut Neighborhood,
) -> Result<NodeCache> {
    let layer2: Vec<usize> = match mode {
        Neighborhood::Full => g.neighbors(v).to_vec(),
        Neighborhood::Sampled { k, stream } => sample_neighbors(g, v, *k, stream),
    };
    let mut occs = Vec::with_capacity(1 + layer2.len());
    for &w in std::iter::once(&v).chain(layer2.iter()) {
        let layer1: Vec<usize> = match mode {
            Neighborhood::Full => g.neighbors(w).to_vec(),
            Neighborhood::Sampled { k, stream } => sample_neighbors(g, w, *k, stream),
        };
        let rows: Vec<&[f64]> = layer1.iter().map(|&u| g.features_of(u)).collect();
        let m1 = mean_aggregate(g.features_of(w), &rows)?;
        let h1 = affine_relu(&m1, &m.w1, &m.b1);
        occs.push(OccCache { m1, h1 });
    }
    let nbr_h1: Vec<&[f64]> = occs[1..].iter().map(|o| o.h1.as_slice()).collect();
    let m2 = mean_aggregate(&occs[0].h1, &nbr_h1)?;
    let h2 = affine_relu(&m2, &m.w2, &m.b2);
    let mut logits = m.b_out.clone();
    m.w_out.vecmat_add(&h2, &mut logits);
    let probs = softmax(&logits);
    Ok(NodeCache {
        occs,
        m2,
        h2,
        probs,
    })
}

/// Forward pass over a batch of nodes.
///
/// Returns one probability row per batch node (rows sum to 1) plus the
/// cache the backward pass needs.
pub fn forward(
    m: &SageModel,
    g: &AttributedGraph,
    batch: &[usize],
    mut mode: Neighborhood,
) -> Result<(Vec<Vec<f64>>, ForwardCache)> {
    if g.feature_dim() != m.input_dim() {
        return Err(Error::input(format!(
            "graph feature dim {} does not match model input dim {}",
            g.feature_dim(),
            m.input_dim()
        )));
    }
    let mut nodes = Vec::with_capacity(batch.len());
    for &v in batch {
        if v >= g.num_nodes() {
            return Err(Error::input(format!("batch node {v} out of range")));
        }
        nodes.push(node_forward(m, g, v, &mut mode)?);
    }
    let probs = nodes.iter().map(|n| n.probs.clone()).collect();
    Ok((
        probs,
        ForwardCache {
            batch: batch.to_vec(),
            nodes,
            num_classes: m.num_classes(),
        },
    ))
}

/// Deterministic full-neighborhood inference.
///
/// Equivalent to `forward(…, Neighborhood::Full)` but memoizes each
/// node's layer-1 representation, which it computes only for the batch
/// and its one-hop neighborhood.
pub fn predict_probs(
    m: &SageModel,
    g: &AttributedGraph,
    batch: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if g.feature_dim() != m.input_dim() {
        return Err(Error::input(format!(
            "graph feature dim {} does not match model input dim {}",
            g.feature_dim(),
            m.input_dim()
        )));
    }
    let n = g.num_nodes();
    let h = m.hidden_dim();
    let mut needed = vec![false; n];
    for &v in batch {
        if v >= n {
            return Err(Error::input(format!("batch node {v} out of range")));
        }
        needed[v] = true;
        for &u in g.neighbors(v) {
            needed[u] = true;
        }
    }
    let mut h1 = vec![0.0; n * h];
    for v in 0..n {
        if !needed[v] {
            continue;
        }
        let rows: Vec<&[f64]> = g.neighbors(v).iter().map(|&u| g.features_of(u)).collect();
        let m1 = mean_aggregate(g.features_of(v), &rows)?;
        h1[v * h..(v + 1) * h].copy_from_slice(&affine_relu(&m1, &m.w1, &m.b1));
    }
    let h1_of = |v: usize| &h1[v * h..(v + 1) * h];
    let mut out = Vec::with_capacity(batch.len());
    for &v in batch {
        let rows: Vec<&[f64]> = g.neighbors(v).iter().map(|&u| h1_of(u)).collect();
        let m2 = mean_aggregate(h1_of(v), &rows)?;
        let h2 = affine_relu(&m2, &m.w2, &m.b2);
        let mut logits = m.b_out.clone();
        m.w_out.vecmat_add(&h2, &mut logits);
        out.push(softmax(&logits));
    }
    Ok(out)
}

/// Argmax labels from full-mode inference; ties go to the smallest
/// class index.
pub fn predict_labels(m: &SageModel, g: &AttributedGraph, batch: &[usize]) -> Result<Vec<usize>> {
    Ok(predict_probs(m, g, batch)?
        .iter()
        .map(|p| argmax(p))
        .collect())
}

/// Mean over the batch of `−log(prob on the true class)`, with the
/// probability clamped at 1e-12 before the log. Empty batches score 0.
pub fn cross_entropy(probs: &[Vec<f64>], labels: &[usize]) -> f64 {
    assert_eq!(probs.len(), labels.len(), "one label per probability row");
    if probs.is_empty() {
        return 0.0;
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(p, &l)| -p[l].max(1e-12).ln())
        .sum();
    total / probs.len() as f64
}
