//! Attributed undirected graphs and node splits.
//!
//! Graphs are stored once, canonically: an edge list with endpoints
//! ordered `a < b` and sorted lexicographically, plus a CSR adjacency
//! with ascending neighbor lists. The canonical form makes serialized
//! graphs and everything derived from them byte-stable.

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// An undirected graph with dense node features and optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    num_nodes: usize,
    feature_dim: usize,
    num_classes: usize,
    /// Row-major `num_nodes × feature_dim`.
    features: Vec<f64>,
    labels: Option<Vec<usize>>,
    /// CSR offsets, length `num_nodes + 1`.
    offsets: Vec<usize>,
    /// Concatenated neighbor lists, each ascending.
    adjacency: Vec<usize>,
    /// Canonical edge list: `a < b`, sorted lexicographically, deduplicated.
    edges: Vec<(usize, usize)>,
}

impl AttributedGraph {
    /// Build a graph from dense feature rows and an undirected edge list.
    ///
    /// Edges may arrive in either orientation and with duplicates; they
    /// are canonicalized and deduplicated. Self-loops and out-of-range
    /// endpoints are rejected.
    pub fn build(
        features: Vec<Vec<f64>>,
        edges: &[(usize, usize)],
        labels: Option<Vec<usize>>,
        num_classes: usize,
    ) -> Result<AttributedGraph> {
        let num_nodes = features.len();
        if num_nodes == 0 {
            return Err(Error::input("graph must have at least one node"));
        }
        if num_classes < 2 {
            return Err(Error::input("graph must have at least two classes"));
        }
        let feature_dim = features[0].len();
        if feature_dim == 0 {
            return Err(Error::input("feature dimension must be at least one"));
        }
        for (v, row) in features.iter().enumerate() {
            if row.len() != feature_dim {
                return Err(Error::input(format!(
                    "node {v} has {} features, expected {feature_dim}",
                    row.len()
                )));
            }
        }
        if let Some(ref ls) = labels {
            if ls.len() != num_nodes {
                return Err(Error::input(format!(
                    "{} labels for {num_nodes} nodes",
                    ls.len()
                )));
            }
            if let Some((v, &l)) = ls.iter().enumerate().find(|(_, &l)| l >= num_classes) {
                return Err(Error::input(format!(
                    "node {v} has label {l}, expected < {num_classes}"
                )));
            }
        }

        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::input(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            if a == b {
                return Err(Error::input(format!("self-loop at node {a}")));
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        canonical.dedup();

        let mut degree = vec![0usize; num_nodes];
        for &(a, b) in &canonical {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for v in 0..num_nodes {
            offsets.push(offsets[v] + degree[v]);
        }
        let mut adjacency = vec![0usize; 2 * canonical.len()];
        let mut cursor = offsets.clone();
        // Sorted canonical edges fill each neighbor list in ascending order:
        // for node v, partners u < v arrive first (sorted by u), then w > v.
        for &(a, b) in &canonical {
            adjacency[cursor[a]] = b;
            cursor[a] += 1;
            adjacency[cursor[b]] = a;
            cursor[b] += 1;
        }

        let flat: Vec<f64> = features.into_iter().flatten().collect();
        Ok(AttributedGraph {
            num_nodes,
            feature_dim,
            num_classes,
            features: flat,
            labels,
            offsets,
            adjacency,
            edges: canonical,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list (`a < b`, lexicographically sorted).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v`, ascending. Empty for isolated nodes.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Feature row of `v`.
    pub fn features_of(&self, v: usize) -> &[f64] {
        &self.features[v * self.feature_dim..(v + 1) * self.feature_dim]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Label of `v`; error if the graph is unlabeled.
    pub fn label_of(&self, v: usize) -> Result<usize> {
        self.labels
            .as_ref()
            .map(|ls| ls[v])
            .ok_or_else(|| Error::input("graph has no labels"))
    }
}

/// Disjoint train/validation/test node sets covering a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Partition `0..num_nodes` uniformly at random into train/val/test.
///
/// Sizes are `round(train_frac·N)` and `round(val_frac·N)` (half-up),
/// with the remainder as test. Each set is returned sorted ascending.
pub fn split_nodes(
    num_nodes: usize,
    train_frac: f64,
    val_frac: f64,
    stream: &mut RandomStream,
) -> Result<NodeSplit> {
    if !(0.0..=1.0).contains(&train_frac) || !(0.0..=1.0).contains(&val_frac) {
        return Err(Error::input("split fractions must lie in [0, 1]"));
    }
    let n_train = round_half_up(train_frac * num_nodes as f64);
    let n_val = round_half_up(val_frac * num_nodes as f64);
    if n_train + n_val > num_nodes {
        return Err(Error::input(format!(
            "split fractions {train_frac} + {val_frac} request {} of {num_nodes} nodes",
            n_train + n_val
        )));
    }
    let mut ids: Vec<usize> = (0..num_nodes).collect();
    stream.shuffle(&mut ids);
    let mut train: Vec<usize> = ids[..n_train].to_vec();
    let mut val: Vec<usize> = ids[n_train..n_train + n_val].to_vec();
    let mut test: Vec<usize> = ids[n_train + n_val..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(NodeSplit { train, val, test })
}
