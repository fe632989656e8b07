//! Seeded planted-partition graphs for tests and examples.
//!
//! Nodes are assigned round-robin to classes, edges favour same-class
//! pairs according to a homophily knob, and features are a noisy
//! class-indicator block code. Small instances train to high accuracy
//! in a few epochs, which makes them a cheap stand-in for the citation
//! datasets wherever the exact data does not matter.

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::rng::{derive_seed, RandomStream};

/// Generate a planted-partition graph with `num_nodes` nodes in
/// `num_classes` classes (node `i` gets class `i % num_classes`).
///
/// Edge probabilities are scaled so the expected degree stays near ten
/// regardless of size: with `base = 10 / num_nodes`, a same-class pair
/// is connected with probability `homophily * base` and a cross-class
/// pair with `(1 - homophily) * base`. Features have one block of
/// columns per class; a node's own-class columns are 1 with
/// probability 0.9 and every other column with probability 0.1.
///
/// The same `(num_nodes, num_classes, feature_dim, homophily, seed)`
/// tuple always yields the identical graph.
pub fn make_synthetic(
    num_nodes: usize,
    num_classes: usize,
    feature_dim: usize,
    homophily: f64,
    seed: u64,
) -> Result<AttributedGraph> {
    if num_nodes == 0 {
        return Err(Error::input("synthetic graph needs at least one node"));
    }
    if num_classes < 2 {
        return Err(Error::input("synthetic graph needs at least two classes"));
    }
    if feature_dim < num_classes {
        return Err(Error::input(format!(
            "feature_dim {feature_dim} must be at least num_classes {num_classes} \
             so every class gets a feature block"
        )));
    }
    if !(0.0..=1.0).contains(&homophily) {
        return Err(Error::input(format!(
            "homophily {homophily} out of range [0, 1]"
        )));
    }

    let class_of = |v: usize| v % num_classes;
    let base = 10.0 / num_nodes as f64;

    let mut edge_stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "edges")?);
    let mut edges = Vec::new();
    for i in 0..num_nodes {
        for j in i + 1..num_nodes {
            let p = if class_of(i) == class_of(j) {
                homophily * base
            } else {
                (1.0 - homophily) * base
            };
            if edge_stream.next_float() < p {
                edges.push((i, j));
            }
        }
    }

    // Column k belongs to the block of class k * num_classes / feature_dim,
    // which splits any remainder evenly across the blocks.
    let block_of = |k: usize| k * num_classes / feature_dim;
    let mut feature_stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "features")?);
    let mut features = Vec::with_capacity(num_nodes);
    let mut labels = Vec::with_capacity(num_nodes);
    for v in 0..num_nodes {
        let class = class_of(v);
        let row: Vec<f64> = (0..feature_dim)
            .map(|k| {
                let p = if block_of(k) == class { 0.9 } else { 0.1 };
                if feature_stream.next_float() < p {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        features.push(row);
        labels.push(class);
    }

    AttributedGraph::build(features, &edges, Some(labels), num_classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::split_nodes;
    use crate::sage::{accuracy_of, predict_labels, train, SageModel, TrainConfig};

    #[test]
    fn deterministic_for_fixed_arguments() {
        let a = make_synthetic(80, 4, 16, 0.8, 7).unwrap();
        let b = make_synthetic(80, 4, 16, 0.8, 7).unwrap();
        assert_eq!(a, b);
        let c = make_synthetic(80, 4, 16, 0.8, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn class_assignment_is_round_robin() {
        let g = make_synthetic(10, 3, 6, 0.5, 1).unwrap();
        assert_eq!(g.labels().unwrap(), &[0, 1, 2, 0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn full_homophily_yields_no_cross_class_edges() {
        let g = make_synthetic(120, 3, 9, 1.0, 42).unwrap();
        assert!(g.num_edges() > 0);
        let labels = g.labels().unwrap();
        for &(a, b) in g.edges() {
            assert_eq!(labels[a], labels[b]);
        }
    }

    #[test]
    fn zero_homophily_yields_only_cross_class_edges() {
        let g = make_synthetic(120, 3, 9, 0.0, 42).unwrap();
        assert!(g.num_edges() > 0);
        let labels = g.labels().unwrap();
        for &(a, b) in g.edges() {
            assert_ne!(labels[a], labels[b]);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_synthetic(0, 2, 4, 0.5, 1).is_err());
        assert!(make_synthetic(10, 1, 4, 0.5, 1).is_err());
        assert!(make_synthetic(10, 4, 3, 0.5, 1).is_err());
        assert!(make_synthetic(10, 2, 4, 1.5, 1).is_err());
        assert!(make_synthetic(10, 2, 4, -0.1, 1).is_err());
    }

    /// The indicator features make the classes nearly separable, so a
    /// short training run should fit them well.
    #[test]
    fn trains_to_high_accuracy() {
        let g = make_synthetic(150, 3, 12, 0.9, 11).unwrap();
        let split = split_nodes(g.num_nodes(), 0.6, 0.2, &mut RandomStream::new(3)).unwrap();
        let model = SageModel::init(g.feature_dim(), 16, g.num_classes(), 5).unwrap();
        let cfg = TrainConfig {
            epochs: 25,
            early_stop_patience: 0,
            ..TrainConfig::default()
        };
        let (trained, _) = train(model, &g, &split, None, &cfg).unwrap();
        let pred = predict_labels(&trained, &g, &split.test).unwrap();
        let truth: Vec<usize> = split.test.iter().map(|&v| g.labels().unwrap()[v]).collect();
        let acc = accuracy_of(&pred, &truth);
        assert!(acc >= 0.9, "test accuracy {acc} below 0.9");
    }
}
