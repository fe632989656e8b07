//! Trigger-graph generation from a secret key.
//!
//! The trigger is an Erdős–Rényi random graph with random binary node
//! features and random C-ary labels (the watermark). Everything is a
//! pure function of the key and the public parameters: the owner never
//! stores the trigger, they regenerate it at verification time.

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::rng::{derive_seed, fnv1a_64, RandomStream};
use serde::{Deserialize, Serialize};

/// Public trigger parameters: size, edge density, feature density.
///
/// These travel with the owner's claim (they are not secret); only the
/// key is. Together with the host dataset's dimensions they fix the
/// trigger completely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerParams {
    /// Number of trigger nodes (watermark length).
    pub n: usize,
    /// ER edge probability.
    pub p_g: f64,
    /// Proportion of feature cells set to one.
    pub p_r: f64,
}

/// A keyed trigger graph together with its watermark labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerGraph {
    /// `n` nodes with binary features of the host dataset's dimension.
    pub graph: AttributedGraph,
    /// The C-ary watermark: the label the marked model must produce for
    /// each trigger node.
    pub watermark: Vec<usize>,
    pub n: usize,
    /// Edge probability of the ER graph.
    pub p_g: f64,
    /// Proportion of feature cells set to one.
    pub p_r: f64,
    /// FNV-1a-64 of the secret key, for audit trails; the key itself is
    /// never stored.
    pub key_fingerprint: u64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

/// ER edges over `n` nodes: pairs `(i, j)` with `i < j` visited in
/// lexicographic order, each kept with probability `p_g`.
///
/// The iteration order is part of the format — reconstruction from the
/// key must be bit-exact.
pub fn generate_er_edges(
    n: usize,
    p_g: f64,
    stream: &mut RandomStream,
) -> Result<Vec<(usize, usize)>> {
    if n == 0 {
        return Err(Error::input("trigger must have at least one node"));
    }
    check_probability("p_g", p_g)?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if stream.next_float() < p_g {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

/// Binary `n × d` feature matrix with exactly `round(p_r · n · d)` ones,
/// placed uniformly without replacement over the cells.
pub fn generate_features(
    n: usize,
    d: usize,
    p_r: f64,
    stream: &mut RandomStream,
) -> Result<Vec<Vec<f64>>> {
    if n * d == 0 {
        return Err(Error::input("feature matrix must be non-empty"));
    }
    check_probability("p_r", p_r)?;
    let cells = n * d;
    let ones = (p_r * cells as f64 + 0.5).floor() as usize;
    let mut rows = vec![vec![0.0; d]; n];
    for cell in stream.sample_distinct(cells, ones)? {
        rows[cell / d][cell % d] = 1.0;
    }
    Ok(rows)
}

/// Uniform i.i.d. watermark labels in `[0, c)`, one per node.
pub fn generate_watermark(n: usize, c: usize, stream: &mut RandomStream) -> Result<Vec<usize>> {
    if c < 2 {
        return Err(Error::input(format!(
            "watermark needs at least two classes, got {c}"
        )));
    }
    Ok((0..n).map(|_| stream.next_index(c)).collect())
}

/// Generate the full trigger graph from a secret key.
///
/// `d` and `c` must match the host dataset (the trigger is fed to the
/// same model). Edges, features, and labels come from three
/// context-separated streams derived from the key, so the three parts
/// are independent and individually reproducible.
pub fn make_trigger(
    key: &[u8],
    n: usize,
    p_g: f64,
    p_r: f64,
    d: usize,
    c: usize,
) -> Result<TriggerGraph> {
    let mut edge_stream = RandomStream::new(derive_seed(key, "edges")?);
    let mut feature_stream = RandomStream::new(derive_seed(key, "features")?);
    let mut label_stream = RandomStream::new(derive_seed(key, "labels")?);

    let edges = generate_er_edges(n, p_g, &mut edge_stream)?;
    let features = generate_features(n, d, p_r, &mut feature_stream)?;
    let watermark = generate_watermark(n, c, &mut label_stream)?;
    let graph = AttributedGraph::build(features, &edges, None, c)?;

    Ok(TriggerGraph {
        graph,
        watermark,
        n,
        p_g,
        p_r,
        key_fingerprint: fnv1a_64(key),
    })
}

/// Flip every feature bit (`x → 1 − x`), keeping structure and labels.
///
/// The flipped trigger of parameters `(p_g, p_r)` is exactly a trigger
/// with parameters `(p_g, 1 − p_r)`, which is how the sensitivity
/// experiments probe the high-density regime.
pub fn flip_features(t: &TriggerGraph) -> Result<TriggerGraph> {
    let g = &t.graph;
    let mut rows = Vec::with_capacity(g.num_nodes());
    for v in 0..g.num_nodes() {
        let row: Vec<f64> = g
            .features_of(v)
            .iter()
            .map(|&x| {
                if x == 0.0 {
                    Ok(1.0)
                } else if x == 1.0 {
                    Ok(0.0)
                } else {
                    Err(Error::input(format!(
                        "feature {x} at node {v} is not binary"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let graph = AttributedGraph::build(rows, g.edges(), None, g.num_classes())?;
    Ok(TriggerGraph {
        graph,
        watermark: t.watermark.clone(),
        n: t.n,
        p_g: t.p_g,
        p_r: 1.0 - t.p_r,
        key_fingerprint: t.key_fingerprint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ones_count(g: &AttributedGraph) -> usize {
        (0..g.num_nodes())
            .flat_map(|v| g.features_of(v))
            .filter(|&&x| x == 1.0)
            .count()
    }

    #[test]
    fn er_extremes() {
        let mut s = RandomStream::new(1);
        assert!(generate_er_edges(10, 0.0, &mut s).unwrap().is_empty());
        let all = generate_er_edges(4, 1.0, &mut s).unwrap();
        assert_eq!(all, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(generate_er_edges(0, 0.5, &mut s).is_err());
        assert!(generate_er_edges(5, 1.5, &mut s).is_err());
    }

    #[test]
    fn er_edge_count_matches_binomial_mean() {
        // 500 seeds of G(50, 0.1): pair count 1225, expected edges 122.5,
        // per-draw σ = √(1225·0.1·0.9) ≈ 10.5. The sample mean must sit
        // within 3 standard errors.
        let trials = 500;
        let mut total = 0usize;
        for seed in 0..trials {
            let mut s = RandomStream::new(seed as u64);
            total += generate_er_edges(50, 0.1, &mut s).unwrap().len();
        }
        let mean = total as f64 / trials as f64;
        let se = (1225.0 * 0.1 * 0.9f64).sqrt() / (trials as f64).sqrt();
        assert!((mean - 122.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn feature_ones_count_is_exact() {
        let mut s = RandomStream::new(2);
        let rows = generate_features(10, 1433, 0.1, &mut s).unwrap();
        let total: f64 = rows.iter().flatten().sum();
        assert_eq!(total, 1433.0);
        assert!(rows.iter().flatten().all(|&x| x == 0.0 || x == 1.0));

        let zeros = generate_features(3, 4, 0.0, &mut s).unwrap();
        assert!(zeros.iter().flatten().all(|&x| x == 0.0));
        let ones = generate_features(3, 4, 1.0, &mut s).unwrap();
        assert!(ones.iter().flatten().all(|&x| x == 1.0));
    }

    #[test]
    fn watermark_labels_are_uniform() {
        let n = 100_000;
        let mut s = RandomStream::new(3);
        let labels = generate_watermark(n, 7, &mut s).unwrap();
        let mut counts = [0u64; 7];
        for &l in &labels {
            counts[l] += 1;
        }
        let p = 1.0 / 7.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for (c, &k) in counts.iter().enumerate() {
            assert!(
                (k as f64 - n as f64 * p).abs() < 3.0 * sigma,
                "class {c}: {k}"
            );
        }

        let again = generate_watermark(n, 7, &mut RandomStream::new(3)).unwrap();
        assert_eq!(labels, again);
        assert!(generate_watermark(5, 1, &mut s).is_err());
    }

    #[test]
    fn make_trigger_is_deterministic() {
        let a = make_trigger(b"secret", 10, 0.2, 0.1, 16, 7).unwrap();
        let b = make_trigger(b"secret", 10, 0.2, 0.1, 16, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cora_sized_isolated_trigger() {
        let t = make_trigger(b"owner", 50, 0.0, 0.1, 1433, 7).unwrap();
        assert_eq!(t.graph.num_edges(), 0);
        assert_eq!(ones_count(&t.graph), 7165);
        assert!(t.watermark.iter().all(|&l| l < 7));
        assert_eq!(t.watermark.len(), 50);
        assert_eq!(t.key_fingerprint, crate::rng::fnv1a_64(b"owner"));
    }

    #[test]
    fn distinct_keys_give_distinct_triggers() {
        let mut seen = HashSet::new();
        for i in 0..1000u32 {
            let key = format!("key-{i}");
            let t = make_trigger(key.as_bytes(), 5, 0.0, 0.3, 8, 3).unwrap();
            let sig: Vec<u64> = (0..t.graph.num_nodes())
                .flat_map(|v| t.graph.features_of(v))
                .map(|x| x.to_bits())
                .collect();
            assert!(seen.insert(sig), "feature collision for {key}");
        }
    }

    #[test]
    fn flip_is_an_involution() {
        let t = make_trigger(b"secret", 8, 0.3, 0.25, 10, 4).unwrap();
        let f = flip_features(&t).unwrap();
        assert_eq!(ones_count(&f.graph), 8 * 10 - ones_count(&t.graph));
        assert_eq!(f.p_r, 0.75);
        assert_eq!(f.graph.edges(), t.graph.edges());
        assert_eq!(f.watermark, t.watermark);
        let ff = flip_features(&f).unwrap();
        assert_eq!(ff, t);
    }

    #[test]
    fn flip_rejects_non_binary_features() {
        let graph = AttributedGraph::build(vec![vec![0.5]], &[], None, 2).unwrap();
        let t = TriggerGraph {
            graph,
            watermark: vec![0],
            n: 1,
            p_g: 0.0,
            p_r: 0.5,
            key_fingerprint: 0,
        };
        assert!(flip_features(&t).is_err());
    }
}
