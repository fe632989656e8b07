//! The normalized GRAPH1 JSON graph format.
//!
//! One self-describing document per graph. Edges are stored once in
//! canonical form — `a < b`, sorted lexicographically — and loading
//! rejects files that violate it, so a GRAPH1 file has exactly one
//! valid byte representation of its structure and round-trips are
//! identities.

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const GRAPH_FORMAT: &str = "GRAPH1";

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format: String,
    num_nodes: usize,
    num_classes: usize,
    feature_dim: usize,
    edges: Vec<(usize, usize)>,
    features: Vec<Vec<f64>>,
    labels: Option<Vec<usize>>,
}

/// Serialize a graph to GRAPH1 JSON text.
pub fn graph_to_json(g: &AttributedGraph) -> Result<String> {
    let file = GraphFile {
        format: GRAPH_FORMAT.to_string(),
        num_nodes: g.num_nodes(),
        num_classes: g.num_classes(),
        feature_dim: g.feature_dim(),
        edges: g.edges().to_vec(),
        features: (0..g.num_nodes()).map(|v| g.features_of(v).to_vec()).collect(),
        labels: g.labels().map(|ls| ls.to_vec()),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

/// Parse and validate GRAPH1 JSON text.
pub fn graph_from_json(text: &str) -> Result<AttributedGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    if file.format != GRAPH_FORMAT {
        return Err(Error::Format(format!(
            "unsupported graph format {:?}, expected {GRAPH_FORMAT:?}",
            file.format
        )));
    }
    if file.features.len() != file.num_nodes {
        return Err(Error::Format(format!(
            "{} feature rows for {} nodes",
            file.features.len(),
            file.num_nodes
        )));
    }
    if file.features.iter().any(|r| r.len() != file.feature_dim) {
        return Err(Error::Format(format!(
            "feature row length differs from feature_dim = {}",
            file.feature_dim
        )));
    }
    for window in file.edges.windows(2) {
        if window[0] >= window[1] {
            return Err(Error::Format(format!(
                "edges not in canonical sorted order at {:?}",
                window[1]
            )));
        }
    }
    if let Some(&(a, b)) = file.edges.iter().find(|&&(a, b)| a >= b) {
        return Err(Error::Format(format!(
            "edge ({a}, {b}) violates the canonical a < b rule"
        )));
    }
    AttributedGraph::build(file.features, &file.edges, file.labels, file.num_classes)
}

pub fn save_graph(path: &Path, g: &AttributedGraph) -> Result<()> {
    std::fs::write(path, graph_to_json(g)?)?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<AttributedGraph> {
    let text = std::fs::read_to_string(path)?;
    graph_from_json(&text)
}
