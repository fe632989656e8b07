//! Dataset loading: the published Cora and PubMed citation formats, a
//! normalized JSON graph format, and seeded synthetic graphs for fast
//! tests.

mod cora;
mod graph_json;
mod pubmed;
mod synthetic;

pub use cora::load_cora;
pub use graph_json::{graph_from_json, graph_to_json, load_graph, save_graph, GRAPH_FORMAT};
pub use pubmed::load_pubmed;
pub use synthetic::make_synthetic;

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming the dataset root directory.
pub const DATA_DIR_ENV: &str = "GNNWM_DATA_DIR";

/// Counts a real dataset is expected to load with, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub num_nodes: usize,
    /// Undirected edges after symmetrizing and deduplicating citations.
    pub num_edges: usize,
    pub feature_dim: usize,
    pub num_classes: usize,
}

impl DatasetSpec {
    pub fn check(&self, g: &AttributedGraph) -> Result<()> {
        let got = (
            g.num_nodes(),
            g.num_edges(),
            g.feature_dim(),
            g.num_classes(),
        );
        let want = (
            self.num_nodes,
            self.num_edges,
            self.feature_dim,
            self.num_classes,
        );
        if got != want {
            return Err(Error::Format(format!(
                "{}: loaded (nodes, edges, features, classes) = {got:?}, expected {want:?}",
                self.name
            )));
        }
        Ok(())
    }
}

/// The 2708-publication Cora citation graph. The published 5429 links
/// include mutual citations; symmetrized they collapse to 5278
/// undirected edges.
pub fn cora_spec() -> DatasetSpec {
    DatasetSpec {
        name: "cora".into(),
        num_nodes: 2708,
        num_edges: 5278,
        feature_dim: 1433,
        num_classes: 7,
    }
}

/// The 19717-publication PubMed-Diabetes graph. The published 44338
/// directed citations symmetrize to 44324 undirected edges.
pub fn pubmed_spec() -> DatasetSpec {
    DatasetSpec {
        name: "pubmed".into(),
        num_nodes: 19717,
        num_edges: 44324,
        feature_dim: 500,
        num_classes: 3,
    }
}

/// Counters for citation rows a loader had to drop.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    /// Citations naming a paper id absent from the node file.
    pub unknown_refs: usize,
    /// Self-citations.
    pub self_refs: usize,
}

impl LoadWarnings {
    pub fn is_clean(&self) -> bool {
        self.unknown_refs == 0 && self.self_refs == 0
    }
}

/// Dataset root: `$GNNWM_DATA_DIR`, or the nearest `data` directory
/// found by walking up from the current directory (so commands and
/// tests run from a workspace subdirectory still find a checkout-root
/// `data/`). Falls back to `./data` when nothing exists yet.
pub fn data_root() -> PathBuf {
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        return PathBuf::from(dir);
    }
    if let Ok(cwd) = std::env::current_dir() {
        for dir in cwd.ancestors() {
            let candidate = dir.join("data");
            if candidate.is_dir() {
                return candidate;
            }
        }
    }
    PathBuf::from("data")
}

/// Resolve a dataset argument: `cora` and `pubmed` load the raw files
/// under the dataset root and enforce the published counts; anything
/// ending in `.json` loads as a normalized graph file.
pub fn load_named(name: &str) -> Result<AttributedGraph> {
    match name {
        "cora" => {
            let root = data_root().join("cora");
            let (g, _) = load_cora(&root.join("cora.content"), &root.join("cora.cites"))?;
            cora_spec().check(&g)?;
            Ok(g)
        }
        "pubmed" => {
            let (g, _) = load_pubmed(&data_root().join("pubmed"))?;
            pubmed_spec().check(&g)?;
            Ok(g)
        }
        other if other.ends_with(".json") => load_graph(Path::new(other)),
        other => Err(Error::input(format!(
            "unknown dataset {other:?}: expected \"cora\", \"pubmed\", or a .json graph path"
        ))),
    }
}
