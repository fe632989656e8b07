//! Black-box ownership watermarking for inductive graph neural networks.
//!
//! A model owner generates a small random "trigger" graph from a secret
//! key, trains a GraphSAGE classifier that fits both the task and the
//! trigger's keyed labels, and can later prove ownership of a suspect
//! model: regenerate the trigger from the key, query the model on it,
//! and test whether the agreement with the keyed labels is statistically
//! impossible for a model that never saw the trigger.
//!
//! The crate provides the full pipeline:
//!
//! - [`rng`] — deterministic keyed randomness (the key → trigger map);
//! - [`graph`] — attributed graphs in CSR form, train/val/test splits;
//! - [`trigger`] — Erdős–Rényi trigger generation from a secret key;
//! - [`sage`] — a self-contained GraphSAGE-mean engine (forward,
//!   analytic backprop, Adam) trained in 64-bit floats for exact
//!   reproducibility;
//! - [`watermark`] — embedding, extraction, and the binomial
//!   verification test;
//! - [`attacks`] — robustness probes (magnitude pruning, fine-tuning);
//! - [`data`] — dataset loaders (Cora, PubMed, a JSON interchange
//!   format) and synthetic graphs;
//! - [`experiment`] — the reproducible experiment grid behind the
//!   reported tables.
//!
//! Everything downstream of a `(secret key, config)` pair is
//! deterministic: same inputs, same bytes out.

pub mod attacks;
pub mod data;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod rng;
pub mod sage;
pub mod trigger;
pub mod watermark;

mod linalg;

pub use error::{Error, Result};
