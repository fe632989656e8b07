//! Loader for the published Cora format.
//!
//! `cora.content`: one publication per line,
//! `paper_id ␉ f_1 … f_1433 ␉ class_label`, features binary.
//! `cora.cites`: one citation per line, `cited_id ␉ citing_id`.

use super::LoadWarnings;
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

const CORA_FEATURES: usize = 1433;

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Load Cora from its two raw files.
///
/// Paper ids map to dense indices in first-appearance order over the
/// content file; class labels map to `0..7` in lexicographic order of
/// the label string. Citations are symmetrized and deduplicated;
/// citations naming unknown papers and self-citations are dropped and
/// counted in the returned warnings.
pub fn load_cora(
    content_path: &Path,
    cites_path: &Path,
) -> Result<(AttributedGraph, LoadWarnings)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut label_names: Vec<String> = Vec::new();

    for (lineno, line) in BufReader::new(File::open(content_path)?).lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != CORA_FEATURES + 2 {
            return Err(Error::Format(format!(
                "{}:{lineno}: {} tab fields, expected id + {CORA_FEATURES} features + label",
                content_path.display(),
                fields.len()
            )));
        }
        let id = fields[0].to_string();
        if index.contains_key(&id) {
            return Err(parse_error(
                content_path,
                lineno,
                format!("duplicate paper id {id:?}"),
            ));
        }
        let mut row = Vec::with_capacity(CORA_FEATURES);
        for &f in &fields[1..=CORA_FEATURES] {
            match f {
                "0" => row.push(0.0),
                "1" => row.push(1.0),
                other => {
                    return Err(parse_error(
                        content_path,
                        lineno,
                        format!("feature value {other:?} is not binary"),
                    ))
                }
            }
        }
        index.insert(id, features.len());
        features.push(row);
        label_names.push(fields[CORA_FEATURES + 1].to_string());
    }
    if features.is_empty() {
        return Err(Error::Format(format!(
            "{}: no publications",
            content_path.display()
        )));
    }

    // class label strings → 0.. in lexicographic order
    let mut classes: Vec<String> = label_names.clone();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Format(format!(
            "{}: found {} class label(s), need at least 2",
            content_path.display(),
            classes.len()
        )));
    }
    let class_index: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    let labels: Vec<usize> = label_names
        .iter()
        .map(|name| class_index[name.as_str()])
        .collect();

    let mut warnings = LoadWarnings::default();
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(File::open(cites_path)?).lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_error(
                cites_path,
                lineno,
                format!("{} tab fields, expected cited␉citing", fields.len()),
            ));
        }
        match (index.get(fields[0]), index.get(fields[1])) {
            (Some(&a), Some(&b)) => {
                if a == b {
                    warnings.self_refs += 1;
                } else {
                    edges.push((a, b));
                }
            }
            _ => warnings.unknown_refs += 1,
        }
    }

    let graph = AttributedGraph::build(features, &edges, Some(labels), classes.len())?;
    Ok((graph, warnings))
}
