//! Loader for the published PubMed-Diabetes tab format.
//!
//! The directory holds two files. `Pubmed-Diabetes.NODE.paper.tab`
//! starts with a `NODE␉paper` banner and a header whose
//! `numeric:w-<word>:0.0` columns fix the 500-word vocabulary order;
//! data lines carry a paper id, `label=<1|2|3>`, sparse
//! `w-<word>=<tfidf>` attributes, and a trailing `summary=` field that
//! is ignored. `Pubmed-Diabetes.DIRECTED.cites.tab` lists directed
//! citations as `<edge-id>␉paper:<src>␉|␉paper:<dst>`.

use super::LoadWarnings;
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

const NODE_FILE: &str = "Pubmed-Diabetes.NODE.paper.tab";
const CITES_FILE: &str = "Pubmed-Diabetes.DIRECTED.cites.tab";

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Load PubMed-Diabetes from its published directory layout.
///
/// Features are dense 500-dim TF-IDF rows (absent words are 0), in the
/// header's vocabulary order. Labels map `1→0, 2→1, 3→2`. Citations
/// are symmetrized and deduplicated, with unknown-id and self
/// citations dropped and counted.
pub fn load_pubmed(dir: &Path) -> Result<(AttributedGraph, LoadWarnings)> {
    let node_path = dir.join(NODE_FILE);
    let cites_path = dir.join(CITES_FILE);

    let mut lines = BufReader::new(File::open(&node_path)?).lines().enumerate();
    let banner = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Format(format!("{}: empty file", node_path.display()))),
    };
    if !banner.starts_with("NODE") {
        return Err(Error::Format(format!(
            "{}: missing NODE banner",
            node_path.display()
        )));
    }
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Format(format!("{}: missing header", node_path.display()))),
    };
    // `cat=1,2,3:label`, then `numeric:w-<word>:0.0` per vocabulary word,
    // then `string:summary`
    let mut vocab: HashMap<String, usize> = HashMap::new();
    for field in header.split('\t').skip(1) {
        if let Some(rest) = field.strip_prefix("numeric:") {
            let word = rest.split(':').next().unwrap_or_default();
            if word.is_empty() {
                return Err(Error::Format(format!(
                    "{}: bad header column {field:?}",
                    node_path.display()
                )));
            }
            let next = vocab.len();
            vocab.insert(word.to_string(), next);
        }
    }
    if vocab.is_empty() {
        return Err(Error::Format(format!(
            "{}: header defines no vocabulary",
            node_path.display()
        )));
    }
    let dim = vocab.len();

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(parse_error(&node_path, lineno, "missing paper id"));
        }
        if index.contains_key(&id) {
            return Err(parse_error(
                &node_path,
                lineno,
                format!("duplicate paper id {id:?}"),
            ));
        }
        let mut label = None;
        let mut row = vec![0.0; dim];
        for field in fields {
            let (key, value) = field.split_once('=').ok_or_else(|| {
                parse_error(&node_path, lineno, format!("attribute {field:?} has no '='"))
            })?;
            match key {
                "label" => {
                    label = Some(match value {
                        "1" => 0usize,
                        "2" => 1,
                        "3" => 2,
                        other => {
                            return Err(parse_error(
                                &node_path,
                                lineno,
                                format!("label {other:?} is not 1, 2, or 3"),
                            ))
                        }
                    });
                }
                "summary" => {}
                word => {
                    let &col = vocab.get(word).ok_or_else(|| {
                        parse_error(&node_path, lineno, format!("word {word:?} not in header"))
                    })?;
                    row[col] = value.parse::<f64>().map_err(|e| {
                        parse_error(&node_path, lineno, format!("bad value for {word:?}: {e}"))
                    })?;
                }
            }
        }
        let label = label
            .ok_or_else(|| parse_error(&node_path, lineno, format!("paper {id:?} has no label")))?;
        index.insert(id, features.len());
        features.push(row);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::Format(format!(
            "{}: no publications",
            node_path.display()
        )));
    }

    let mut warnings = LoadWarnings::default();
    let mut edges = Vec::new();
    let mut cite_lines = BufReader::new(File::open(&cites_path)?).lines().enumerate();
    let banner = cite_lines.next().map(|(_, l)| l).transpose()?;
    if !banner.is_some_and(|l| l.starts_with("DIRECTED")) {
        return Err(Error::Format(format!(
            "{}: missing DIRECTED banner",
            cites_path.display()
        )));
    }
    let marker = cite_lines.next().map(|(_, l)| l).transpose()?;
    if !marker.is_some_and(|l| l.starts_with("NO_FEATURES")) {
        return Err(Error::Format(format!(
            "{}: missing NO_FEATURES line",
            cites_path.display()
        )));
    }
    for (lineno, line) in cite_lines {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 || fields[2] != "|" {
            return Err(parse_error(
                &cites_path,
                lineno,
                "expected <id>␉paper:<src>␉|␉paper:<dst>",
            ));
        }
        let src = fields[1].strip_prefix("paper:").ok_or_else(|| {
            parse_error(&cites_path, lineno, format!("bad endpoint {:?}", fields[1]))
        })?;
        let dst = fields[3].strip_prefix("paper:").ok_or_else(|| {
            parse_error(&cites_path, lineno, format!("bad endpoint {:?}", fields[3]))
        })?;
        match (index.get(src), index.get(dst)) {
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

    let graph = AttributedGraph::build(features, &edges, Some(labels), 3)?;
    Ok((graph, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_toy(dir: &Path) {
        let mut f = File::create(dir.join(NODE_FILE)).unwrap();
        writeln!(f, "NODE\tpaper").unwrap();
        writeln!(
            f,
            "cat=1,2,3:label\tnumeric:w-alpha:0.0\tnumeric:w-beta:0.0\tnumeric:w-gamma:0.0\tstring:summary"
        )
        .unwrap();
        writeln!(f, "101\tlabel=1\tw-beta=0.5\tsummary=w-beta").unwrap();
        writeln!(f, "102\tlabel=3\tw-alpha=0.25\tw-gamma=1.5\tsummary=w-alpha,w-gamma").unwrap();
        writeln!(f, "103\tlabel=2\tsummary=").unwrap();
        writeln!(f, "104\tlabel=2\tw-gamma=0.125\tsummary=w-gamma").unwrap();

        let mut f = File::create(dir.join(CITES_FILE)).unwrap();
        writeln!(f, "DIRECTED\tcites").unwrap();
        writeln!(f, "NO_FEATURES").unwrap();
        writeln!(f, "1\tpaper:101\t|\tpaper:102").unwrap();
        writeln!(f, "2\tpaper:102\t|\tpaper:101").unwrap();
        writeln!(f, "3\tpaper:103\t|\tpaper:103").unwrap();
        writeln!(f, "4\tpaper:999\t|\tpaper:104").unwrap();
        writeln!(f, "5\tpaper:104\t|\tpaper:101").unwrap();
    }

    #[test]
    fn toy_fixture_loads_as_hand_checked() {
        let dir = tempfile::tempdir().unwrap();
        write_toy(dir.path());
        let (g, warnings) = load_pubmed(dir.path()).unwrap();

        assert_eq!(g.num_nodes(), 4);
        assert_eq!(g.feature_dim(), 3);
        assert_eq!(g.num_classes(), 3);
        assert_eq!(g.labels(), Some(&[0usize, 2, 1, 1][..]));
        assert_eq!(g.features_of(0), &[0.0, 0.5, 0.0]);
        assert_eq!(g.features_of(1), &[0.25, 0.0, 1.5]);
        assert_eq!(g.features_of(2), &[0.0, 0.0, 0.0]);
        assert_eq!(g.features_of(3), &[0.0, 0.0, 0.125]);
        // mutual 101↔102 merges; self and unknown dropped
        assert_eq!(g.edges(), &[(0, 1), (0, 3)]);
        assert_eq!(warnings.self_refs, 1);
        assert_eq!(warnings.unknown_refs, 1);
    }

    #[test]
    fn rejects_unknown_words_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        write_toy(dir.path());
        let node = dir.path().join(NODE_FILE);
        let text = std::fs::read_to_string(&node).unwrap();

        std::fs::write(&node, text.replace("w-beta=0.5", "w-delta=0.5")).unwrap();
        assert!(matches!(load_pubmed(dir.path()), Err(Error::Parse { .. })));

        std::fs::write(&node, text.replace("label=3", "label=4")).unwrap();
        assert!(matches!(load_pubmed(dir.path()), Err(Error::Parse { .. })));
    }

    #[test]
    fn full_pubmed_matches_published_counts() {
        let root = super::super::data_root().join("pubmed");
        if !root.join(NODE_FILE).exists() {
            eprintln!("skipping: {} not present", root.join(NODE_FILE).display());
            return;
        }
        let (g, warnings) = load_pubmed(&root).unwrap();
        assert_eq!(g.num_nodes(), 19717);
        assert_eq!(g.feature_dim(), 500);
        assert_eq!(g.num_classes(), 3);
        // 44338 published directed citations = 44324 distinct pairs
        // after dropping 3 self-citations and merging mutuals
        assert_eq!(g.num_edges(), 44324);
        assert_eq!(warnings.unknown_refs, 0);
        assert_eq!(warnings.self_refs, 3);
    }
}
