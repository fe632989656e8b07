//! Batch experiment harness: grids of watermarking runs with CSV reports.
//!
//! A single [`ExperimentConfig`] describes a dataset, a trigger
//! parameter grid, and attack sweeps. [`run_report`] executes the whole
//! grid with `repetitions` independently seeded runs per cell and
//! writes five per-run CSV files plus a `.summary.csv` companion for
//! each (means over the successful runs of a cell):
//!
//! * `fidelity.csv` — test and trigger accuracy of marked models over
//!   the full `(n, p_g, p_r)` grid, plus unmarked baseline rows
//!   recorded with `n = 0` and an empty trigger column.
//! * `uniqueness.csv` — watermark accuracy, p-value, and decision of
//!   *unmarked* models against every trigger in the grid.
//! * `pruning.csv` — test and watermark accuracy after magnitude
//!   pruning at each configured rate, per trigger size.
//! * `finetune.csv` — the same after fine-tuning for each configured
//!   epoch budget.
//! * `sensitivity.csv` — watermark accuracy over the `(p_g, p_r)` grid
//!   for the original trigger features and for their bit-flipped
//!   complement (`variant` column: `original` / `flipped`).
//!
//! The attack sweeps use isolated trigger nodes (`p_g = 0`) and the
//! first `p_r` of the grid; the sensitivity sweep uses the first `n`.
//! A run that fails leaves its metric cells empty and appends the
//! message to `errors.csv`; the rest of the grid still runs. Every
//! seed is derived from the key, the base seed, and the run index, so
//! re-running a config reproduces all files byte for byte.

use crate::attacks::{finetune, prune};
use crate::data::load_named;
use crate::error::{Error, Result};
use crate::graph::{split_nodes, AttributedGraph, NodeSplit};
use crate::rng::{derive_seed, RandomStream};
use crate::sage::{
    accuracy_of, predict_labels, train, SageModel, TrainConfig, HIDDEN_WIDTH,
};
use crate::trigger::{flip_features, make_trigger, TriggerGraph, TriggerParams};
use crate::watermark::{embed, extract, verify, watermark_accuracy, DEFAULT_ALPHA};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// Everything `run_report` needs, deserializable from JSON. Every
/// field has a default, so a config file only has to name the parts it
/// overrides (the key being the one field with no useful default).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset name or GRAPH1 file path, as accepted by
    /// [`load_named`].
    pub dataset: String,
    /// Owner key; seeds the triggers and all per-run randomness.
    pub key: String,
    /// Trigger sizes `n` to sweep.
    pub trigger_sizes: Vec<usize>,
    /// Trigger edge probabilities `p_g` to sweep.
    pub edge_probs: Vec<f64>,
    /// Trigger ones-fractions `p_r` to sweep.
    pub ones_fractions: Vec<f64>,
    /// Independently seeded runs per grid cell.
    pub repetitions: usize,
    /// Mixed into every run seed; lets two reports with the same key
    /// use disjoint randomness.
    pub base_seed: u64,
    /// Training hyperparameters (the per-run seed overrides `seed`).
    pub train: TrainConfig,
    pub train_fraction: f64,
    pub val_fraction: f64,
    /// False-positive budget for the uniqueness decisions.
    pub alpha: f64,
    pub pruning_rates: Vec<f64>,
    pub finetune_epochs: Vec<usize>,
    /// Fraction of the test split the fine-tuning adversary can label.
    pub finetune_test_fraction: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: "cora".to_string(),
            key: String::new(),
            trigger_sizes: vec![10, 50, 100],
            edge_probs: vec![0.0, 0.1, 0.2],
            ones_fractions: vec![0.1, 0.2, 0.3],
            repetitions: 10,
            base_seed: 0,
            train: TrainConfig::default(),
            train_fraction: 0.4,
            val_fraction: 0.2,
            alpha: DEFAULT_ALPHA,
            pruning_rates: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            finetune_epochs: vec![10, 20, 30],
            finetune_test_fraction: 0.3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.key.is_empty() {
            return Err(Error::input("experiment config needs a non-empty key"));
        }
        if self.trigger_sizes.is_empty()
            || self.edge_probs.is_empty()
            || self.ones_fractions.is_empty()
        {
            return Err(Error::input("trigger parameter grids must be non-empty"));
        }
        if self.repetitions == 0 {
            return Err(Error::input("repetitions must be at least one"));
        }
        if self.train_fraction <= 0.0
            || self.val_fraction < 0.0
            || self.train_fraction + self.val_fraction >= 1.0
        {
            return Err(Error::input(
                "train/val fractions must be positive and leave room for a test split",
            ));
        }
        if !(0.0..1.0).contains(&self.alpha) || self.alpha <= 0.0 {
            return Err(Error::input("alpha must lie in (0, 1)"));
        }
        if self.pruning_rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::input("pruning rates must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.finetune_test_fraction) {
            return Err(Error::input("finetune_test_fraction must lie in [0, 1]"));
        }
        self.train.validate()
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Seed for repetition `run`: a key-derived per-run stream offset by
/// the config's base seed.
pub fn run_seed(key: &[u8], base_seed: u64, run: usize) -> Result<u64> {
    Ok(derive_seed(key, &format!("run-{run}"))?.wrapping_add(base_seed))
}

/// What [`run_report`] produced: the files written (in creation order)
/// and how many grid runs failed.
#[derive(Debug)]
pub struct ReportOutcome {
    pub files: Vec<PathBuf>,
    pub failed_runs: usize,
}

/// One CSV report being accumulated: per-run rows of coordinate
/// strings (run index last) plus optional metric values, `None`
/// marking a failed or inapplicable cell.
struct Section {
    name: &'static str,
    coord_names: &'static [&'static str],
    metric_names: &'static [&'static str],
    rows: Vec<(Vec<String>, Vec<Option<f64>>)>,
}

impl Section {
    fn new(
        name: &'static str,
        coord_names: &'static [&'static str],
        metric_names: &'static [&'static str],
    ) -> Section {
        Section {
            name,
            coord_names,
            metric_names,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, coords: Vec<String>, metrics: Vec<Option<f64>>) {
        debug_assert_eq!(coords.len(), self.coord_names.len());
        debug_assert_eq!(metrics.len(), self.metric_names.len());
        self.rows.push((coords, metrics));
    }

    /// Record a computed cell, or an empty error row plus a message in
    /// `errors` if the computation failed.
    fn record(
        &mut self,
        errors: &mut Vec<[String; 3]>,
        coords: Vec<String>,
        result: Result<Vec<f64>>,
    ) {
        match result {
            Ok(values) => {
                let metrics = values.into_iter().map(Some).collect();
                self.push(coords, metrics);
            }
            Err(e) => {
                errors.push([self.name.to_string(), coords.join(","), e.to_string()]);
                let metrics = vec![None; self.metric_names.len()];
                self.push(coords, metrics);
            }
        }
    }

    /// Write `<name>.csv` (per-run rows) and `<name>.summary.csv`
    /// (per-cell means over the runs that produced each metric, plus a
    /// `runs` column counting runs with any metric at all).
    fn write(&self, dir: &Path) -> Result<[PathBuf; 2]> {
        let runs_path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&runs_path)?;
        let header: Vec<&str> = self
            .coord_names
            .iter()
            .chain(self.metric_names)
            .copied()
            .collect();
        w.write_record(&header)?;
        for (coords, metrics) in &self.rows {
            let record: Vec<String> = coords
                .iter()
                .cloned()
                .chain(metrics.iter().map(format_metric))
                .collect();
            w.write_record(&record)?;
        }
        w.flush()?;

        // Group by all coordinates except the trailing run index,
        // preserving first-seen order.
        let mut order: Vec<Vec<String>> = Vec::new();
        let mut groups: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for (i, (coords, _)) in self.rows.iter().enumerate() {
            let cell = coords[..coords.len() - 1].to_vec();
            groups
                .entry(cell.clone())
                .or_insert_with(|| {
                    order.push(cell);
                    Vec::new()
                })
                .push(i);
        }

        let summary_path = dir.join(format!("{}.summary.csv", self.name));
        let mut w = csv::Writer::from_path(&summary_path)?;
        let header: Vec<&str> = self.coord_names[..self.coord_names.len() - 1]
            .iter()
            .copied()
            .chain(std::iter::once("runs"))
            .chain(self.metric_names.iter().copied())
            .collect();
        w.write_record(&header)?;
        for cell in &order {
            let indices = &groups[cell];
            let succeeded = indices
                .iter()
                .filter(|&&i| self.rows[i].1.iter().any(Option::is_some))
                .count();
            let mut record: Vec<String> = cell.clone();
            record.push(succeeded.to_string());
            for m in 0..self.metric_names.len() {
                let values: Vec<f64> = indices
                    .iter()
                    .filter_map(|&i| self.rows[i].1[m])
                    .collect();
                let mean = if values.is_empty() {
                    None
                } else {
                    Some(values.iter().sum::<f64>() / values.len() as f64)
                };
                record.push(format_metric(&mean));
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok([runs_path, summary_path])
    }
}

fn format_metric(m: &Option<f64>) -> String {
    match m {
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

/// Mean test-set accuracy of `m` on the host task.
fn test_accuracy(m: &SageModel, g: &AttributedGraph, split: &NodeSplit) -> Result<f64> {
    let pred = predict_labels(m, g, &split.test)?;
    let truth: Vec<usize> = split
        .test
        .iter()
        .map(|&v| g.label_of(v))
        .collect::<Result<_>>()?;
    Ok(accuracy_of(&pred, &truth))
}

/// Watermark accuracy of `m` on a trigger.
fn trigger_accuracy(m: &SageModel, t: &TriggerGraph) -> Result<f64> {
    watermark_accuracy(&extract(m, t)?, &t.watermark)
}

struct Harness<'a> {
    cfg: &'a ExperimentConfig,
    g: AttributedGraph,
}

impl Harness<'_> {
    /// The node split and train config for repetition `run`.
    fn setup(&self, run: usize) -> Result<(NodeSplit, TrainConfig)> {
        let seed = run_seed(self.cfg.key.as_bytes(), self.cfg.base_seed, run)?;
        let mut stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "split")?);
        let split = split_nodes(
            self.g.num_nodes(),
            self.cfg.train_fraction,
            self.cfg.val_fraction,
            &mut stream,
        )?;
        let mut train_cfg = self.cfg.train.clone();
        train_cfg.seed = seed;
        Ok((split, train_cfg))
    }

    /// Train an unmarked model for repetition `run`.
    fn train_baseline(&self, run: usize) -> Result<SageModel> {
        let (split, train_cfg) = self.setup(run)?;
        let model = SageModel::init(
            self.g.feature_dim(),
            HIDDEN_WIDTH,
            self.g.num_classes(),
            train_cfg.seed,
        )?;
        let (trained, _) = train(model, &self.g, &split, None, &train_cfg)?;
        Ok(trained)
    }

    /// Train a marked model for repetition `run`, returning it with
    /// its trigger and split.
    fn train_marked(
        &self,
        params: TriggerParams,
        run: usize,
    ) -> Result<(SageModel, TriggerGraph, NodeSplit)> {
        let (split, train_cfg) = self.setup(run)?;
        let (model, trigger, _) = embed(
            &self.g,
            &split,
            self.cfg.key.as_bytes(),
            params,
            &train_cfg,
        )?;
        Ok((model, trigger, split))
    }
}

/// Run the full grid described by `cfg` and write all report files
/// into `out_dir` (created if missing). See the module docs for the
/// file inventory.
pub fn run_report(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ReportOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let g = load_named(&cfg.dataset)?;
    let h = Harness { cfg, g };
    let dataset = cfg.dataset.as_str();
    let key = cfg.key.as_bytes();
    let reps = cfg.repetitions;
    let mut errors: Vec<[String; 3]> = Vec::new();

    // Unmarked models are shared between the fidelity baseline rows
    // and the uniqueness sweep; a failure here surfaces as error rows
    // in both.
    let baselines: Vec<Result<SageModel>> =
        (0..reps).map(|run| h.train_baseline(run)).collect();

    let mut fidelity = Section::new(
        "fidelity",
        &["dataset", "n", "p_g", "p_r", "run"],
        &["test_accuracy", "trigger_accuracy"],
    );
    for (run, baseline) in baselines.iter().enumerate() {
        let coords = vec![
            dataset.to_string(),
            "0".to_string(),
            "0".to_string(),
            "0".to_string(),
            run.to_string(),
        ];
        let result = baseline.as_ref().map_err(clone_error).and_then(|m| {
            let (split, _) = h.setup(run)?;
            test_accuracy(m, &h.g, &split)
        });
        match result {
            Ok(acc) => fidelity.push(coords, vec![Some(acc), None]),
            Err(e) => {
                errors.push(["fidelity".to_string(), coords.join(","), e.to_string()]);
                fidelity.push(coords, vec![None, None]);
            }
        }
    }
    for &n in &cfg.trigger_sizes {
        for &p_g in &cfg.edge_probs {
            for &p_r in &cfg.ones_fractions {
                let params = TriggerParams { n, p_g, p_r };
                for run in 0..reps {
                    let coords = vec![
                        dataset.to_string(),
                        n.to_string(),
                        p_g.to_string(),
                        p_r.to_string(),
                        run.to_string(),
                    ];
                    let result = h.train_marked(params, run).and_then(|(m, t, split)| {
                        Ok(vec![
                            test_accuracy(&m, &h.g, &split)?,
                            trigger_accuracy(&m, &t)?,
                        ])
                    });
                    fidelity.record(&mut errors, coords, result);
                }
            }
        }
    }

    let mut uniqueness = Section::new(
        "uniqueness",
        &["dataset", "n", "p_g", "p_r", "run"],
        &["watermark_accuracy", "p_value", "decision"],
    );
    for &n in &cfg.trigger_sizes {
        for &p_g in &cfg.edge_probs {
            for &p_r in &cfg.ones_fractions {
                let params = TriggerParams { n, p_g, p_r };
                for (run, baseline) in baselines.iter().enumerate() {
                    let coords = vec![
                        dataset.to_string(),
                        n.to_string(),
                        p_g.to_string(),
                        p_r.to_string(),
                        run.to_string(),
                    ];
                    let result = baseline.as_ref().map_err(clone_error).and_then(|m| {
                        let report = verify(
                            m,
                            key,
                            params,
                            h.g.feature_dim(),
                            h.g.num_classes(),
                            cfg.alpha,
                        )?;
                        Ok(vec![
                            report.watermark_accuracy,
                            report.p_value,
                            if report.decision { 1.0 } else { 0.0 },
                        ])
                    });
                    uniqueness.record(&mut errors, coords, result);
                }
            }
        }
    }

    // Attack sweeps follow the robustness protocol: isolated trigger
    // nodes (p_g = 0) at the first configured p_r, one marked model
    // per (n, run) shared by the pruning and fine-tuning sweeps.
    let attack_p_r = cfg.ones_fractions[0];
    let mut pruning = Section::new(
        "pruning",
        &["dataset", "n", "rate", "run"],
        &["test_accuracy", "watermark_accuracy"],
    );
    let mut finetune_sec = Section::new(
        "finetune",
        &["dataset", "n", "epochs", "run"],
        &["test_accuracy", "watermark_accuracy"],
    );
    for &n in &cfg.trigger_sizes {
        let params = TriggerParams {
            n,
            p_g: 0.0,
            p_r: attack_p_r,
        };
        for run in 0..reps {
            let marked = h.train_marked(params, run);
            for &rate in &cfg.pruning_rates {
                let coords = vec![
                    dataset.to_string(),
                    n.to_string(),
                    rate.to_string(),
                    run.to_string(),
                ];
                let result = marked.as_ref().map_err(clone_error).and_then(|(m, t, split)| {
                    let pruned = prune(m, rate)?;
                    Ok(vec![
                        test_accuracy(&pruned, &h.g, split)?,
                        trigger_accuracy(&pruned, t)?,
                    ])
                });
                pruning.record(&mut errors, coords, result);
            }
            for &epochs in &cfg.finetune_epochs {
                let coords = vec![
                    dataset.to_string(),
                    n.to_string(),
                    epochs.to_string(),
                    run.to_string(),
                ];
                let result = marked.as_ref().map_err(clone_error).and_then(|(m, t, split)| {
                    let (_, train_cfg) = h.setup(run)?;
                    let tuned = finetune(
                        m,
                        &h.g,
                        split,
                        epochs,
                        cfg.finetune_test_fraction,
                        &train_cfg,
                    )?;
                    Ok(vec![
                        test_accuracy(&tuned, &h.g, split)?,
                        trigger_accuracy(&tuned, t)?,
                    ])
                });
                finetune_sec.record(&mut errors, coords, result);
            }
        }
    }

    // Feature-sensitivity sweep at the first configured trigger size:
    // train on the trigger as generated and on its flipped complement.
    let sensitivity_n = cfg.trigger_sizes[0];
    let mut sensitivity = Section::new(
        "sensitivity",
        &["dataset", "n", "p_g", "p_r", "variant", "run"],
        &["watermark_accuracy"],
    );
    for &p_g in &cfg.edge_probs {
        for &p_r in &cfg.ones_fractions {
            for variant in ["original", "flipped"] {
                for run in 0..reps {
                    let coords = vec![
                        dataset.to_string(),
                        sensitivity_n.to_string(),
                        p_g.to_string(),
                        p_r.to_string(),
                        variant.to_string(),
                        run.to_string(),
                    ];
                    let result = (|| -> Result<Vec<f64>> {
                        let t = make_trigger(
                            key,
                            sensitivity_n,
                            p_g,
                            p_r,
                            h.g.feature_dim(),
                            h.g.num_classes(),
                        )?;
                        let t = if variant == "flipped" {
                            flip_features(&t)?
                        } else {
                            t
                        };
                        let (split, train_cfg) = h.setup(run)?;
                        let model = SageModel::init(
                            h.g.feature_dim(),
                            HIDDEN_WIDTH,
                            h.g.num_classes(),
                            train_cfg.seed,
                        )?;
                        let (trained, _) =
                            train(model, &h.g, &split, Some(&t), &train_cfg)?;
                        Ok(vec![trigger_accuracy(&trained, &t)?])
                    })();
                    sensitivity.record(&mut errors, coords, result);
                }
            }
        }
    }

    let mut files = Vec::new();
    for section in [&fidelity, &uniqueness, &pruning, &finetune_sec, &sensitivity] {
        files.extend(section.write(out_dir)?);
    }

    let errors_path = out_dir.join("errors.csv");
    let mut w = csv::Writer::from_path(&errors_path)?;
    w.write_record(["file", "row", "message"])?;
    for row in &errors {
        w.write_record(row)?;
    }
    w.flush()?;
    files.push(errors_path);

    Ok(ReportOutcome {
        files,
        failed_runs: errors.len(),
    })
}

/// Borrowed errors from the shared baseline results cannot move out,
/// so error rows carry a copy with the same message.
fn clone_error(e: &Error) -> Error {
    Error::input(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic, save_graph};

    fn smoke_config(dataset: String) -> ExperimentConfig {
        ExperimentConfig {
            dataset,
            key: "smoke-key".to_string(),
            trigger_sizes: vec![4],
            edge_probs: vec![0.0],
            ones_fractions: vec![0.25],
            repetitions: 1,
            base_seed: 7,
            train: TrainConfig {
                epochs: 2,
                early_stop_patience: 0,
                batch_size: 32,
                ..TrainConfig::default()
            },
            alpha: 0.05,
            pruning_rates: vec![0.0, 0.5],
            finetune_epochs: vec![1],
            ..ExperimentConfig::default()
        }
    }

    fn write_smoke_dataset(dir: &Path) -> String {
        let g = make_synthetic(60, 3, 12, 0.9, 5).unwrap();
        let path = dir.join("toy.json");
        save_graph(&path, &g).unwrap();
        path.to_string_lossy().into_owned()
    }

    #[test]
    fn config_defaults_parse_and_validate() {
        let cfg = ExperimentConfig::from_json(r#"{"key": "k"}"#).unwrap();
        assert_eq!(cfg.dataset, "cora");
        assert_eq!(cfg.trigger_sizes, vec![10, 50, 100]);
        assert_eq!(cfg.repetitions, 10);

        assert!(ExperimentConfig::from_json("{}").is_err(), "empty key");
        assert!(
            ExperimentConfig::from_json(r#"{"key": "k", "repetitions": 0}"#).is_err()
        );
        assert!(
            ExperimentConfig::from_json(r#"{"key": "k", "unknown_field": 1}"#).is_err()
        );
    }

    #[test]
    fn smoke_grid_emits_all_reports() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = smoke_config(write_smoke_dataset(dir.path()));
        let out = dir.path().join("report");
        let outcome = run_report(&cfg, &out).unwrap();
        assert_eq!(outcome.failed_runs, 0);

        for name in [
            "fidelity.csv",
            "fidelity.summary.csv",
            "uniqueness.csv",
            "uniqueness.summary.csv",
            "pruning.csv",
            "pruning.summary.csv",
            "finetune.csv",
            "finetune.summary.csv",
            "sensitivity.csv",
            "sensitivity.summary.csv",
            "errors.csv",
        ] {
            assert!(out.join(name).exists(), "{name} missing");
        }

        let fidelity = std::fs::read_to_string(out.join("fidelity.csv")).unwrap();
        let mut lines = fidelity.lines();
        assert_eq!(
            lines.next(),
            Some("dataset,n,p_g,p_r,run,test_accuracy,trigger_accuracy")
        );
        // One baseline row (n = 0) plus one marked row for the 1-cell grid.
        assert_eq!(lines.count(), 2);

        let errors = std::fs::read_to_string(out.join("errors.csv")).unwrap();
        assert_eq!(errors.lines().count(), 1, "only the header");
    }

    #[test]
    fn rerun_reproduces_identical_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = smoke_config(write_smoke_dataset(dir.path()));
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        let files_a = run_report(&cfg, &out_a).unwrap().files;
        let files_b = run_report(&cfg, &out_b).unwrap().files;
        assert_eq!(files_a.len(), files_b.len());
        for (a, b) in files_a.iter().zip(&files_b) {
            let bytes_a = std::fs::read(a).unwrap();
            let bytes_b = std::fs::read(b).unwrap();
            assert_eq!(bytes_a, bytes_b, "{} differs", a.display());
        }
    }

    #[test]
    fn failed_cells_leave_error_rows_and_grid_continues() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = smoke_config(write_smoke_dataset(dir.path()));
        // A zero-node trigger cannot be generated, so every cell that
        // needs a marked model fails; the baseline-driven rows survive.
        cfg.trigger_sizes = vec![0];
        let out = dir.path().join("report");
        let outcome = run_report(&cfg, &out).unwrap();
        assert!(outcome.failed_runs > 0);

        let errors = std::fs::read_to_string(out.join("errors.csv")).unwrap();
        assert!(errors.lines().count() > 1);

        let fidelity = std::fs::read_to_string(out.join("fidelity.csv")).unwrap();
        let marked_row = fidelity
            .lines()
            .find(|l| l.contains(",0,0,0.25,"))
            .expect("marked row present");
        assert!(
            marked_row.ends_with(",,"),
            "metrics empty in error row: {marked_row}"
        );

        let uniqueness = std::fs::read_to_string(out.join("uniqueness.csv")).unwrap();
        // Baseline models trained fine, but verification against an
        // empty trigger fails, so uniqueness rows are error rows too.
        assert!(uniqueness.lines().nth(1).unwrap().ends_with(",,,"));
    }

    #[test]
    fn run_seeds_differ_by_run_and_base() {
        let a = run_seed(b"k", 0, 0).unwrap();
        let b = run_seed(b"k", 0, 1).unwrap();
        let c = run_seed(b"k", 1, 0).unwrap();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(c, a.wrapping_add(1));
    }
}
