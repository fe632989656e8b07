//! Run a miniature experiment grid end to end and show the reports.
//!
//! Sweeps a small trigger grid on a synthetic host graph — fidelity,
//! uniqueness, pruning, fine-tuning, and flipped-feature sensitivity —
//! and writes the same CSV reports the `report` subcommand produces,
//! plus per-cell summaries. Everything lands in a temporary directory
//! that is printed at the end.
//!
//! Run with: cargo run --example experiment_grid

use gnnwm::data::{make_synthetic, save_graph};
use gnnwm::experiment::{run_report, ExperimentConfig};
use gnnwm::sage::TrainConfig;

fn main() -> gnnwm::Result<()> {
    let dir = std::env::temp_dir().join("gnnwm-experiment-grid");
    std::fs::create_dir_all(&dir)?;
    let host = dir.join("host.json");
    save_graph(&host, &make_synthetic(240, 3, 24, 0.9, 5)?)?;

    let cfg = ExperimentConfig {
        dataset: host.display().to_string(),
        key: "grid-example".to_string(),
        trigger_sizes: vec![8, 16],
        edge_probs: vec![0.0, 0.2],
        ones_fractions: vec![0.2],
        repetitions: 2,
        train: TrainConfig {
            epochs: 25,
            early_stop_patience: 0,
            ..TrainConfig::default()
        },
        pruning_rates: vec![0.0, 0.5],
        finetune_epochs: vec![10],
        ..ExperimentConfig::default()
    };

    let out = dir.join("reports");
    let outcome = run_report(&cfg, &out)?;
    println!("wrote {} report files to {}", outcome.files.len(), out.display());
    for f in &outcome.files {
        println!("  {}", f.file_name().unwrap().to_string_lossy());
    }
    if outcome.failed_runs > 0 {
        println!("{} run(s) failed; see errors.csv", outcome.failed_runs);
    }

    println!("\nfidelity.summary.csv:");
    print!("{}", std::fs::read_to_string(out.join("fidelity.summary.csv"))?);
    Ok(())
}
