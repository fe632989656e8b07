//! Magnitude-prune a watermarked model and watch the watermark hold.
//!
//! Trains a marked model on a synthetic host graph, then sweeps the
//! global pruning rate from 0 to 0.9, reporting test accuracy and
//! watermark accuracy side by side. The watermark survives rates that
//! already cripple the model's real task.
//!
//! Run with: cargo run --example pruning_attack

use gnnwm::attacks::prune;
use gnnwm::data::make_synthetic;
use gnnwm::graph::split_nodes;
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{accuracy_of, predict_labels, TrainConfig};
use gnnwm::trigger::TriggerParams;
use gnnwm::watermark::{embed, verify};

fn main() -> gnnwm::Result<()> {
    let g = make_synthetic(300, 3, 24, 0.9, 1)?;
    let seed: u64 = 7;
    let mut split_stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "split")?);
    let split = split_nodes(g.num_nodes(), 0.4, 0.2, &mut split_stream)?;

    let key = b"alice";
    let params = TriggerParams {
        n: 12,
        p_g: 0.0,
        p_r: 0.2,
    };
    let cfg = TrainConfig {
        epochs: 40,
        early_stop_patience: 0,
        seed,
        ..TrainConfig::default()
    };
    let (model, _, _) = embed(&g, &split, key, params, &cfg)?;

    let truth: Vec<usize> = split
        .test
        .iter()
        .map(|&v| g.label_of(v))
        .collect::<gnnwm::Result<_>>()?;

    println!("rate  test_acc  watermark_acc  still_verified");
    for rate in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let pruned = prune(&model, rate)?;
        let pred = predict_labels(&pruned, &g, &split.test)?;
        let test_acc = accuracy_of(&pred, &truth);
        let report = verify(
            &pruned,
            key,
            params,
            g.feature_dim(),
            g.num_classes(),
            1e-4,
        )?;
        println!(
            "{rate:.1}   {test_acc:.4}    {:.4}         {}",
            report.watermark_accuracy, report.decision
        );
    }
    Ok(())
}
