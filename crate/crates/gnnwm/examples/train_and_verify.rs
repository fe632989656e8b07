//! Embed a watermark while training, then verify ownership.
//!
//! Uses a small synthetic host graph so the whole cycle — train with
//! the trigger attached, extract the predictions, run the binomial
//! ownership test — finishes in seconds. The verification succeeds
//! with the owner's key and fails with anyone else's.
//!
//! Run with: cargo run --example train_and_verify

use gnnwm::data::make_synthetic;
use gnnwm::graph::split_nodes;
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{accuracy_of, predict_labels, TrainConfig};
use gnnwm::trigger::TriggerParams;
use gnnwm::watermark::{embed, verify};

fn main() -> gnnwm::Result<()> {
    let g = make_synthetic(300, 3, 24, 0.9, 1)?;
    let seed: u64 = 42;
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
    println!(
        "training on {} nodes with a {}-node trigger attached...",
        g.num_nodes(),
        params.n
    );
    let (model, trigger, history) = embed(&g, &split, key, params, &cfg)?;
    let last = history.last().expect("at least one epoch");
    println!(
        "trained {} epochs; final val accuracy {:.3}, trigger accuracy {:.3}",
        history.len(),
        last.val_accuracy,
        last.trigger_accuracy.unwrap_or(0.0)
    );

    let pred = predict_labels(&model, &g, &split.test)?;
    let truth: Vec<usize> = split.test.iter().map(|&v| g.labels().unwrap()[v]).collect();
    println!("host test accuracy: {:.3}", accuracy_of(&pred, &truth));
    println!("trigger memorized: {:?}", trigger.watermark);

    // The owner's key regenerates the trigger and finds the watermark.
    let alpha = 1e-4;
    let report = verify(&model, key, params, g.feature_dim(), g.num_classes(), alpha)?;
    println!(
        "\nwith key \"alice\":  accuracy {:.2}, p-value {:.2e}, decision: {}",
        report.watermark_accuracy,
        report.p_value,
        if report.decision { "OWNED" } else { "not owned" }
    );
    assert!(report.decision);

    // A different key generates an unrelated trigger, so the model's
    // answers look like chance and the test refuses the claim.
    let report = verify(&model, b"mallory", params, g.feature_dim(), g.num_classes(), alpha)?;
    println!(
        "with key \"mallory\": accuracy {:.2}, p-value {:.2e}, decision: {}",
        report.watermark_accuracy,
        report.p_value,
        if report.decision { "OWNED" } else { "not owned" }
    );
    assert!(!report.decision);
    Ok(())
}
