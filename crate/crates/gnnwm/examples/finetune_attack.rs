//! Fine-tune a watermarked model on adversary-labeled data and
//! re-verify the watermark afterwards.
//!
//! The adversary owns the training split plus labels for a fraction
//! of the test split, and continues training without the trigger for
//! a fixed number of epochs — the strongest removal attack from the
//! toolkit. On this synthetic host the watermark survives.
//!
//! Run with: cargo run --example finetune_attack

use gnnwm::attacks::finetune;
use gnnwm::data::make_synthetic;
use gnnwm::graph::split_nodes;
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{accuracy_of, predict_labels, TrainConfig};
use gnnwm::trigger::TriggerParams;
use gnnwm::watermark::{embed, verify};

fn main() -> gnnwm::Result<()> {
    let g = make_synthetic(300, 3, 24, 0.9, 1)?;
    let seed: u64 = 11;
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

    println!("epochs  test_acc  watermark_acc  still_verified");
    for epochs in [0, 10, 20, 30] {
        let tuned = finetune(&model, &g, &split, epochs, 0.3, &cfg)?;
        let pred = predict_labels(&tuned, &g, &split.test)?;
        let test_acc = accuracy_of(&pred, &truth);
        let report = verify(
            &tuned,
            key,
            params,
            g.feature_dim(),
            g.num_classes(),
            1e-4,
        )?;
        println!(
            "{epochs:>6}  {test_acc:.4}    {:.4}         {}",
            report.watermark_accuracy, report.decision
        );
    }
    Ok(())
}
