//! Embed and verify a watermark on the Cora citation network.
//!
//! Trains GraphSAGE with an Erdos-Renyi trigger attached, then runs
//! the ownership test with the owner's key. Expects Cora under
//! `$GNNWM_DATA_DIR/cora` or a checkout-root `data/cora`.
//!
//! Run with: cargo run --example watermark_cora [trigger_size] [runs]

use gnnwm::data::{data_root, load_named};
use gnnwm::experiment::run_seed;
use gnnwm::graph::split_nodes;
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{accuracy_of, predict_labels, TrainConfig};
use gnnwm::trigger::TriggerParams;
use gnnwm::watermark::{embed, verify};

fn main() -> gnnwm::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(50, |s| s.parse().expect("trigger size"));
    let runs: usize = args.next().map_or(1, |s| s.parse().expect("runs"));

    let g = match load_named("cora") {
        Ok(g) => g,
        Err(e) => {
            eprintln!("could not load cora from {}: {e}", data_root().display());
            eprintln!("see the README for download instructions");
            return Ok(());
        }
    };
    let key = b"the-owner-secret";
    let params = TriggerParams {
        n,
        p_g: 0.0,
        p_r: 0.1,
    };

    for run in 0..runs {
        let seed = run_seed(key, 0, run)?;
        let mut split_stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "split")?);
        let split = split_nodes(g.num_nodes(), 0.4, 0.2, &mut split_stream)?;
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };

        let started = std::time::Instant::now();
        let (model, _, history) = embed(&g, &split, key, params, &cfg)?;
        let pred = predict_labels(&model, &g, &split.test)?;
        let truth: Vec<usize> = split
            .test
            .iter()
            .map(|&v| g.label_of(v))
            .collect::<gnnwm::Result<_>>()?;
        let report = verify(
            &model,
            key,
            params,
            g.feature_dim(),
            g.num_classes(),
            1e-6,
        )?;
        println!(
            "run {run}: test {:.4}, watermark {:.2}, p = {:.2e}, owned = {}, {} epochs, {:.1}s",
            accuracy_of(&pred, &truth),
            report.watermark_accuracy,
            report.p_value,
            report.decision,
            history.len(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
