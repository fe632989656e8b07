//! Train non-watermarked GraphSAGE baselines on the Cora citation
//! network and report test accuracy.
//!
//! Expects the raw Cora files under `$GNNWM_DATA_DIR/cora` (or a
//! `data/cora` directory at the checkout root); prints download
//! instructions and exits cleanly when they are absent.
//!
//! Run with: cargo run --example baseline_cora [runs]

use gnnwm::data::{data_root, load_named};
use gnnwm::experiment::run_seed;
use gnnwm::graph::split_nodes;
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{accuracy_of, predict_labels, train, SageModel, TrainConfig};

const HIDDEN: usize = 128;

fn main() -> gnnwm::Result<()> {
    let runs: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("runs must be a number"))
        .unwrap_or(1);

    let g = match load_named("cora") {
        Ok(g) => g,
        Err(e) => {
            eprintln!("could not load cora from {}: {e}", data_root().display());
            eprintln!("download cora.content and cora.cites from");
            eprintln!("https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz");
            eprintln!("and unpack them into data/cora/");
            return Ok(());
        }
    };
    println!(
        "cora: {} nodes, {} edges, {} features, {} classes",
        g.num_nodes(),
        g.num_edges(),
        g.feature_dim(),
        g.num_classes()
    );

    let mut accuracies = Vec::new();
    for run in 0..runs {
        let seed = run_seed(b"baseline-example", 0, run)?;
        let mut split_stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "split")?);
        let split = split_nodes(g.num_nodes(), 0.4, 0.2, &mut split_stream)?;
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };

        let started = std::time::Instant::now();
        let model = SageModel::init(g.feature_dim(), HIDDEN, g.num_classes(), seed)?;
        let (model, history) = train(model, &g, &split, None, &cfg)?;
        let pred = predict_labels(&model, &g, &split.test)?;
        let truth: Vec<usize> = split.test.iter().map(|&v| g.label_of(v)).collect::<gnnwm::Result<_>>()?;
        let acc = accuracy_of(&pred, &truth);
        accuracies.push(acc);
        println!(
            "run {run}: test accuracy {acc:.4} ({} epochs, {:.1}s)",
            history.len(),
            started.elapsed().as_secs_f64()
        );
    }

    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    println!("mean over {} run(s): {mean:.4}", accuracies.len());
    Ok(())
}
