//! Command-line front end for the watermarking toolkit.
//!
//! Thin by design: every subcommand parses arguments, calls into the
//! library, and prints or saves the result. Exit codes follow one
//! contract everywhere: 0 = success (and, for verification, watermark
//! present), 2 = verification ran but the watermark is absent,
//! 1 = any error.

use clap::{Args, Parser, Subcommand};
use gnnwm::data::{load_named, save_graph};
use gnnwm::experiment::{run_report, ExperimentConfig};
use gnnwm::graph::{split_nodes, AttributedGraph, NodeSplit};
use gnnwm::rng::{derive_seed, RandomStream};
use gnnwm::sage::{
    load_checkpoint, save_checkpoint, train, EpochStats, SageModel, TrainConfig, HIDDEN_WIDTH,
};
use gnnwm::trigger::{make_trigger, TriggerParams};
use gnnwm::watermark::{embed, verify, DEFAULT_ALPHA};
use gnnwm::{attacks, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gnnwm",
    version,
    about = "Embed, extract, and verify ownership watermarks in graph neural networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a trigger graph from a key and write it as GRAPH1 JSON
    /// with a watermark sidecar.
    GenerateTrigger(GenerateTriggerArgs),
    /// Train a model, watermarked by default, and save a checkpoint
    /// plus a per-epoch history CSV.
    Train(TrainArgs),
    /// Check a checkpoint for the watermark of a key; exits 0 if
    /// present, 2 if not.
    Verify(VerifyArgs),
    /// Run a removal attack on a checkpoint and save the attacked
    /// model.
    Attack(AttackArgs),
    /// Run a full experiment grid from a JSON config and write CSV
    /// reports.
    Report(ReportArgs),
}

#[derive(Args)]
struct TriggerSpec {
    /// Owner key; all trigger randomness derives from it.
    #[arg(long)]
    key: String,
    /// Number of trigger nodes.
    #[arg(long)]
    n: usize,
    /// Trigger edge probability.
    #[arg(long)]
    pg: f64,
    /// Fraction of ones in the trigger features.
    #[arg(long)]
    pr: f64,
}

impl TriggerSpec {
    fn params(&self) -> TriggerParams {
        TriggerParams {
            n: self.n,
            p_g: self.pg,
            p_r: self.pr,
        }
    }
}

/// Trigger parameters as an all-or-none group: give the whole set to
/// name a watermark, or none of it.
#[derive(Args)]
struct OptionalTriggerSpec {
    /// Owner key; all trigger randomness derives from it.
    #[arg(long, requires_all = ["n", "pg", "pr"])]
    key: Option<String>,
    /// Number of trigger nodes.
    #[arg(long, requires = "key")]
    n: Option<usize>,
    /// Trigger edge probability.
    #[arg(long, requires = "key")]
    pg: Option<f64>,
    /// Fraction of ones in the trigger features.
    #[arg(long, requires = "key")]
    pr: Option<f64>,
}

impl OptionalTriggerSpec {
    fn get(&self) -> Option<(&str, TriggerParams)> {
        match (&self.key, self.n, self.pg, self.pr) {
            (Some(key), Some(n), Some(p_g), Some(p_r)) => {
                Some((key.as_str(), TriggerParams { n, p_g, p_r }))
            }
            _ => None,
        }
    }
}

#[derive(Args)]
struct GenerateTriggerArgs {
    #[command(flatten)]
    trigger: TriggerSpec,
    /// Dataset whose feature dimension and class count the trigger
    /// must match; alternative to --feature-dim/--num-classes.
    #[arg(long, conflicts_with_all = ["feature_dim", "num_classes"])]
    dataset: Option<String>,
    #[arg(long, required_unless_present = "dataset")]
    feature_dim: Option<usize>,
    #[arg(long, required_unless_present = "dataset")]
    num_classes: Option<usize>,
    /// Where to write the trigger graph (GRAPH1 JSON); the watermark
    /// sidecar goes next to it with a .watermark.json suffix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset name ("cora", "pubmed") or GRAPH1 JSON path.
    #[arg(long)]
    dataset: String,
    #[command(flatten)]
    trigger: OptionalTriggerSpec,
    /// Train without a watermark (baseline model).
    #[arg(long, conflicts_with = "key")]
    no_watermark: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Relative weight of the trigger batch loss.
    #[arg(long)]
    trigger_weight: Option<f64>,
    /// Where to write the checkpoint.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the history CSV (default: checkpoint path with a
    /// .history.csv suffix).
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    trigger: TriggerSpec,
    /// False-positive budget for the ownership decision.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args)]
struct AttackArgs {
    #[command(subcommand)]
    kind: AttackKind,
}

#[derive(Subcommand)]
enum AttackKind {
    /// Zero out the smallest-magnitude fraction of the weights.
    Prune(PruneArgs),
    /// Continue training on train data plus part of the test set,
    /// without the trigger.
    Finetune(FinetuneArgs),
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Fraction of weight entries to zero.
    #[arg(long)]
    rate: f64,
    /// Where to write the pruned checkpoint.
    #[arg(long)]
    out: PathBuf,
    /// Trigger parameters to re-verify against after the attack.
    #[command(flatten)]
    reverify: OptionalTriggerSpec,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args)]
struct FinetuneArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Dataset the adversary fine-tunes on.
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    epochs: usize,
    /// Fraction of the test split the adversary has labels for.
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    /// Seed for the adversary's randomness (default: the checkpoint's
    /// training seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the fine-tuned checkpoint.
    #[arg(long)]
    out: PathBuf,
    /// Trigger parameters to re-verify against after the attack.
    #[command(flatten)]
    reverify: OptionalTriggerSpec,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV reports.
    #[arg(long)]
    out: PathBuf,
}

const EXIT_NOT_VERIFIED: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; only real usage
            // errors map to the error exit code.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenerateTrigger(args) => cmd_generate_trigger(args),
        Command::Train(args) => cmd_train(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Attack(args) => match args.kind {
            AttackKind::Prune(args) => cmd_prune(args),
            AttackKind::Finetune(args) => cmd_finetune(args),
        },
        Command::Report(args) => cmd_report(args),
    }
}

/// Watermark sidecar written next to a generated trigger graph.
#[derive(Serialize)]
struct WatermarkSidecar {
    key_fingerprint: String,
    n: usize,
    p_g: f64,
    p_r: f64,
    watermark: Vec<usize>,
}

fn cmd_generate_trigger(args: GenerateTriggerArgs) -> Result<ExitCode> {
    let (d, c) = match &args.dataset {
        Some(name) => {
            let g = load_named(name)?;
            (g.feature_dim(), g.num_classes())
        }
        // clap guarantees both are present when --dataset is absent.
        None => (args.feature_dim.unwrap(), args.num_classes.unwrap()),
    };
    let spec = &args.trigger;
    let t = make_trigger(spec.key.as_bytes(), spec.n, spec.pg, spec.pr, d, c)?;
    save_graph(&args.out, &t.graph)?;
    let sidecar = WatermarkSidecar {
        key_fingerprint: format!("{:016x}", t.key_fingerprint),
        n: t.n,
        p_g: t.p_g,
        p_r: t.p_r,
        watermark: t.watermark.clone(),
    };
    let sidecar_path = sidecar_path(&args.out);
    let mut text = serde_json::to_string_pretty(&sidecar).map_err(gnnwm::Error::from)?;
    text.push('\n');
    std::fs::write(&sidecar_path, text)?;
    println!("trigger graph: {}", args.out.display());
    println!("watermark sidecar: {}", sidecar_path.display());
    println!("key fingerprint: {:016x}", t.key_fingerprint);
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("watermark.json")
}

/// The node split every command derives from a seed, so a checkpoint's
/// seed pins its train/val/test partition.
fn split_for(g: &AttributedGraph, seed: u64) -> Result<NodeSplit> {
    let mut stream = RandomStream::new(derive_seed(&seed.to_le_bytes(), "split")?);
    split_nodes(g.num_nodes(), 0.4, 0.2, &mut stream)
}

fn write_history(path: &Path, history: &[EpochStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epoch", "train_loss", "val_accuracy", "trigger_accuracy"])?;
    for e in history {
        w.write_record([
            e.epoch.to_string(),
            e.train_loss.to_string(),
            e.val_accuracy.to_string(),
            e.trigger_accuracy.map_or_else(String::new, |a| a.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<ExitCode> {
    if !args.no_watermark && args.trigger.get().is_none() {
        return Err(gnnwm::Error::input(
            "either give --key/--n/--pg/--pr to embed a watermark or pass --no-watermark",
        ));
    }
    let g = load_named(&args.dataset)?;
    let split = split_for(&g, args.seed)?;
    let mut cfg = TrainConfig {
        seed: args.seed,
        ..TrainConfig::default()
    };
    if let Some(epochs) = args.epochs {
        cfg.epochs = epochs;
    }
    if let Some(patience) = args.patience {
        cfg.early_stop_patience = patience;
    }
    if let Some(lr) = args.learning_rate {
        cfg.learning_rate = lr;
    }
    if let Some(weight) = args.trigger_weight {
        cfg.trigger_weight = weight;
    }

    let (model, history) = match args.trigger.get() {
        Some((key, params)) => {
            let (model, _trigger, history) =
                embed(&g, &split, key.as_bytes(), params, &cfg)?;
            (model, history)
        }
        None => {
            let model = SageModel::init(g.feature_dim(), HIDDEN_WIDTH, g.num_classes(), cfg.seed)?;
            train(model, &g, &split, None, &cfg)?
        }
    };

    let epoch = history.len();
    save_checkpoint(&args.out, &model, &cfg, epoch)?;
    let history_path = args
        .history
        .unwrap_or_else(|| args.out.with_extension("history.csv"));
    write_history(&history_path, &history)?;
    println!("checkpoint: {}", args.out.display());
    println!("history: {}", history_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let report = verify(
        &ckpt.model,
        args.trigger.key.as_bytes(),
        args.trigger.params(),
        ckpt.model.input_dim(),
        ckpt.model.num_classes(),
        args.alpha,
    )?;
    let mut text = serde_json::to_string_pretty(&report).map_err(gnnwm::Error::from)?;
    text.push('\n');
    print!("{text}");
    Ok(if report.decision {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_VERIFIED)
    })
}

/// Re-verify an attacked model when trigger parameters were given,
/// mapping the decision onto the exit code.
fn reverify(m: &SageModel, spec: &OptionalTriggerSpec, alpha: f64) -> Result<ExitCode> {
    let Some((key, params)) = spec.get() else {
        return Ok(ExitCode::SUCCESS);
    };
    let report = verify(
        m,
        key.as_bytes(),
        params,
        m.input_dim(),
        m.num_classes(),
        alpha,
    )?;
    let mut text = serde_json::to_string_pretty(&report).map_err(gnnwm::Error::from)?;
    text.push('\n');
    print!("{text}");
    Ok(if report.decision {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_VERIFIED)
    })
}

fn cmd_prune(args: PruneArgs) -> Result<ExitCode> {
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let pruned = attacks::prune(&ckpt.model, args.rate)?;
    save_checkpoint(&args.out, &pruned, &ckpt.config, ckpt.epoch)?;
    println!("pruned checkpoint: {}", args.out.display());
    reverify(&pruned, &args.reverify, args.alpha)
}

fn cmd_finetune(args: FinetuneArgs) -> Result<ExitCode> {
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let g = load_named(&args.dataset)?;
    let split = split_for(&g, ckpt.config.seed)?;
    let mut cfg = ckpt.config.clone();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let tuned = attacks::finetune(
        &ckpt.model,
        &g,
        &split,
        args.epochs,
        args.test_fraction,
        &cfg,
    )?;
    save_checkpoint(&args.out, &tuned, &cfg, ckpt.epoch)?;
    println!("fine-tuned checkpoint: {}", args.out.display());
    reverify(&tuned, &args.reverify, args.alpha)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let outcome = run_report(&cfg, &args.out)?;
    for file in &outcome.files {
        println!("{}", file.display());
    }
    if outcome.failed_runs > 0 {
        eprintln!("{} runs failed; see errors.csv", outcome.failed_runs);
    }
    Ok(ExitCode::SUCCESS)
}
