//! The training loop: seeded shuffling, minibatches, the appended
//! trigger batch, validation-based early stopping.

use super::{
    adam_step, backward, cross_entropy, forward, predict_labels, AdamState, Neighborhood,
    SageModel, TrainConfig,
};
use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeSplit};
use crate::rng::{derive_seed, RandomStream};
use crate::trigger::TriggerGraph;

/// One epoch of the training history.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Sample-weighted mean cross-entropy over the normal batches.
    pub train_loss: f64,
    /// Full-mode accuracy on the validation nodes.
    pub val_accuracy: f64,
    /// Full-mode accuracy on the trigger, when one is attached.
    pub trigger_accuracy: Option<f64>,
}

/// Fraction of positions where `pred` equals `truth`; 1.0 for empty
/// inputs (vacuously correct).
pub fn accuracy_of(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    if truth.is_empty() {
        return 1.0;
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len() as f64
}

fn gather_labels(g: &AttributedGraph, ids: &[usize]) -> Result<Vec<usize>> {
    ids.iter().map(|&v| g.label_of(v)).collect()
}

/// One pass over `order` (shuffled in place): minibatch SGD with Adam,
/// then — if a trigger is attached — one batch of all trigger nodes
/// against the watermark labels, weighted by `cfg.trigger_weight`.
///
/// Returns the sample-weighted mean loss over the normal batches.
pub(crate) fn run_epoch(
    model: &mut SageModel,
    g: &AttributedGraph,
    order: &mut [usize],
    trigger: Option<&TriggerGraph>,
    cfg: &TrainConfig,
    stream: &mut RandomStream,
    adam: &mut AdamState,
) -> Result<f64> {
    stream.shuffle(order);
    let mut loss_sum = 0.0;
    for chunk in order.chunks(cfg.batch_size) {
        let labels = gather_labels(g, chunk)?;
        let (probs, cache) = forward(
            model,
            g,
            chunk,
            Neighborhood::Sampled {
                k: cfg.sample_size,
                stream,
            },
        )?;
        loss_sum += cross_entropy(&probs, &labels) * chunk.len() as f64;
        let grads = backward(model, &cache, &labels, 1.0)?;
        adam_step(model, &grads, adam, cfg);
    }
    if let Some(t) = trigger {
        let batch: Vec<usize> = (0..t.n).collect();
        let (_, cache) = forward(
            model,
            &t.graph,
            &batch,
            Neighborhood::Sampled {
                k: cfg.sample_size,
                stream,
            },
        )?;
        let grads = backward(model, &cache, &t.watermark, cfg.trigger_weight)?;
        adam_step(model, &grads, adam, cfg);
    }
    if order.is_empty() {
        Ok(0.0)
    } else {
        Ok(loss_sum / order.len() as f64)
    }
}

/// Train a model, optionally embedding a trigger, and return the
/// checkpoint with the best validation accuracy plus the per-epoch
/// history.
///
/// Each epoch shuffles the train nodes with the seeded "train" stream
/// and takes sampled-mode minibatches of `cfg.batch_size`; validation
/// accuracy is measured full-mode. Training stops after
/// `cfg.early_stop_patience` epochs without a new best validation
/// accuracy (ties favor the later epoch's weights), or after
/// `cfg.epochs` epochs. With `epochs = 0` the initial model comes back
/// untouched with an empty history.
pub fn train(
    model: SageModel,
    g: &AttributedGraph,
    split: &NodeSplit,
    trigger: Option<&TriggerGraph>,
    cfg: &TrainConfig,
) -> Result<(SageModel, Vec<EpochStats>)> {
    cfg.validate()?;
    if g.feature_dim() != model.input_dim() {
        return Err(Error::input(format!(
            "graph feature dim {} does not match model input dim {}",
            g.feature_dim(),
            model.input_dim()
        )));
    }
    if g.num_classes() != model.num_classes() {
        return Err(Error::input(format!(
            "graph has {} classes, model has {}",
            g.num_classes(),
            model.num_classes()
        )));
    }
    if g.labels().is_none() {
        return Err(Error::input("training requires a labeled graph"));
    }
    if let Some(t) = trigger {
        if t.graph.feature_dim() != model.input_dim() {
            return Err(Error::input(
                "trigger feature dim does not match the model",
            ));
        }
        if t.watermark.iter().any(|&l| l >= model.num_classes()) {
            return Err(Error::input("watermark label out of the model's range"));
        }
    }
    let val_truth = gather_labels(g, &split.val)?;
    let trigger_ids: Vec<usize> = trigger.map_or_else(Vec::new, |t| (0..t.n).collect());

    let mut model = model;
    let mut stream = RandomStream::new(derive_seed(&cfg.seed.to_le_bytes(), "train")?);
    let mut adam = AdamState::new(&model);
    let mut order = split.train.clone();

    let mut snapshot = model.clone();
    let mut best_acc = f64::NEG_INFINITY;
    let mut patience = 0usize;
    let mut history = Vec::new();

    for epoch in 0..cfg.epochs {
        let train_loss = run_epoch(
            &mut model,
            g,
            &mut order,
            trigger,
            cfg,
            &mut stream,
            &mut adam,
        )?;
        let val_pred = predict_labels(&model, g, &split.val)?;
        let val_accuracy = accuracy_of(&val_pred, &val_truth);
        let trigger_accuracy = match trigger {
            Some(t) => {
                let pred = predict_labels(&model, &t.graph, &trigger_ids)?;
                Some(accuracy_of(&pred, &t.watermark))
            }
            None => None,
        };
        history.push(EpochStats {
            epoch,
            train_loss,
            val_accuracy,
            trigger_accuracy,
        });

        if val_accuracy >= best_acc {
            snapshot = model.clone();
        }
        if val_accuracy > best_acc {
            patience = 0;
        } else {
            patience += 1;
        }
        best_acc = best_acc.max(val_accuracy);
        if cfg.early_stop_patience > 0 && patience >= cfg.early_stop_patience {
            break;
        }
    }
    Ok((snapshot, history))
}
