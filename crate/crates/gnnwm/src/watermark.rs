//! Watermark embedding, extraction, and statistical verification.
//!
//! Embedding trains the host model jointly with the keyed trigger.
//! Verification regenerates the trigger from the key, reads the
//! suspect model's predictions on it, and asks: how likely is this
//! much agreement from a model that never saw the trigger? Under the
//! null the suspect predicts uniformly over the C classes, so the
//! match count is Binomial(n, 1/C) and the test is an exact binomial
//! tail test at a configurable false-positive budget.

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeSplit};
use crate::sage::{predict_labels, train, EpochStats, SageModel, TrainConfig, HIDDEN_WIDTH};
use crate::trigger::{make_trigger, TriggerGraph, TriggerParams};
use serde::{Deserialize, Serialize};

/// Default false-positive budget for the ownership decision.
pub const DEFAULT_ALPHA: f64 = 1e-6;

/// Outcome of a verification attempt against one suspect model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// The suspect model's predictions on the regenerated trigger.
    pub extracted_labels: Vec<usize>,
    /// Fraction of trigger nodes predicted as their watermark label.
    pub watermark_accuracy: f64,
    /// Probability that a non-marked model matches at least this well
    /// by chance (exact binomial tail under the uniform null).
    pub p_value: f64,
    /// Smallest accuracy that meets the false-positive budget; above 1
    /// when no accuracy can (the trigger is too short for the budget).
    pub threshold_accuracy: f64,
    /// True iff `watermark_accuracy ≥ threshold_accuracy`.
    pub decision: bool,
    pub false_positive_budget: f64,
}

/// Train a watermarked model: generate the trigger from the key and
/// fit the host task and the watermark jointly.
///
/// The trigger inherits the host graph's feature dimension and class
/// count; the model is the standard two-layer, 128-wide architecture.
/// Returns the trained model, the trigger it memorized, and the
/// per-epoch training history.
pub fn embed(
    g: &AttributedGraph,
    split: &NodeSplit,
    key: &[u8],
    params: TriggerParams,
    cfg: &TrainConfig,
) -> Result<(SageModel, TriggerGraph, Vec<EpochStats>)> {
    let trigger = make_trigger(
        key,
        params.n,
        params.p_g,
        params.p_r,
        g.feature_dim(),
        g.num_classes(),
    )?;
    let model = SageModel::init(
        g.feature_dim(),
        HIDDEN_WIDTH,
        g.num_classes(),
        cfg.seed,
    )?;
    let (trained, history) = train(model, g, split, Some(&trigger), cfg)?;
    Ok((trained, trigger, history))
}

/// Read the model's labels for every trigger node (full-mode,
/// deterministic).
///
/// A dimension mismatch is an error, not a failed verification: it
/// means the suspect cannot be a model of this dataset at all.
pub fn extract(m: &SageModel, t: &TriggerGraph) -> Result<Vec<usize>> {
    if t.graph.feature_dim() != m.input_dim() {
        return Err(Error::ModelMismatch(format!(
            "trigger feature dim {} vs model input dim {}",
            t.graph.feature_dim(),
            m.input_dim()
        )));
    }
    if t.graph.num_classes() != m.num_classes() {
        return Err(Error::ModelMismatch(format!(
            "trigger has {} classes, model has {}",
            t.graph.num_classes(),
            m.num_classes()
        )));
    }
    let batch: Vec<usize> = (0..t.n).collect();
    predict_labels(m, &t.graph, &batch)
}

/// Fraction of positions where the extracted sequence matches the
/// expected watermark.
pub fn watermark_accuracy(extracted: &[usize], expected: &[usize]) -> Result<f64> {
    if extracted.len() != expected.len() {
        return Err(Error::input(format!(
            "extracted length {} vs expected {}",
            extracted.len(),
            expected.len()
        )));
    }
    if expected.is_empty() {
        return Err(Error::input("empty watermark"));
    }
    let matches = extracted
        .iter()
        .zip(expected)
        .filter(|(a, b)| a == b)
        .count();
    Ok(matches as f64 / expected.len() as f64)
}

/// Exact `P[X ≥ k]` for `X ~ Binomial(n, q)`, summed in log space.
pub fn binomial_tail(n: usize, k: usize, q: f64) -> Result<f64> {
    if k > n {
        return Err(Error::input(format!("k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::input(format!("q = {q} must lie in [0, 1]")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(1.0);
    }
    // ln i! for i = 0..=n
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let (ln_q, ln_1q) = (q.ln(), (1.0 - q).ln());
    let mut total = 0.0;
    for i in k..=n {
        let ln_term = ln_fact[n] - ln_fact[i] - ln_fact[n - i]
            + i as f64 * ln_q
            + (n - i) as f64 * ln_1q;
        total += ln_term.exp();
    }
    Ok(total.min(1.0))
}

/// Smallest match count `k*` whose tail probability under the uniform
/// `1/c` null is within `alpha`, returned with the corresponding
/// accuracy threshold `k*/n`.
///
/// If even `k* = n` exceeds the budget the trigger is too short to be
/// verifiable at this `alpha`; the sentinel `(n+1, (n+1)/n)` comes
/// back, which no accuracy can reach.
pub fn decision_threshold(n: usize, c: usize, alpha: f64) -> Result<(usize, f64)> {
    if n == 0 {
        return Err(Error::input("decision threshold needs n ≥ 1"));
    }
    if c < 2 {
        return Err(Error::input("decision threshold needs c ≥ 2"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input(format!(
            "alpha = {alpha} must lie strictly between 0 and 1"
        )));
    }
    let q = 1.0 / c as f64;
    for k in 0..=n {
        if binomial_tail(n, k, q)? <= alpha {
            return Ok((k, k as f64 / n as f64));
        }
    }
    Ok((n + 1, (n + 1) as f64 / n as f64))
}

/// Full ownership check of a suspect model.
///
/// Regenerates the trigger from `(key, params)` with the dataset's
/// dimensions, extracts the suspect's labels, and scores them against
/// the watermark.
pub fn verify(
    m: &SageModel,
    key: &[u8],
    params: TriggerParams,
    feature_dim: usize,
    num_classes: usize,
    alpha: f64,
) -> Result<VerificationReport> {
    let trigger = make_trigger(
        key,
        params.n,
        params.p_g,
        params.p_r,
        feature_dim,
        num_classes,
    )?;
    let extracted = extract(m, &trigger)?;
    let accuracy = watermark_accuracy(&extracted, &trigger.watermark)?;
    let matches = extracted
        .iter()
        .zip(&trigger.watermark)
        .filter(|(a, b)| a == b)
        .count();
    let p_value = binomial_tail(params.n, matches, 1.0 / num_classes as f64)?;
    let (_k_star, threshold_accuracy) = decision_threshold(params.n, num_classes, alpha)?;
    Ok(VerificationReport {
        extracted_labels: extracted,
        watermark_accuracy: accuracy,
        p_value,
        threshold_accuracy,
        decision: accuracy >= threshold_accuracy,
        false_positive_budget: alpha,
    })
}
