//! Two-stage learning from positive and unlabeled examples.
//!
//! 1. A logistic regression separates labeled positives from unlabeled
//!    examples (unlabeled treated as negative).
//! 2. The label frequency `e = p(o=1 | y=1)` is the mean stage-1 probability
//!    over the labeled positives.
//! 3. Every unlabeled example is duplicated: a positive copy weighted by
//!    `w = [LR(x)/e] / [(1−LR(x))/(1−e)]` (clamped to `[0, 1]`) and a negative
//!    copy weighted `1 − w`. Positives keep weight 1.
//! 4. A weighted linear SVM is trained on the relabeled data, and its
//!    margins are mapped to probabilities with sigmoid calibration on a
//!    held-out share of the examples.

pub mod calibration;
mod model;
pub mod objective;

use log::{debug, info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use calibration::{calibrate, calibrate_weighted, Calibration};
pub use model::{PuModel, MODEL_VERSION};

use crate::error::{Error, Result};
use crate::features::FeatureLayout;
use objective::{dot, sigmoid, Sample};

/// A training example: features plus whether it carries a positive label.
#[derive(Debug, Clone, PartialEq)]
pub struct PuExample {
    pub features: Vec<f64>,
    pub labeled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelabeledExample {
    pub features: Vec<f64>,
    pub target: bool,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// L2 strength for the stage-1 logistic regression.
    pub l2: f64,
    pub epochs: usize,
    /// Initial step for stage 1 (backtracked) and base step for stage 2.
    pub learning_rate: f64,
    pub stage2_l2: f64,
    pub stage2_epochs: usize,
    /// Share of examples held out from stage 2 to fit the calibration.
    pub holdout_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 1e-3,
            epochs: 200,
            learning_rate: 0.1,
            stage2_l2: 1e-3,
            stage2_epochs: 200,
            holdout_fraction: 0.2,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0 && self.stage2_l2 >= 0.0) {
            return Err(Error::Config("l2 must be non-negative".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(Error::Config("holdout_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Probability of a positive label, kept strictly inside (0, 1).
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x)).clamp(1e-15, 1.0 - 1e-15)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSvm {
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

/// A fitted linear model together with its objective value per epoch.
#[derive(Debug, Clone)]
pub struct Fitted<M> {
    pub model: M,
    pub loss_curve: Vec<f64>,
}

/// Full-batch gradient descent on the weighted logistic objective, with an
/// Armijo backtracking step that starts from `learning_rate`.
pub fn fit_logistic(data: &[Sample], dim: usize, l2: f64, epochs: usize, learning_rate: f64) -> Fitted<LogisticModel> {
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut eval = objective::logistic(&w, b, data, l2);
    let mut step = learning_rate;
    let mut curve = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let gnorm2 = dot(&eval.grad_w, &eval.grad_w) + eval.grad_b * eval.grad_b;
        if gnorm2 == 0.0 {
            break;
        }
        let mut accepted = None;
        for _ in 0..60 {
            let cand_w: Vec<f64> = w.iter().zip(&eval.grad_w).map(|(wi, g)| wi - step * g).collect();
            let cand_b = b - step * eval.grad_b;
            let cand = objective::logistic(&cand_w, cand_b, data, l2);
            if cand.value <= eval.value - 0.5 * step * gnorm2 {
                accepted = Some((cand_w, cand_b, cand));
                break;
            }
            step *= 0.5;
        }
        let Some((nw, nb, ne)) = accepted else { break };
        w = nw;
        b = nb;
        eval = ne;
        curve.push(eval.value);
        step *= 2.0;
    }
    Fitted { model: LogisticModel { weights: w, bias: b }, loss_curve: curve }
}

/// Full-batch subgradient descent on the weighted hinge objective with step
/// `learning_rate / sqrt(t + 1)`; returns the best iterate seen.
pub fn fit_hinge(data: &[Sample], dim: usize, l2: f64, epochs: usize, learning_rate: f64) -> Fitted<LinearSvm> {
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut best = (f64::INFINITY, w.clone(), b);
    let mut curve = Vec::with_capacity(epochs + 1);
    for t in 0..=epochs {
        let eval = objective::hinge(&w, b, data, l2);
        curve.push(eval.value);
        if eval.value < best.0 {
            best = (eval.value, w.clone(), b);
        }
        if t == epochs {
            break;
        }
        let eta = learning_rate / ((t + 1) as f64).sqrt();
        for (wi, g) in w.iter_mut().zip(&eval.grad_w) {
            *wi -= eta * g;
        }
        b -= eta * eval.grad_b;
    }
    Fitted { model: LinearSvm { weights: best.1, bias: best.2 }, loss_curve: curve }
}

fn check_dims<'a>(rows: impl Iterator<Item = &'a Vec<f64>>) -> Result<usize> {
    let mut dim = None;
    for r in rows {
        match dim {
            None => dim = Some(r.len()),
            Some(d) if d != r.len() => return Err(Error::DimensionMismatch { expected: d, found: r.len() }),
            _ => {}
        }
    }
    dim.ok_or_else(|| Error::DegenerateTrainingSet("no examples".into()))
}

/// Stage 1: logistic regression of the label flag, unlabeled as negative.
pub fn train_stage1(data: &[PuExample], hyper: &TrainConfig) -> Result<Fitted<LogisticModel>> {
    let dim = check_dims(data.iter().map(|e| &e.features))?;
    let positives = data.iter().filter(|e| e.labeled).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::DegenerateTrainingSet(format!(
            "stage 1 needs labeled and unlabeled examples ({} labeled of {})",
            positives,
            data.len()
        )));
    }
    let samples: Vec<Sample> = data
        .iter()
        .map(|e| Sample { x: &e.features, target: if e.labeled { 1.0 } else { 0.0 }, weight: 1.0 })
        .collect();
    Ok(fit_logistic(&samples, dim, hyper.l2, hyper.epochs, hyper.learning_rate))
}

/// Mean stage-1 probability over labeled positives.
pub fn estimate_e(model: &LogisticModel, positives: &[&PuExample]) -> Result<f64> {
    if positives.is_empty() {
        return Err(Error::EmptyPositiveSet);
    }
    if positives.iter().any(|p| !p.labeled) {
        return Err(Error::InvalidInput("estimate_e expects labeled positives only".into()));
    }
    Ok(mean_probability(positives.iter().map(|p| model.predict_proba(&p.features))))
}

pub(crate) fn mean_probability(probs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = probs.fold((0.0, 0usize), |(s, n), p| (s + p, n + 1));
    sum / n as f64
}

/// Weight of the positive copy of an unlabeled example:
/// `min(1, lr_x(1−e) / (e(1−lr_x)))`. At `e = 1` the weight is `lr_x`.
pub fn unlabeled_weight(lr_x: f64, e: f64) -> f64 {
    if e >= 1.0 {
        return lr_x.clamp(0.0, 1.0);
    }
    if lr_x >= 1.0 {
        return 1.0;
    }
    let raw = (lr_x * (1.0 - e)) / (e * (1.0 - lr_x));
    raw.clamp(0.0, 1.0)
}

/// Positives pass through with weight 1; each unlabeled example becomes a
/// positive copy weighted `w` and a negative copy weighted `1 − w`.
pub fn build_relabeled(data: &[PuExample], model: &LogisticModel, e: f64) -> Vec<RelabeledExample> {
    let mut out = Vec::with_capacity(data.len() * 2);
    for ex in data {
        if ex.labeled {
            out.push(RelabeledExample { features: ex.features.clone(), target: true, weight: 1.0 });
        } else {
            let w = unlabeled_weight(model.predict_proba(&ex.features), e);
            out.push(RelabeledExample { features: ex.features.clone(), target: true, weight: w });
            out.push(RelabeledExample { features: ex.features.clone(), target: false, weight: 1.0 - w });
        }
    }
    out
}

fn has_both_targets(data: &[RelabeledExample]) -> bool {
    let pos: f64 = data.iter().filter(|r| r.target).map(|r| r.weight).sum();
    let neg: f64 = data.iter().filter(|r| !r.target).map(|r| r.weight).sum();
    pos > 0.0 && neg > 0.0
}

/// Stage 2: weighted linear SVM on the relabeled data.
pub fn train_stage2(data: &[RelabeledExample], hyper: &TrainConfig) -> Result<Fitted<LinearSvm>> {
    let dim = check_dims(data.iter().map(|e| &e.features))?;
    if !has_both_targets(data) {
        return Err(Error::DegenerateTrainingSet("stage 2 needs positive total weight on both targets".into()));
    }
    let samples: Vec<Sample> = data
        .iter()
        .map(|r| Sample { x: &r.features, target: if r.target { 1.0 } else { 0.0 }, weight: r.weight })
        .collect();
    Ok(fit_hinge(&samples, dim, hyper.stage2_l2, hyper.stage2_epochs, hyper.learning_rate))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub examples: usize,
    pub positives: usize,
    pub unlabeled: usize,
    pub e: f64,
    pub relabeled: usize,
    pub stage2_train: usize,
    pub calibration_rows: usize,
    /// `holdout` when calibration used held-out examples, `training` when the
    /// holdout was degenerate or gave no usable fit and the stage-2 training
    /// rows were reused.
    pub calibration_source: String,
    pub threshold: f64,
    pub stage1_loss: Vec<f64>,
    pub stage2_loss: Vec<f64>,
}

fn relabel_subset(data: &[PuExample], idx: &[usize], model: &LogisticModel, e: f64) -> Vec<RelabeledExample> {
    let subset: Vec<PuExample> = idx.iter().map(|&i| data[i].clone()).collect();
    build_relabeled(&subset, model, e)
}

/// Run the whole two-stage procedure.
pub fn train_pu(
    layout: FeatureLayout,
    data: &[PuExample],
    hyper: &TrainConfig,
    seed: u64,
) -> Result<(PuModel, TrainReport)> {
    hyper.validate()?;
    layout.validate()?;
    let dim = check_dims(data.iter().map(|e| &e.features))?;
    if dim != layout.total_dim {
        return Err(Error::DimensionMismatch { expected: layout.total_dim, found: dim });
    }

    let stage1 = train_stage1(data, hyper)?;
    let positives: Vec<&PuExample> = data.iter().filter(|e| e.labeled).collect();
    let e = estimate_e(&stage1.model, &positives)?;
    info!("stage 1: {} positives, {} unlabeled, e = {e:.6}", positives.len(), data.len() - positives.len());

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_hold = (hyper.holdout_fraction * data.len() as f64).round() as usize;
    let (hold_idx, train_idx) = order.split_at(n_hold);
    let mut hold_idx = hold_idx.to_vec();
    let mut train_idx = train_idx.to_vec();
    hold_idx.sort_unstable();
    train_idx.sort_unstable();

    let mut train_rows = relabel_subset(data, &train_idx, &stage1.model, e);
    let mut calib_rows = relabel_subset(data, &hold_idx, &stage1.model, e);
    let mut source = "holdout";
    if !has_both_targets(&train_rows) || !has_both_targets(&calib_rows) {
        debug!("calibration holdout degenerate; calibrating on the stage-2 training rows");
        train_rows = build_relabeled(data, &stage1.model, e);
        calib_rows = train_rows.clone();
        source = "training";
    }

    let stage2 = train_stage2(&train_rows, hyper)?;
    let fit = |rows: &[RelabeledExample]| {
        let margins: Vec<f64> = rows.iter().map(|r| stage2.model.margin(&r.features)).collect();
        let labels: Vec<bool> = rows.iter().map(|r| r.target).collect();
        let weights: Vec<f64> = rows.iter().map(|r| r.weight).collect();
        calibrate_weighted(&margins, &labels, &weights)
    };
    let calib = match fit(&calib_rows) {
        Err(Error::Calibration(msg)) if source == "holdout" => {
            warn!("holdout calibration failed ({msg}); calibrating on the stage-2 training rows");
            calib_rows = train_rows.clone();
            source = "training";
            fit(&calib_rows)?
        }
        other => other?,
    };
    info!(
        "stage 2: {} rows, calibration on {} {source} rows, threshold {:.6}",
        train_rows.len(),
        calib_rows.len(),
        calib.threshold()
    );

    let report = TrainReport {
        examples: data.len(),
        positives: positives.len(),
        unlabeled: data.len() - positives.len(),
        e,
        relabeled: positives.len() + 2 * (data.len() - positives.len()),
        stage2_train: train_rows.len(),
        calibration_rows: calib_rows.len(),
        calibration_source: source.to_string(),
        threshold: calib.threshold(),
        stage1_loss: stage1.loss_curve,
        stage2_loss: stage2.loss_curve,
    };
    let model = PuModel::new(layout, stage1.model, e, stage2.model, calib, hyper.clone(), seed);
    Ok((model, report))
}
