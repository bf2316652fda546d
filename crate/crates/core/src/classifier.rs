//! Multinomial logistic regression over name features.
//!
//! Training minimizes the mean (optionally class-weighted) cross-entropy
//! plus an L2 penalty on the weights; biases are not penalized. Prediction
//! returns the full softmax distribution ranked by confidence, and a
//! decided label that falls back to [`EthnicityLabel::Oth`] unless the top
//! class is strictly more likely than 1/3.

use crate::corpus::LabeledName;
use crate::features::{vectorize, FeatureConfig, FeatureVector, Vocabulary};
use crate::names::{normalize, FullName, NameError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Confidence the top class must strictly exceed to be kept.
pub const DECISION_THRESHOLD: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EthnicityLabel {
    #[serde(rename = "ENG")]
    Eng,
    #[serde(rename = "GER")]
    Ger,
    #[serde(rename = "FRN")]
    Frn,
    #[serde(rename = "SPA")]
    Spa,
    #[serde(rename = "RUS")]
    Rus,
    #[serde(rename = "ITA")]
    Ita,
    #[serde(rename = "IND")]
    Ind,
    #[serde(rename = "CHI")]
    Chi,
    #[serde(rename = "JAP")]
    Jap,
    #[serde(rename = "KOR")]
    Kor,
    #[serde(rename = "VIE")]
    Vie,
    #[serde(rename = "ARA")]
    Ara,
    #[serde(rename = "OTH")]
    Oth,
}

impl EthnicityLabel {
    /// The twelve trainable classes in their canonical order.
    pub const CLASSES: [EthnicityLabel; 12] = [
        EthnicityLabel::Eng,
        EthnicityLabel::Ger,
        EthnicityLabel::Frn,
        EthnicityLabel::Spa,
        EthnicityLabel::Rus,
        EthnicityLabel::Ita,
        EthnicityLabel::Ind,
        EthnicityLabel::Chi,
        EthnicityLabel::Jap,
        EthnicityLabel::Kor,
        EthnicityLabel::Vie,
        EthnicityLabel::Ara,
    ];

    /// The classes plus OTH, used by every corpus-level report.
    pub const ALL: [EthnicityLabel; 13] = [
        EthnicityLabel::Eng,
        EthnicityLabel::Ger,
        EthnicityLabel::Frn,
        EthnicityLabel::Spa,
        EthnicityLabel::Rus,
        EthnicityLabel::Ita,
        EthnicityLabel::Ind,
        EthnicityLabel::Chi,
        EthnicityLabel::Jap,
        EthnicityLabel::Kor,
        EthnicityLabel::Vie,
        EthnicityLabel::Ara,
        EthnicityLabel::Oth,
    ];

    pub fn code(self) -> &'static str {
        match self {
            EthnicityLabel::Eng => "ENG",
            EthnicityLabel::Ger => "GER",
            EthnicityLabel::Frn => "FRN",
            EthnicityLabel::Spa => "SPA",
            EthnicityLabel::Rus => "RUS",
            EthnicityLabel::Ita => "ITA",
            EthnicityLabel::Ind => "IND",
            EthnicityLabel::Chi => "CHI",
            EthnicityLabel::Jap => "JAP",
            EthnicityLabel::Kor => "KOR",
            EthnicityLabel::Vie => "VIE",
            EthnicityLabel::Ara => "ARA",
            EthnicityLabel::Oth => "OTH",
        }
    }

    /// Position in [`EthnicityLabel::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_class(self) -> bool {
        self != EthnicityLabel::Oth
    }
}

impl fmt::Display for EthnicityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown ethnicity label {0:?}")]
pub struct ParseLabelError(pub String);

impl FromStr for EthnicityLabel {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        EthnicityLabel::ALL
            .into_iter()
            .find(|l| l.code() == up)
            .ok_or_else(|| ParseLabelError(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("label {0} cannot be used for training")]
    UnknownLabel(EthnicityLabel),
    #[error("training data contains a single class ({0}); at least two are required")]
    SingleClass(EthnicityLabel),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Name(#[from] NameError),
    #[error("model I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("model format: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Optimizer {
    /// Full-batch gradient descent with Armijo backtracking.
    FullBatch,
    /// Shuffled mini-batch gradient descent with a fixed step.
    MiniBatch { batch_size: usize, learning_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeighting {
    None,
    /// Each example weighted by N / (classes_present * class_count).
    InverseFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop once the relative loss decrease over an epoch falls below this.
    pub tolerance: f64,
    pub optimizer: Optimizer,
    pub class_weighting: ClassWeighting,
    /// Half-width of the uniform random weight initialization.
    pub init_scale: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            l2: 1e-4,
            max_epochs: 300,
            tolerance: 1e-7,
            optimizer: Optimizer::FullBatch,
            class_weighting: ClassWeighting::None,
            init_scale: 1e-3,
        }
    }
}

impl Hyperparameters {
    fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidHyperparameter(m.to_string()));
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be a finite non-negative number");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be positive");
        }
        if !(self.tolerance >= 0.0) {
            return bad("tolerance must be non-negative");
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return bad("init_scale must be finite and non-negative");
        }
        if let Optimizer::MiniBatch {
            batch_size,
            learning_rate,
        } = self.optimizer
        {
            if batch_size == 0 {
                return bad("batch_size must be positive");
            }
            if !(learning_rate > 0.0 && learning_rate.is_finite()) {
                return bad("learning_rate must be positive");
            }
        }
        Ok(())
    }
}

/// Regularized softmax cross-entropy over sparse inputs.
///
/// Parameters are one flat vector: the weight matrix stored feature-major
/// (`w[j * classes + c]`) followed by the `classes` biases.
pub struct SoftmaxObjective<'a> {
    pub inputs: &'a [FeatureVector],
    pub targets: &'a [usize],
    /// Per-example weights; `None` means all ones.
    pub example_weights: Option<&'a [f64]>,
    pub classes: usize,
    pub features: usize,
    pub l2: f64,
}

/// Numerically stable softmax in place; returns log-sum-exp.
pub fn softmax_in_place(scores: &mut [f64]) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
    max + sum.ln()
}

impl SoftmaxObjective<'_> {
    pub fn n_params(&self) -> usize {
        self.features * self.classes + self.classes
    }

    fn scores(&self, params: &[f64], x: &FeatureVector, out: &mut [f64]) {
        let k = self.classes;
        out.copy_from_slice(&params[self.features * k..]);
        for &(j, v) in x.entries() {
            let row = &params[j * k..(j + 1) * k];
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        }
    }

    fn total_weight(&self) -> f64 {
        match self.example_weights {
            Some(w) => w.iter().sum(),
            None => self.inputs.len() as f64,
        }
    }

    fn penalty(&self, params: &[f64]) -> f64 {
        let w = &params[..self.features * self.classes];
        0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        self.loss_over(params, 0..self.inputs.len())
    }

    fn loss_over(&self, params: &[f64], idx: impl Iterator<Item = usize>) -> f64 {
        let mut scores = vec![0.0; self.classes];
        let mut total = 0.0;
        for i in idx {
            self.scores(params, &self.inputs[i], &mut scores);
            let target = scores[self.targets[i]];
            let lse = softmax_in_place(&mut scores);
            let w = self.example_weights.map_or(1.0, |ew| ew[i]);
            total += w * (lse - target);
        }
        total / self.total_weight() + self.penalty(params)
    }

    pub fn loss_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let idx: Vec<usize> = (0..self.inputs.len()).collect();
        self.batch_loss_and_gradient(params, &idx)
    }

    /// Loss and gradient over a subset of examples, normalized by the
    /// subset's weight.
    fn batch_loss_and_gradient(&self, params: &[f64], idx: &[usize]) -> (f64, Vec<f64>) {
        let k = self.classes;
        let mut grad = vec![0.0; self.n_params()];
        let mut probs = vec![0.0; k];
        let mut total = 0.0;
        let mut weight_sum = 0.0;
        for &i in idx {
            let x = &self.inputs[i];
            self.scores(params, x, &mut probs);
            let target = self.targets[i];
            let target_score = probs[target];
            let lse = softmax_in_place(&mut probs);
            let w = self.example_weights.map_or(1.0, |ew| ew[i]);
            total += w * (lse - target_score);
            weight_sum += w;
            probs[target] -= 1.0;
            for p in probs.iter_mut() {
                *p *= w;
            }
            for &(j, v) in x.entries() {
                for (g, p) in grad[j * k..(j + 1) * k].iter_mut().zip(&probs) {
                    *g += p * v;
                }
            }
            for (g, p) in grad[self.features * k..].iter_mut().zip(&probs) {
                *g += p;
            }
        }
        let scale = if weight_sum > 0.0 { 1.0 / weight_sum } else { 0.0 };
        for g in grad.iter_mut() {
            *g *= scale;
        }
        for (g, w) in grad.iter_mut().zip(&params[..self.features * k]) {
            *g += self.l2 * w;
        }
        (total * scale + self.penalty(params), grad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub hyperparameters: Hyperparameters,
    pub examples: usize,
    pub epochs: usize,
    pub final_loss: f64,
    pub converged: bool,
}

/// Outcome of the optimizer.
#[derive(Debug, Clone)]
pub struct Fit {
    pub params: Vec<f64>,
    /// Loss before the first epoch followed by the loss after each epoch.
    pub loss_history: Vec<f64>,
    pub converged: bool,
}

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes `objective` starting from a seeded random point.
pub fn optimize(objective: &SoftmaxObjective<'_>, hyper: &Hyperparameters, seed: u64) -> Fit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = (0..objective.n_params())
        .map(|_| {
            if hyper.init_scale > 0.0 {
                rng.random_range(-hyper.init_scale..=hyper.init_scale)
            } else {
                0.0
            }
        })
        .collect();
    match hyper.optimizer {
        Optimizer::FullBatch => full_batch(objective, hyper, params),
        Optimizer::MiniBatch {
            batch_size,
            learning_rate,
        } => {
            let mut order: Vec<usize> = (0..objective.inputs.len()).collect();
            let mut history = vec![objective.loss(&params)];
            let mut converged = false;
            for _ in 0..hyper.max_epochs {
                order.shuffle(&mut rng);
                for batch in order.chunks(batch_size) {
                    let (_, g) = objective.batch_loss_and_gradient(&params, batch);
                    for (p, g) in params.iter_mut().zip(&g) {
                        *p -= learning_rate * g;
                    }
                }
                let loss = objective.loss(&params);
                let prev = *history.last().unwrap();
                history.push(loss);
                if (prev - loss).abs() <= hyper.tolerance * prev.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            Fit {
                params,
                loss_history: history,
                converged,
            }
        }
    }
}

fn full_batch(objective: &SoftmaxObjective<'_>, hyper: &Hyperparameters, mut params: Vec<f64>) -> Fit {
    let (mut loss, mut grad) = objective.loss_and_gradient(&params);
    let mut history = vec![loss];
    let mut step = 1.0;
    let mut converged = false;
    let mut trial = vec![0.0; params.len()];
    for _ in 0..hyper.max_epochs {
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 == 0.0 {
            converged = true;
            break;
        }
        // Let the step grow back after easy epochs.
        step *= 2.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for ((t, p), g) in trial.iter_mut().zip(&params).zip(&grad) {
                *t = p - step * g;
            }
            let trial_loss = objective.loss(&trial);
            if trial_loss <= loss - ARMIJO_C * step * g2 {
                accepted = Some(trial_loss);
                break;
            }
            step *= 0.5;
        }
        let Some(new_loss) = accepted else {
            // No descent possible at machine precision.
            converged = true;
            break;
        };
        std::mem::swap(&mut params, &mut trial);
        let prev = loss;
        (loss, grad) = objective.loss_and_gradient(&params);
        debug_assert!((loss - new_loss).abs() <= 1e-9 * loss.abs().max(1.0));
        history.push(loss);
        if prev - loss <= hyper.tolerance * prev.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Fit {
        params,
        loss_history: history,
        converged,
    }
}

/// A trained classifier: vocabulary, per-class weights and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    feature_config: FeatureConfig,
    vocab: Vocabulary,
    /// Feature-major: `weights[j * 12 + c]`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    metadata: TrainingMetadata,
}

/// Softmax output ranked by confidence plus the thresholded decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub ranked: Vec<(EthnicityLabel, f64)>,
    pub decided: EthnicityLabel,
}

impl Prediction {
    /// Ranks `probabilities` (aligned with `classes`) in non-increasing
    /// order, breaking ties by class order, and applies the decision rule.
    pub fn from_probabilities(classes: &[EthnicityLabel], probabilities: &[f64]) -> Self {
        let mut ranked: Vec<(EthnicityLabel, f64)> =
            classes.iter().copied().zip(probabilities.iter().copied()).collect();
        // Stable sort keeps class order among equal confidences.
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let decided = match ranked.first() {
            Some(&(label, p)) if p > DECISION_THRESHOLD => label,
            _ => EthnicityLabel::Oth,
        };
        Prediction { ranked, decided }
    }

    pub fn top(&self, k: usize) -> &[(EthnicityLabel, f64)] {
        &self.ranked[..k.min(self.ranked.len())]
    }

    /// Most likely class, ignoring the threshold.
    pub fn argmax(&self) -> EthnicityLabel {
        self.ranked[0].0
    }

    pub fn confidence(&self, label: EthnicityLabel) -> f64 {
        self.ranked
            .iter()
            .find(|(l, _)| *l == label)
            .map_or(0.0, |&(_, p)| p)
    }
}

/// Splits `data` after a seeded shuffle; the first `floor(ratio * n)`
/// items train, the rest test.
pub fn split<T: Clone>(data: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), ClassifierError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ClassifierError::InvalidHyperparameter(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    let mut items = data.to_vec();
    items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // The epsilon keeps e.g. 0.7 * 90 (62.999...) from flooring to 62.
    let cut = ((ratio * data.len() as f64) + 1e-9).floor() as usize;
    let test = items.split_off(cut);
    Ok((items, test))
}

fn class_position(label: EthnicityLabel) -> Result<usize, ClassifierError> {
    EthnicityLabel::CLASSES
        .iter()
        .position(|&l| l == label)
        .ok_or(ClassifierError::UnknownLabel(label))
}

/// Trains on `data` with a vocabulary built from `data` itself.
pub fn train(
    data: &[LabeledName],
    feature_config: &FeatureConfig,
    hyper: &Hyperparameters,
    seed: u64,
) -> Result<(Model, Fit), ClassifierError> {
    hyper.validate()?;
    feature_config
        .validate()
        .map_err(|e| ClassifierError::InvalidHyperparameter(e.to_string()))?;
    let Some(first) = data.first() else {
        return Err(ClassifierError::EmptyTrainingSet);
    };
    let targets = data
        .iter()
        .map(|d| class_position(d.label))
        .collect::<Result<Vec<_>, _>>()?;
    if targets.iter().all(|&t| t == targets[0]) {
        return Err(ClassifierError::SingleClass(first.label));
    }

    let vocab = Vocabulary::build(data.iter().map(|d| &d.name), feature_config);
    let inputs: Vec<FeatureVector> = data
        .iter()
        .map(|d| vectorize(&d.name, &vocab, feature_config))
        .collect();
    let weights = match hyper.class_weighting {
        ClassWeighting::None => None,
        ClassWeighting::InverseFrequency => {
            let mut counts = [0usize; 12];
            for &t in &targets {
                counts[t] += 1;
            }
            let present = counts.iter().filter(|&&c| c > 0).count() as f64;
            let n = targets.len() as f64;
            Some(
                targets
                    .iter()
                    .map(|&t| n / (present * counts[t] as f64))
                    .collect::<Vec<f64>>(),
            )
        }
    };
    let objective = SoftmaxObjective {
        inputs: &inputs,
        targets: &targets,
        example_weights: weights.as_deref(),
        classes: EthnicityLabel::CLASSES.len(),
        features: vocab.len(),
        l2: hyper.l2,
    };
    let fit = optimize(&objective, hyper, seed);
    let k = EthnicityLabel::CLASSES.len();
    let split_at = vocab.len() * k;
    let model = Model {
        feature_config: feature_config.clone(),
        weights: fit.params[..split_at].to_vec(),
        bias: fit.params[split_at..].to_vec(),
        vocab,
        metadata: TrainingMetadata {
            seed,
            hyperparameters: hyper.clone(),
            examples: data.len(),
            epochs: fit.loss_history.len() - 1,
            final_loss: *fit.loss_history.last().unwrap(),
            converged: fit.converged,
        },
    };
    Ok((model, fit))
}

/// On-disk model layout (JSON).
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    feature_config: FeatureConfig,
    classes: Vec<EthnicityLabel>,
    vocabulary: Vec<String>,
    /// One row per class, one column per vocabulary entry.
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    training: TrainingMetadata,
}

impl Model {
    pub fn classes(&self) -> &'static [EthnicityLabel] {
        &EthnicityLabel::CLASSES
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.feature_config
    }

    pub fn metadata(&self) -> &TrainingMetadata {
        &self.metadata
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Dense weight vector of one class.
    pub fn class_weights(&self, class: usize) -> Vec<f64> {
        let k = EthnicityLabel::CLASSES.len();
        (0..self.vocab.len()).map(|j| self.weights[j * k + class]).collect()
    }

    /// Class scores `w_c . x + b_c` for a feature vector.
    pub fn scores(&self, x: &FeatureVector) -> Vec<f64> {
        let k = EthnicityLabel::CLASSES.len();
        let mut out = self.bias.clone();
        for &(j, v) in x.entries() {
            for (o, w) in out.iter_mut().zip(&self.weights[j * k..(j + 1) * k]) {
                *o += w * v;
            }
        }
        out
    }

    pub fn predict_vector(&self, x: &FeatureVector) -> Prediction {
        let mut p = self.scores(x);
        softmax_in_place(&mut p);
        Prediction::from_probabilities(&EthnicityLabel::CLASSES, &p)
    }

    pub fn predict(&self, name: &FullName) -> Prediction {
        self.predict_vector(&vectorize(name, &self.vocab, &self.feature_config))
    }

    pub fn predict_str(&self, raw: &str) -> Result<Prediction, NameError> {
        Ok(self.predict(&normalize(raw)?))
    }

    pub fn to_json(&self) -> Result<String, ClassifierError> {
        let k = EthnicityLabel::CLASSES.len();
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            feature_config: self.feature_config.clone(),
            classes: EthnicityLabel::CLASSES.to_vec(),
            vocabulary: self.vocab.features().to_vec(),
            weights: (0..k).map(|c| self.class_weights(c)).collect(),
            bias: self.bias.clone(),
            training: self.metadata.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let file: ModelFile = serde_json::from_str(text)?;
        let invalid = |m: String| Err(ClassifierError::InvalidModel(m));
        if file.format_version != MODEL_FORMAT_VERSION {
            return invalid(format!("unsupported format_version {}", file.format_version));
        }
        if file.classes != EthnicityLabel::CLASSES {
            return invalid("class list must be the twelve classes in canonical order".into());
        }
        let k = file.classes.len();
        let d = file.vocabulary.len();
        if file.weights.len() != k || file.weights.iter().any(|w| w.len() != d) {
            return invalid(format!("weights must be {k} rows of {d} values"));
        }
        if file.bias.len() != k {
            return invalid(format!("bias must have {k} values"));
        }
        file.feature_config
            .validate()
            .map_err(|e| ClassifierError::InvalidModel(e.to_string()))?;
        let vocab = Vocabulary::from_features(file.vocabulary).map_err(ClassifierError::InvalidModel)?;
        let mut weights = vec![0.0; d * k];
        for (c, row) in file.weights.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                weights[j * k + c] = w;
            }
        }
        Ok(Model {
            feature_config: file.feature_config,
            vocab,
            weights,
            bias: file.bias,
            metadata: file.training,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: EthnicityLabel,
    /// Test examples whose true label is this class.
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    /// `confusion[truth][predicted]` over the twelve classes.
    pub confusion: Vec<Vec<usize>>,
    pub examples: usize,
}

impl EvaluationReport {
    /// Scores (truth, predicted) pairs over the twelve classes.
    pub fn from_pairs(pairs: &[(EthnicityLabel, EthnicityLabel)]) -> Result<Self, ClassifierError> {
        if pairs.is_empty() {
            return Err(ClassifierError::EmptyTestSet);
        }
        let k = EthnicityLabel::CLASSES.len();
        let mut confusion = vec![vec![0usize; k]; k];
        for &(truth, pred) in pairs {
            confusion[class_position(truth)?][class_position(pred)?] += 1;
        }
        let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
        let per_class = (0..k)
            .map(|c| {
                let tp = confusion[c][c] as f64;
                let predicted: usize = (0..k).map(|t| confusion[t][c]).sum();
                let support: usize = confusion[c].iter().sum();
                let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
                let recall = if support > 0 { tp / support as f64 } else { 0.0 };
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    label: EthnicityLabel::CLASSES[c],
                    support,
                    precision,
                    recall,
                    f1,
                }
            })
            .collect();
        Ok(EvaluationReport {
            per_class,
            accuracy: correct as f64 / pairs.len() as f64,
            confusion,
            examples: pairs.len(),
        })
    }

    pub fn class(&self, label: EthnicityLabel) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|m| m.label == label)
    }
}

/// Per-class precision/recall/F1 on argmax predictions (the OTH threshold
/// is not applied here).
pub fn evaluate(model: &Model, test: &[LabeledName]) -> Result<EvaluationReport, ClassifierError> {
    let pairs: Vec<_> = test
        .iter()
        .map(|t| (t.label, model.predict(&t.name).argmax()))
        .collect();
    EvaluationReport::from_pairs(&pairs)
}
