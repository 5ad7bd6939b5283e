//! L2-regularized logistic regression trained by mini-batch gradient descent.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Phishing,
    Legitimate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Phishing => "phishing",
            Verdict::Legitimate => "legitimate",
        }
    }

    /// 1 for phishing, 0 for legitimate.
    pub fn label(self) -> u8 {
        u8::from(self == Verdict::Phishing)
    }

    pub fn from_label(label: u8) -> Self {
        if label == 1 { Verdict::Phishing } else { Verdict::Legitimate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability: f64,
    pub verdict: Verdict,
    pub logit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2_penalty: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, l2_penalty: 1e-4, epochs: 30, batch_size: 256, seed: 42 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && self.l2_penalty >= 0.0
            && self.l2_penalty.is_finite()
            && self.epochs > 0
            && self.batch_size > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(String::from(
                "learning_rate must be positive, l2_penalty nonnegative, epochs and batch_size positive",
            )))
        }
    }
}

/// Linear scorer: `logit = w·x + b`, probability `sigmoid(logit)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Training-set feature means; the Shapley baseline.
    pub background_means: Vec<f64>,
    pub threshold: f64,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64, background_means: Vec<f64>) -> Result<Self> {
        if weights.len() != background_means.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), found: background_means.len() });
        }
        Ok(Self { weights, bias, background_means, threshold: 0.5 })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn logit(&self, x: &FeatureVector) -> Result<f64> {
        if x.total_dim != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.total_dim });
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    pub fn prediction_from_logit(&self, logit: f64) -> Prediction {
        let probability = sigmoid(logit);
        let verdict = if probability >= self.threshold { Verdict::Phishing } else { Verdict::Legitimate };
        Prediction { probability, verdict, logit }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

pub fn predict(model: &LinearModel, x: &FeatureVector) -> Result<Prediction> {
    Ok(model.prediction_from_logit(model.logit(x)?))
}

/// Dense counterpart of [`predict`]; sums in index order.
pub fn predict_dense(model: &LinearModel, x: &[f64]) -> Result<Prediction> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: x.len() });
    }
    let logit = x.iter().zip(&model.weights).map(|(x, w)| w * x).sum::<f64>() + model.bias;
    Ok(model.prediction_from_logit(logit))
}

/// Mean negative log-likelihood plus `l2 / 2 · ‖w‖²`.
pub fn logistic_loss(weights: &[f64], bias: f64, features: &[FeatureVector], labels: &[u8], l2: f64) -> f64 {
    let nll: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z = x.dot(weights) + bias;
            softplus(z) - f64::from(y) * z
        })
        .sum();
    nll / features.len() as f64 + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logistic_loss`] with respect to `(weights, bias)`.
pub fn logistic_gradient(
    weights: &[f64],
    bias: f64,
    features: &[FeatureVector],
    labels: &[u8],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = features.len() as f64;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_bias = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let residual = sigmoid(x.dot(weights) + bias) - f64::from(y);
        for &(j, v) in &x.entries {
            grad[j] += residual * v;
        }
        grad_bias += residual;
    }
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (grad, grad_bias / n)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: LinearModel,
    /// Full-data regularized loss after each epoch.
    pub epoch_losses: Vec<f64>,
}

pub fn train(features: &[FeatureVector], labels: &[u8], config: &TrainConfig) -> Result<TrainOutcome> {
    train_pinned(features, labels, config, &[])
}

/// Trains with the weights at `pinned` indices held at zero.
pub fn train_pinned(
    features: &[FeatureVector],
    labels: &[u8],
    config: &TrainConfig,
    pinned: &[usize],
) -> Result<TrainOutcome> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: features.len(), found: labels.len() });
    }
    if features.len() < 2 {
        return Err(Error::TooFewRecords(String::from("training needs at least two examples")));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidConfig(String::from("labels must be 0 or 1")));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::SingleClassData);
    }
    let dim = features[0].total_dim;
    if let Some(bad) = features.iter().find(|x| x.total_dim != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.total_dim });
    }
    let mut trainable = vec![true; dim];
    for &p in pinned {
        if p >= dim {
            return Err(Error::IndexOutOfRange { index: p, len: dim });
        }
        trainable[p] = false;
    }

    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut grad = vec![0.0; dim];
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lr = config.learning_rate;
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let m = batch.len() as f64;
            let mut grad_bias = 0.0;
            for &i in batch {
                let x = &features[i];
                let residual = sigmoid(x.dot(&weights) + bias) - f64::from(labels[i]);
                for &(j, v) in &x.entries {
                    grad[j] += residual * v;
                }
                grad_bias += residual;
            }
            for ((w, g), &t) in weights.iter_mut().zip(grad.iter_mut()).zip(&trainable) {
                if t {
                    *w -= lr * (*g / m + config.l2_penalty * *w);
                }
                *g = 0.0;
            }
            bias -= lr * grad_bias / m;
        }
        let loss = logistic_loss(&weights, bias, features, labels, config.l2_penalty);
        if !loss.is_finite() || !bias.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        epoch_losses.push(loss);
    }

    let mut background_means = vec![0.0; dim];
    for x in features {
        for &(j, v) in &x.entries {
            background_means[j] += v;
        }
    }
    let n = features.len() as f64;
    background_means.iter_mut().for_each(|m| *m /= n);

    Ok(TrainOutcome { model: LinearModel::new(weights, bias, background_means)?, epoch_losses })
}
