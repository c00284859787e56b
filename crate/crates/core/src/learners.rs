//! Deterministic linear learners.
//!
//! * logistic: weighted binary cross-entropy on `sign(Δ)`. Unit weights give
//!   standard training, `|Δ|` weights give cost-weighted training.
//! * linear: squared error on Δ itself (Δ-regression), classified by sign.
//!
//! Both minimize `Σ wᵢ ℓᵢ + (λ/2)‖w‖²` (bias unpenalized) by full-batch
//! gradient descent from zero. The step is `learning_rate / L`, where `L`
//! bounds the objective's curvature (power iteration on `X̃ᵀWX̃`), and is
//! halved whenever a step would increase the objective. Iteration stops when
//! the gradient's ∞-norm drops below `grad_tol` or after `max_iters` steps.
//! Sums run in example order, so identical inputs give bit-identical models.

use serde::{Deserialize, Serialize};

use crate::cost_model::Label;
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{Predictions, Scores};

const POWER_ITERATIONS: usize = 30;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    Linear,
}

impl ModelKind {
    /// Upper bound of the per-example loss curvature in the linear score.
    fn curvature(self) -> f64 {
        match self {
            ModelKind::Logistic => 0.25,
            ModelKind::Linear => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    kind: ModelKind,
    dim: usize,
    bias: f64,
    weights: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(kind: ModelKind, dim: usize) -> Self {
        LinearModel {
            kind,
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn from_params(kind: ModelKind, params: &[f64]) -> Self {
        let (w, b) = params.split_at(params.len() - 1);
        LinearModel {
            kind,
            weights: w.to_vec(),
            bias: b[0],
        }
    }

    /// `w·x + b`.
    pub fn decision(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: features.len(),
            });
        }
        Ok(dot(&self.weights, features) + self.bias)
    }

    /// Label and continuous score: p̂ = sigmoid(w·x + b) for logistic models,
    /// Δ̂ = w·x + b for linear ones. The label is +1 iff `w·x + b ≥ 0`, which
    /// is p̂ ≥ 0.5 and Δ̂ ≥ 0 respectively.
    pub fn predict(&self, features: &[f64]) -> Result<(Label, f64)> {
        let z = self.decision(features)?;
        let label = if z >= 0.0 { Label::Pos } else { Label::Neg };
        let score = match self.kind {
            ModelKind::Logistic => sigmoid(z),
            ModelKind::Linear => z,
        };
        Ok((label, score))
    }

    pub fn predict_dataset(&self, dataset: &Dataset) -> Result<Predictions> {
        let (labels, scores): (Vec<_>, Vec<_>) = dataset
            .examples()
            .iter()
            .map(|e| self.predict(&e.features))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        let scores = match self.kind {
            ModelKind::Logistic => Scores::Probability(scores),
            ModelKind::Linear => Scores::Delta(scores),
        };
        Predictions::with_scores(labels, scores)
    }

    /// Self-describing text form: `kind`, `dim`, `bias`, `weights`.
    pub fn to_record(&self) -> String {
        let rec = ModelRecord {
            kind: self.kind,
            dim: self.dim(),
            bias: self.bias,
            weights: self.weights.clone(),
        };
        toml::to_string(&rec).expect("model record serializes")
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let rec: ModelRecord =
            toml::from_str(text).map_err(|e| Error::invalid(format!("model record: {e}")))?;
        if rec.weights.len() != rec.dim {
            return Err(Error::DimensionMismatch {
                expected: rec.dim,
                got: rec.weights.len(),
            });
        }
        if !rec.bias.is_finite() || rec.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(LinearModel {
            kind: rec.kind,
            weights: rec.weights,
            bias: rec.bias,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    /// Initial step as a multiple of `1 / L`.
    pub learning_rate: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Rescale example weights to mean 1 before training.
    pub weight_normalization: bool,
    /// Standardize features with training-split statistics (harness only).
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_lambda: 1.0,
            learning_rate: 1.0,
            max_iters: 5000,
            grad_tol: 1e-6,
            weight_normalization: true,
            standardize: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::invalid("l2_lambda must be a non-negative number"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::invalid("grad_tol must be positive"));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Rescales weights to mean 1. Equal weights become exactly 1.
pub fn normalize_weights(weights: &[f64]) -> Vec<f64> {
    let Some(&first) = weights.first() else {
        return Vec::new();
    };
    if first > 0.0 && weights.iter().all(|&w| w == first) {
        return vec![1.0; weights.len()];
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    if mean > 0.0 {
        weights.iter().map(|w| w / mean).collect()
    } else {
        weights.to_vec()
    }
}

/// Objective value and gradient of `model` on `dataset`.
///
/// The gradient has `dim + 1` entries, the bias derivative last. Logistic
/// models use the labels `sign(Δᵢ)` as targets, linear models use Δᵢ.
pub fn loss_and_gradient(
    model: &LinearModel,
    dataset: &Dataset,
    example_weights: &[f64],
    l2_lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    let problem = Problem::new(model.kind, dataset, example_weights, l2_lambda)?;
    if model.dim() != dataset.dim() {
        return Err(Error::DimensionMismatch {
            expected: dataset.dim(),
            got: model.dim(),
        });
    }
    let mut params = model.weights.clone();
    params.push(model.bias);
    let mut grad = vec![0.0; params.len()];
    let f = problem.eval(&params, &mut grad);
    Ok((f, grad))
}

struct Problem<'a> {
    kind: ModelKind,
    dataset: &'a Dataset,
    weights: &'a [f64],
    lambda: f64,
}

impl<'a> Problem<'a> {
    fn new(
        kind: ModelKind,
        dataset: &'a Dataset,
        weights: &'a [f64],
        lambda: f64,
    ) -> Result<Self> {
        if weights.len() != dataset.len() {
            return Err(Error::LengthMismatch {
                expected: dataset.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("example weights must be finite and non-negative"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("l2_lambda must be a non-negative number"));
        }
        Ok(Problem {
            kind,
            dataset,
            weights,
            lambda,
        })
    }

    fn target(&self, delta: f64) -> f64 {
        match self.kind {
            ModelKind::Logistic => Label::as_i8(crate::cost_model::label_of(delta)) as f64,
            ModelKind::Linear => delta,
        }
    }

    /// Objective at `params`; writes the gradient into `grad`.
    fn eval(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = params.len() - 1;
        let (w, b) = (&params[..d], params[d]);
        grad.fill(0.0);
        let mut loss = 0.0;
        for (ex, &c) in self.dataset.examples().iter().zip(self.weights) {
            if c == 0.0 {
                continue;
            }
            let z = dot(w, &ex.features) + b;
            let t = self.target(ex.delta);
            // ∂ℓ/∂z
            let dz = match self.kind {
                ModelKind::Logistic => {
                    let m = t * z;
                    loss += c * softplus(-m);
                    -t * sigmoid(-m)
                }
                ModelKind::Linear => {
                    let r = z - t;
                    loss += c * r * r;
                    2.0 * r
                }
            };
            let s = c * dz;
            for (g, x) in grad[..d].iter_mut().zip(&ex.features) {
                *g += s * x;
            }
            grad[d] += s;
        }
        let mut penalty = 0.0;
        for (g, wj) in grad[..d].iter_mut().zip(w) {
            *g += self.lambda * wj;
            penalty += wj * wj;
        }
        loss + self.lambda / 2.0 * penalty
    }

    /// Largest eigenvalue of `X̃ᵀWX̃` (X̃ = [X, 1]) by power iteration.
    fn gram_spectral_radius(&self) -> f64 {
        let d = self.dataset.dim();
        let mut v = vec![1.0 / ((d + 1) as f64).sqrt(); d + 1];
        let mut next = vec![0.0; d + 1];
        let mut estimate = 0.0;
        for _ in 0..POWER_ITERATIONS {
            next.fill(0.0);
            for (ex, &c) in self.dataset.examples().iter().zip(self.weights) {
                if c == 0.0 {
                    continue;
                }
                let z = dot(&v[..d], &ex.features) + v[d];
                let s = c * z;
                for (n, x) in next[..d].iter_mut().zip(&ex.features) {
                    *n += s * x;
                }
                next[d] += s;
            }
            let norm = dot(&next, &next).sqrt();
            estimate = dot(&v, &next);
            if norm == 0.0 {
                break;
            }
            for (vj, nj) in v.iter_mut().zip(&next) {
                *vj = nj / norm;
            }
        }
        estimate
    }

    fn minimize(&self, cfg: &TrainConfig) -> Vec<f64> {
        let d = self.dataset.dim();
        let lipschitz = self.kind.curvature() * self.gram_spectral_radius() + self.lambda;
        let mut step = if lipschitz > 0.0 {
            cfg.learning_rate / lipschitz
        } else {
            cfg.learning_rate
        };

        let mut params = vec![0.0; d + 1];
        let mut grad = vec![0.0; d + 1];
        let mut f = self.eval(&params, &mut grad);
        let mut cand = vec![0.0; d + 1];
        let mut cand_grad = vec![0.0; d + 1];

        'outer: for _ in 0..cfg.max_iters {
            let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if gmax < cfg.grad_tol {
                break;
            }
            let mut halvings = 0;
            loop {
                for ((c, p), g) in cand.iter_mut().zip(&params).zip(&grad) {
                    *c = p - step * g;
                }
                let fc = self.eval(&cand, &mut cand_grad);
                if fc <= f {
                    std::mem::swap(&mut params, &mut cand);
                    std::mem::swap(&mut grad, &mut cand_grad);
                    f = fc;
                    break;
                }
                step *= 0.5;
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    // no descent possible at machine precision
                    break 'outer;
                }
            }
        }
        params
    }
}

fn check_features(dataset: &Dataset) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let finite = dataset
        .examples()
        .iter()
        .all(|e| e.delta.is_finite() && e.features.iter().all(|x| x.is_finite()));
    if finite {
        Ok(())
    } else {
        Err(Error::NonFinite("training data"))
    }
}

/// Weighted logistic regression on `sign(Δ)`.
pub fn fit_logistic(
    dataset: &Dataset,
    example_weights: &[f64],
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    cfg.validate()?;
    check_features(dataset)?;
    let weights = if cfg.weight_normalization {
        normalize_weights(example_weights)
    } else {
        example_weights.to_vec()
    };
    let problem = Problem::new(ModelKind::Logistic, dataset, &weights, cfg.l2_lambda)?;
    for label in [Label::Neg, Label::Pos] {
        let present = dataset
            .examples()
            .iter()
            .zip(&weights)
            .any(|(e, &w)| w > 0.0 && e.label() == label);
        if !present {
            return Err(Error::SingleClass(label));
        }
    }
    let params = problem.minimize(cfg);
    Ok(LinearModel::from_params(ModelKind::Logistic, &params))
}

/// Least-squares regression of Δ on the features (ridge when λ > 0).
pub fn fit_delta_regression(dataset: &Dataset, cfg: &TrainConfig) -> Result<LinearModel> {
    cfg.validate()?;
    check_features(dataset)?;
    let weights = vec![1.0; dataset.len()];
    let problem = Problem::new(ModelKind::Linear, dataset, &weights, cfg.l2_lambda)?;
    let params = problem.minimize(cfg);
    Ok(LinearModel::from_params(ModelKind::Linear, &params))
}

/// Per-feature affine map to mean 0 and variance 1, fitted on one dataset
/// and applied to others. Constant features are only centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = dataset.dim();
        let n = dataset.len() as f64;
        let mut means = vec![0.0; d];
        for ex in dataset.examples() {
            for (m, x) in means.iter_mut().zip(&ex.features) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for ex in dataset.examples() {
            for ((v, x), m) in vars.iter_mut().zip(&ex.features).zip(&means) {
                *v += (x - m) * (x - m);
            }
        }
        let scales = vars
            .into_iter()
            .map(|v| {
                let sd = (v / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { means, scales })
    }

    pub fn transform(&self, dataset: &Dataset) -> Result<Dataset> {
        if dataset.dim() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: dataset.dim(),
            });
        }
        Ok(dataset.map_features(|x| {
            x.iter()
                .zip(&self.means)
                .zip(&self.scales)
                .map(|((x, m), s)| (x - m) / s)
                .collect()
        }))
    }
}
