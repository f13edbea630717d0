use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use crate::corpus::Label;
use crate::error::{Error, Result};

/// SGD settings. The learning rate at update t (counting from 1 across
/// epochs) is `eta0 / t^power_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub l2_lambda: f64,
    pub epochs: usize,
    pub eta0: f64,
    pub power_t: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            l2_lambda: 1e-4,
            epochs: 5,
            eta0: 0.1,
            power_t: 0.5,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("l2_lambda must be >= 0, got {}", self.l2_lambda)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be positive".into()));
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta0 must be positive, got {}", self.eta0)));
        }
        if !(self.power_t >= 0.0 && self.power_t.is_finite()) {
            return Err(Error::InvalidArgument(format!("power_t must be >= 0, got {}", self.power_t)));
        }
        Ok(())
    }

    pub fn rate(&self, t: usize) -> f64 {
        self.eta0 / (t as f64).powf(self.power_t)
    }
}

/// Feature vectors with gold labels over a `dim`-dimensional space whose
/// first `sparse_dim` coordinates are the sparse part.
#[derive(Debug, Clone, Copy)]
pub struct Dataset<'a> {
    pub xs: &'a [FeatureVector],
    pub labels: &'a [Label],
    pub dim: usize,
    pub sparse_dim: usize,
}

impl Dataset<'_> {
    fn y(&self, i: usize) -> f64 {
        sign(self.labels[i])
    }
}

/// Sarcastic is the positive class.
fn sign(l: Label) -> f64 {
    match l {
        Label::Sarcastic => 1.0,
        Label::NotSarcastic => -1.0,
    }
}

fn dot(w: &[f64], x: &FeatureVector, sparse_dim: usize) -> f64 {
    x.entries(sparse_dim).map(|(i, v)| w[i] * v).sum()
}

/// Mean hinge loss plus λ‖w‖². The bias is not regularized.
pub fn hinge_objective(w: &[f64], b: f64, data: &Dataset, lambda: f64) -> f64 {
    let n = data.xs.len() as f64;
    let loss: f64 = data
        .xs
        .iter()
        .enumerate()
        .map(|(i, x)| (1.0 - data.y(i) * (dot(w, x, data.sparse_dim) + b)).max(0.0))
        .sum();
    loss / n + lambda * w.iter().map(|v| v * v).sum::<f64>()
}

/// A subgradient of [`hinge_objective`]: 2λw − mean(y·x) over examples with
/// margin below 1.
pub fn hinge_subgradient(w: &[f64], b: f64, data: &Dataset, lambda: f64) -> (Vec<f64>, f64) {
    let n = data.xs.len() as f64;
    let mut g: Vec<f64> = w.iter().map(|v| 2.0 * lambda * v).collect();
    let mut gb = 0.0;
    for (i, x) in data.xs.iter().enumerate() {
        let y = data.y(i);
        if y * (dot(w, x, data.sparse_dim) + b) < 1.0 {
            for (j, v) in x.entries(data.sparse_dim) {
                g[j] -= y * v / n;
            }
            gb -= y / n;
        }
    }
    (g, gb)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub sparse_dim: usize,
    pub hyperparams: Hyperparams,
}

impl LinearModel {
    pub fn decision(&self, x: &FeatureVector) -> f64 {
        dot(&self.weights, x, self.sparse_dim) + self.bias
    }

    /// Sarcastic iff the decision value is positive.
    pub fn predict(&self, x: &FeatureVector) -> Label {
        if self.decision(x) > 0.0 {
            Label::Sarcastic
        } else {
            Label::NotSarcastic
        }
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn train(data: &Dataset, hp: &Hyperparams) -> Result<LinearModel> {
    train_traced(data, hp).map(|(m, _)| m)
}

/// Trains and also returns the full objective after each epoch.
///
/// Weights are kept as `scale · v` so the L2 shrink is O(1) per update and
/// only the example's nonzero coordinates are touched.
pub fn train_traced(data: &Dataset, hp: &Hyperparams) -> Result<(LinearModel, Vec<f64>)> {
    hp.validate()?;
    if data.xs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if data.xs.len() != data.labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature vectors but {} labels",
            data.xs.len(),
            data.labels.len()
        )));
    }
    if !Label::ALL.iter().all(|l| data.labels.contains(l)) {
        return Err(Error::SingleClass);
    }

    let mut v = vec![0.0; data.dim];
    let mut scale = 1.0;
    let mut b = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut order: Vec<usize> = (0..data.xs.len()).collect();
    let mut trace = Vec::with_capacity(hp.epochs);
    let mut t = 0usize;

    for _ in 0..hp.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = hp.rate(t);
            let x = &data.xs[i];
            let y = data.y(i);
            let margin = y * (scale * dot(&v, x, data.sparse_dim) + b);

            let shrink = 1.0 - 2.0 * eta * hp.l2_lambda;
            if shrink <= 0.0 {
                v.iter_mut().for_each(|c| *c = 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if margin < 1.0 {
                let step = eta * y / scale;
                for (j, xv) in x.entries(data.sparse_dim) {
                    v[j] += step * xv;
                }
                b += eta * y;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|c| *c *= scale);
                scale = 1.0;
            }
        }
        let w: Vec<f64> = v.iter().map(|c| c * scale).collect();
        trace.push(hinge_objective(&w, b, data, hp.l2_lambda));
    }

    let weights = v.iter().map(|c| c * scale).collect();
    Ok((
        LinearModel {
            weights,
            bias: b,
            sparse_dim: data.sparse_dim,
            hyperparams: *hp,
        },
        trace,
    ))
}
