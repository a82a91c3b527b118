use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 0.1, epochs: 500 }
    }
}

/// Logistic regression over standardized features.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearScorer {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub mean: Vec<f64>,
    /// Per-feature standard deviation; constant features get 1.
    pub scale: Vec<f64>,
    pub config: TrainConfig,
    /// Mean training loss before each epoch and after the last.
    pub losses: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-log σ(z)` for positives and `-log(1-σ(z))` for negatives, computed
/// without overflow.
fn logistic_loss(z: f64, y: bool) -> f64 {
    let m = if y { -z } else { z };
    m.max(0.0) + (-m.abs()).exp().ln_1p()
}

impl LinearScorer {
    fn standardize<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
    }

    fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.standardize(x).zip(&self.weights).map(|(v, w)| v * w).sum::<f64>()
    }

    /// Probability that `x` is a link.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::LengthMismatch { features: x.len(), labels: self.weights.len() });
        }
        Ok(sigmoid(self.logit(x)))
    }

    pub fn score_all(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.score(x)).collect()
    }

    fn loss(&self, xs: &[Vec<f64>], ys: &[bool]) -> f64 {
        xs.iter().zip(ys).map(|(x, &y)| logistic_loss(self.logit(x), y)).sum::<f64>() / xs.len() as f64
    }
}

/// Full-batch gradient descent on the mean logistic loss from zero
/// weights. Deterministic.
pub fn train_scorer(features: &[Vec<f64>], labels: &[bool], config: TrainConfig) -> Result<LinearScorer> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { features: features.len(), labels: labels.len() });
    }
    if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(Error::SingleClass);
    }
    let d = features[0].len();
    for (i, x) in features.iter().enumerate() {
        if x.len() != d {
            return Err(Error::LengthMismatch { features: x.len(), labels: d });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    let count = features.len() as f64;
    let mut mean = vec![0.0; d];
    for x in features {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / count;
        }
    }
    let mut scale = vec![0.0; d];
    for x in features {
        for ((s, v), m) in scale.iter_mut().zip(x).zip(&mean) {
            *s += (v - m) * (v - m) / count;
        }
    }
    for s in &mut scale {
        *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
    }
    let mut scorer = LinearScorer {
        weights: vec![0.0; d],
        bias: 0.0,
        mean,
        scale,
        config,
        losses: Vec::with_capacity(config.epochs + 1),
    };
    let z: Vec<Vec<f64>> = features.iter().map(|x| scorer.standardize(x).collect()).collect();
    for _ in 0..config.epochs {
        scorer.losses.push(scorer.loss(features, labels));
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (x, &y) in z.iter().zip(labels) {
            let logit = scorer.bias + x.iter().zip(&scorer.weights).map(|(v, w)| v * w).sum::<f64>();
            let r = sigmoid(logit) - f64::from(u8::from(y));
            gb += r / count;
            for (g, v) in gw.iter_mut().zip(x) {
                *g += r * v / count;
            }
        }
        scorer.bias -= config.learning_rate * gb;
        for (w, g) in scorer.weights.iter_mut().zip(&gw) {
            *w -= config.learning_rate * g;
        }
    }
    scorer.losses.push(scorer.loss(features, labels));
    Ok(scorer)
}
