use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    /// Half-cosine from the initial rate down to zero at the last epoch.
    #[default]
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub schedule: Schedule,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            learning_rate: 3e-4,
            weight_decay: 5e-5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            schedule: Schedule::Cosine,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("optim.learning_rate", self.learning_rate, self.learning_rate >= 0.0),
            ("optim.weight_decay", self.weight_decay, self.weight_decay >= 0.0),
            ("optim.beta1", self.beta1, self.beta1 > 0.0 && self.beta1 < 1.0),
            ("optim.beta2", self.beta2, self.beta2 > 0.0 && self.beta2 < 1.0),
            ("optim.epsilon", self.epsilon, self.epsilon > 0.0),
        ];
        match checks.iter().find(|c| !c.2) {
            Some(&(what, value, _)) => Err(Error::OutOfRange {
                what,
                value,
                range: "its valid domain",
            }),
            None => Ok(()),
        }
    }

    /// Learning rate for a 0-based `epoch` of `total` epochs.
    pub fn lr_at(&self, epoch: usize, total: usize) -> f64 {
        match self.schedule {
            Schedule::Constant => self.learning_rate,
            Schedule::Cosine if total <= 1 => self.learning_rate,
            Schedule::Cosine => {
                let t = epoch.min(total - 1) as f64 / (total - 1) as f64;
                0.5 * self.learning_rate * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

/// First and second moment estimates, one entry per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// One AdamW update with decoupled weight decay:
/// `p <- p - lr * (m_hat / (sqrt(v_hat) + eps)) - lr * wd * p`.
///
/// `step` counts from 1 and drives the bias correction.
pub fn adamw_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    cfg: &OptimConfig,
    lr: f64,
    step: u64,
) {
    assert!(step >= 1, "adam steps count from 1");
    assert_eq!(params.len(), grads.len());
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let exp = i32::try_from(step).unwrap_or(i32::MAX);
    let c1 = 1.0 - b1.powi(exp);
    let c2 = 1.0 - b2.powi(exp);
    for (((p, &g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        // Same as p - lr*wd*p - lr*step, grouped so that a zero gradient
        // scales p by exactly (1 - lr*wd).
        *p = *p * (1.0 - lr * cfg.weight_decay) - lr * (m_hat / (v_hat.sqrt() + cfg.epsilon));
    }
}
