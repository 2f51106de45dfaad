use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossConfig {
    /// Where the loss switches from quadratic to linear.
    pub beta: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { beta: 1.0 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::OutOfRange {
                what: "loss.beta",
                value: self.beta,
                range: "(0, inf)",
            });
        }
        Ok(())
    }
}

fn check(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch {
            expected: vec![target.len()],
            actual: vec![pred.len()],
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

#[inline]
pub fn smooth_l1_elem(d: f64, beta: f64) -> f64 {
    if d.abs() < beta {
        0.5 * d * d / beta
    } else {
        d.abs() - 0.5 * beta
    }
}

/// Derivative of [`smooth_l1_elem`] w.r.t. `d`.
#[inline]
pub fn smooth_l1_elem_grad(d: f64, beta: f64) -> f64 {
    if d.abs() < beta {
        d / beta
    } else {
        d.signum()
    }
}

/// Mean smooth-L1 over all elements.
pub fn smooth_l1(pred: &[f64], target: &[f64], beta: f64) -> Result<f64> {
    check(pred, target)?;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| smooth_l1_elem(p - t, beta))
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Loss and its gradient w.r.t. `pred`.
pub fn smooth_l1_with_grad(pred: &[f64], target: &[f64], beta: f64) -> Result<(f64, Vec<f64>)> {
    let loss = smooth_l1(pred, target, beta)?;
    let n = pred.len() as f64;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(p, t)| smooth_l1_elem_grad(p - t, beta) / n)
        .collect();
    Ok((loss, grad))
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let sum: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / pred.len() as f64)
}

pub fn mse_with_grad(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    let loss = mse(pred, target)?;
    let n = pred.len() as f64;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(p, t)| 2.0 * (p - t) / n)
        .collect();
    Ok((loss, grad))
}
