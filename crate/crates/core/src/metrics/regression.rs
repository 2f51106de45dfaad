use crate::attention::AttentionMap;
use crate::error::{Error, Result};
use crate::toytrain::loss::{mse, smooth_l1};

/// Mean over samples of the mean squared error of the two command components.
pub fn command_mse(pred: &[[f64; 2]], target: &[[f64; 2]]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch {
            expected: vec![target.len(), 2],
            actual: vec![pred.len(), 2],
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| ((p[0] - t[0]).powi(2) + (p[1] - t[1]).powi(2)) / 2.0)
        .sum();
    Ok(sum / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MapError {
    pub smooth_l1: f64,
    pub mse: f64,
}

/// Per-pixel error between a predicted and a reference attention map.
pub fn attention_error(pred: &AttentionMap, reference: &AttentionMap, beta: f64) -> Result<MapError> {
    reference.geometry().ensure_same(pred.geometry())?;
    Ok(MapError {
        smooth_l1: smooth_l1(&pred.values, &reference.values, beta)?,
        mse: mse(&pred.values, &reference.values)?,
    })
}
