use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::annotation::{BoxAnnotation, Detection};
use crate::augment::{brightness, Sample};
use crate::error::{Error, Result};
use crate::metrics::detection::map_coco;
use crate::metrics::report::{condition_label, mean_std, EvalReport, ReportRow};
use crate::toytrain::Dataset;

pub const DEFAULT_FACTORS: [f64; 3] = [0.75, 1.0, 1.85];
pub const DEFAULT_FRACTIONS: [f64; 4] = [0.1, 0.25, 0.5, 1.0];
/// Trailing epochs averaged by [`budget_sweep`].
pub const BUDGET_WINDOW: usize = 50;

fn check_factors(factors: &[f64]) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::Config("at least one brightness factor is required".into()));
    }
    Ok(())
}

/// The evaluation images for each factor, in factor order.
pub fn brightness_eval_sets(samples: &[Sample], factors: &[f64]) -> Result<Vec<Vec<Sample>>> {
    check_factors(factors)?;
    factors
        .par_iter()
        .map(|&f| samples.iter().map(|s| brightness(s, f)).collect())
        .collect()
}

/// mAP@.5:.95 per brightness factor. `predictions(factor)` supplies the
/// detections made on the images brightened by `factor`; every factor
/// without predictions is listed in the resulting error.
pub fn brightness_sweep<F>(gts: &[BoxAnnotation], factors: &[f64], predictions: F) -> Result<EvalReport>
where
    F: Fn(f64) -> Option<Vec<Detection>> + Sync,
{
    check_factors(factors)?;
    for &f in factors {
        if !(0.1..=3.0).contains(&f) {
            return Err(Error::OutOfRange {
                what: "brightness factor",
                value: f,
                range: "[0.1, 3.0]",
            });
        }
    }
    let results: Vec<(String, Option<(f64, usize)>)> = factors
        .par_iter()
        .map(|&f| {
            let dets = predictions(f);
            let scored = dets.map(|d| (map_coco(&d, gts), d.len()));
            (condition_label(f), scored)
        })
        .collect();
    let missing: Vec<String> = results
        .iter()
        .filter(|(_, r)| r.is_none())
        .map(|(c, _)| c.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingConditions(missing));
    }
    let mut counts = std::collections::BTreeMap::new();
    counts.insert("gt".to_string(), gts.len());
    let rows = results
        .into_iter()
        .map(|(condition, r)| {
            let (metric, n) = r.expect("checked");
            counts.insert(format!("detections@{condition}"), n);
            ReportRow {
                condition,
                metric,
                std: None,
            }
        })
        .collect();
    let mut report = EvalReport::new("map_coco", rows)?;
    report.metadata.counts = counts;
    Ok(report)
}

/// Sample indices for every budget fraction: prefixes of one seeded
/// shuffle, so larger budgets contain the smaller ones.
pub fn budget_subsets(n: usize, fractions: &[f64], seed: u64) -> Result<Vec<Vec<usize>>> {
    if fractions.is_empty() {
        return Err(Error::Config("at least one budget fraction is required".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    fractions
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::OutOfRange {
                    what: "budget fraction",
                    value: f,
                    range: "(0, 1]",
                });
            }
            let k = (f * n as f64).floor() as usize;
            if k == 0 {
                return Err(Error::Config(format!(
                    "budget fraction {f} of {n} samples leaves no training data"
                )));
            }
            Ok(order[..k].to_vec())
        })
        .collect()
}

/// Trains once per budget fraction and reports the mean and standard
/// deviation of the per-epoch error over the last `min(50, epochs)` epochs.
///
/// `train_fn(subset, epochs, seed)` returns one held-out error per epoch.
/// Fractions are trained in parallel.
pub fn budget_sweep<F>(
    train_fn: F,
    dataset: &Dataset,
    fractions: &[f64],
    epochs: usize,
    seed: u64,
) -> Result<EvalReport>
where
    F: Fn(&Dataset, usize, u64) -> Result<Vec<f64>> + Sync,
{
    if epochs == 0 {
        return Err(Error::Config("budget sweep needs at least one epoch".into()));
    }
    let subsets = budget_subsets(dataset.len(), fractions, seed)?;
    let rows: Vec<(ReportRow, usize)> = fractions
        .par_iter()
        .zip(subsets.par_iter())
        .map(|(&f, idx)| {
            let curve = train_fn(&dataset.subset(idx), epochs, seed)?;
            if curve.len() != epochs {
                return Err(Error::Config(format!(
                    "training returned {} epoch errors, expected {epochs}",
                    curve.len()
                )));
            }
            let (mean, std) = mean_std(&curve[epochs - epochs.min(BUDGET_WINDOW)..]);
            let row = ReportRow {
                condition: condition_label(f),
                metric: mean,
                std: Some(std),
            };
            Ok((row, idx.len()))
        })
        .collect::<Result<_>>()?;
    let mut counts = std::collections::BTreeMap::new();
    counts.insert("samples".to_string(), dataset.len());
    for (r, n) in &rows {
        counts.insert(format!("train@{}", r.condition), *n);
    }
    let mut report = EvalReport::new("held_out_error", rows.into_iter().map(|(r, _)| r).collect())?;
    report.metadata.counts = counts;
    Ok(report)
}
