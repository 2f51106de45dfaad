use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{brightness, flip_h, hsv_jitter, mosaic, translate_scale, HsvGains, Sample};
use crate::error::{Error, Result};

fn default_rescale() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum AugmentOp {
    FlipH,
    Brightness {
        factor: f64,
    },
    Hsv {
        dh: f64,
        ds: f64,
        dv: f64,
    },
    Translate {
        fx: f64,
        fy: f64,
    },
    Scale {
        s: f64,
    },
    /// Combines the sample with three others drawn from the same batch.
    Mosaic {
        #[serde(default = "default_rescale")]
        rescale: bool,
    },
}

impl AugmentOp {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AugmentOp::Brightness { factor } if !(factor > 0.0) => Err(Error::OutOfRange {
                what: "brightness factor",
                value: factor,
                range: "(0, inf)",
            }),
            AugmentOp::Hsv { dh, ds, dv } => HsvGains { dh, ds, dv }.validate(),
            AugmentOp::Translate { fx, fy } if !(fx.abs() <= 0.5 && fy.abs() <= 0.5) => {
                Err(Error::OutOfRange {
                    what: "translate",
                    value: fx.abs().max(fy.abs()),
                    range: "[-0.5, 0.5]",
                })
            }
            AugmentOp::Scale { s } if !(s > 0.0) => Err(Error::OutOfRange {
                what: "scale",
                value: s,
                range: "(0, inf)",
            }),
            _ => Ok(()),
        }
    }
}

/// Ordered augmentation ops and the seed all randomness derives from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentSpec {
    pub ops: Vec<AugmentOp>,
    pub seed: u64,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        let hsv = HsvGains::default();
        Self {
            ops: vec![
                AugmentOp::Hsv {
                    dh: hsv.dh,
                    ds: hsv.ds,
                    dv: hsv.dv,
                },
                AugmentOp::FlipH,
            ],
            seed: 0,
        }
    }
}

impl AugmentSpec {
    pub fn validate(&self) -> Result<()> {
        self.ops.iter().try_for_each(AugmentOp::validate)
    }
}

/// Seed of the `index`-th sample of a batch.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

fn apply_ops(batch: &[Sample], index: usize, spec: &AugmentSpec) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(spec.seed, index));
    let mut s = batch[index].clone();
    for op in &spec.ops {
        s = match *op {
            AugmentOp::FlipH => flip_h(&s),
            AugmentOp::Brightness { factor } => brightness(&s, factor)?,
            AugmentOp::Hsv { dh, ds, dv } => hsv_jitter(&s, HsvGains { dh, ds, dv }, rng.next_u64())?,
            AugmentOp::Translate { fx, fy } => translate_scale(&s, fx, fy, 1.0)?,
            AugmentOp::Scale { s: scale } => translate_scale(&s, 0.0, 0.0, scale)?,
            AugmentOp::Mosaic { rescale } => {
                let pick = |rng: &mut ChaCha8Rng| batch[rng.random_range(0..batch.len())].clone();
                let group = [s, pick(&mut rng), pick(&mut rng), pick(&mut rng)];
                mosaic(&group, rng.next_u64(), rescale)?
            }
        };
    }
    Ok(s)
}

/// Augments every sample of a batch. Each sample's randomness comes only from
/// `sample_seed(spec.seed, index)`, so the output is independent of how the
/// work is scheduled across threads.
pub fn augment_batch(batch: &[Sample], spec: &AugmentSpec) -> Result<Vec<Sample>> {
    spec.validate()?;
    batch.iter().try_for_each(Sample::validate)?;
    (0..batch.len())
        .into_par_iter()
        .map(|i| apply_ops(batch, i, spec))
        .collect()
}
