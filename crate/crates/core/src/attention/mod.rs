//! Gaze heatmaps and their temporal max-decay aggregation.
//!
//! An instantaneous heatmap places an unnormalized isotropic Gaussian (peak
//! 1.0) on every focus point of a frame and combines overlapping points with a
//! pixel-wise max. Heatmaps are then folded over time with
//!
//! ```text
//! y_0 = h_0
//! y_t = max(h_t, (1 - r) * y_{t-1})
//! ```
//!
//! so a fixation fades by a factor `1 - r` per camera tick unless refreshed.

mod aggregate;
mod golden;
mod render;

pub use aggregate::{aggregate_sequence, aggregate_step, Aggregator};
pub use golden::{decode_golden, encode_golden, read_golden, write_golden, GOLDEN_MAGIC};
pub use render::render_heatmap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Frame, Geometry};

/// Per-tick decay rate that makes a fixation fade below one 8-bit step
/// within roughly one second of 30 FPS video.
pub const DEFAULT_DECAY_RATE: f64 = 0.17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    /// Fraction of attention lost per frame, in (0, 1).
    pub rate: f64,
    /// Gaussian standard deviation in pixels at map resolution.
    pub sigma: f64,
    /// Kernel support in multiples of `sigma`; must be at least 3.
    pub truncation_radius: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            rate: DEFAULT_DECAY_RATE,
            sigma: 1.0,
            truncation_radius: 4.0,
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::OutOfRange {
                what: "decay.rate",
                value: self.rate,
                range: "(0, 1)",
            });
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::OutOfRange {
                what: "decay.sigma",
                value: self.sigma,
                range: "(0, inf)",
            });
        }
        if !(self.truncation_radius >= 3.0) {
            return Err(Error::OutOfRange {
                what: "decay.truncation_radius",
                value: self.truncation_radius,
                range: "[3, inf]",
            });
        }
        Ok(())
    }

    /// Multiplier applied to the previous map on every tick.
    pub fn retention(&self) -> f64 {
        1.0 - self.rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Instantaneous,
    Aggregated,
}

/// Single-channel float attention map with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub kind: MapKind,
}

impl AttentionMap {
    pub fn zeros(geometry: Geometry, kind: MapKind) -> Self {
        Self {
            width: geometry.width,
            height: geometry.height,
            values: vec![0.0; geometry.pixels()],
            kind,
        }
    }

    pub fn from_values(geometry: Geometry, values: Vec<f64>, kind: MapKind) -> Result<Self> {
        if values.len() != geometry.pixels() {
            return Err(Error::ShapeMismatch {
                expected: vec![geometry.height, geometry.width],
                actual: vec![values.len()],
            });
        }
        Ok(Self {
            width: geometry.width,
            height: geometry.height,
            values,
            kind,
        })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.height, self.width)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn quantize(&self) -> Result<QuantizedMap> {
        quantize(self)
    }
}

/// 8-bit attention map as stored on disk and fused into images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizedMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

impl QuantizedMap {
    pub fn zeros(geometry: Geometry) -> Self {
        Self {
            width: geometry.width,
            height: geometry.height,
            values: vec![0; geometry.pixels()],
        }
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.height, self.width)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }

    pub fn to_frame(&self) -> Frame {
        Frame::new(self.geometry(), 1, self.values.clone()).expect("sizes agree")
    }

    /// Takes the first channel of `frame`.
    pub fn from_frame(frame: &Frame) -> Self {
        Self {
            width: frame.width,
            height: frame.height,
            values: frame
                .data
                .chunks_exact(frame.channels)
                .map(|p| p[0])
                .collect(),
        }
    }

    /// Back to `[0, 1]` floats (`v / 255`).
    pub fn to_float(&self, kind: MapKind) -> AttentionMap {
        AttentionMap {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f64::from(v) / 255.0).collect(),
            kind,
        }
    }
}

/// Fixed-scale 8-bit quantization: `round(v * 255)`, ties away from zero.
///
/// Values outside `[0, 1]` mean the map was produced incorrectly and are
/// rejected rather than clamped.
pub fn quantize(map: &AttentionMap) -> Result<QuantizedMap> {
    let mut values = Vec::with_capacity(map.values.len());
    for &v in &map.values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what: "attention value",
                value: v,
                range: "[0, 1]",
            });
        }
        values.push((v * 255.0).round() as u8);
    }
    Ok(QuantizedMap {
        width: map.width,
        height: map.height,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(v: f64) -> AttentionMap {
        AttentionMap::from_values(Geometry::new(1, 1), vec![v], MapKind::Aggregated).unwrap()
    }

    #[test]
    fn quantize_endpoints_and_rounding() {
        assert_eq!(quantize(&single(0.0)).unwrap().values, [0]);
        assert_eq!(quantize(&single(1.0)).unwrap().values, [255]);
        // 0.83 * 255 = 211.65
        assert_eq!(quantize(&single(0.83)).unwrap().values, [212]);
        // e^-0.5 * 255 = 154.66
        assert_eq!(quantize(&single((-0.5f64).exp())).unwrap().values, [155]);
        // exact tie 0.5/255 * 255 = 0.5 rounds away from zero
        assert_eq!(quantize(&single(0.5 / 255.0)).unwrap().values, [1]);
    }

    #[test]
    fn quantize_rejects_out_of_range() {
        assert!(quantize(&single(1.0 + 1e-9)).is_err());
        assert!(quantize(&single(-1e-12)).is_err());
        assert!(quantize(&single(f64::NAN)).is_err());
    }

    #[test]
    fn decay_config_validation() {
        assert!(DecayConfig::default().validate().is_ok());
        let bad_rate = DecayConfig {
            rate: 1.0,
            ..Default::default()
        };
        assert!(bad_rate.validate().is_err());
        let bad_radius = DecayConfig {
            truncation_radius: 2.5,
            ..Default::default()
        };
        assert!(bad_radius.validate().is_err());
        let bad_sigma = DecayConfig {
            sigma: 0.0,
            ..Default::default()
        };
        assert!(bad_sigma.validate().is_err());
    }

    #[test]
    fn decay_config_defaults() {
        let cfg = DecayConfig::default();
        assert_eq!(cfg.rate, 0.17);
        assert_eq!(cfg.sigma, 1.0);
        assert_eq!(cfg.truncation_radius, 4.0);
    }
}
