//! Feeding attention to a downstream model: either as a fourth image
//! channel, or by painting the focus points onto the RGB image.

use serde::{Deserialize, Serialize};

use crate::attention::QuantizedMap;
use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Frame, Geometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// RGBA with the quantized attention in the alpha channel.
    #[default]
    Channel,
    /// RGB with discs drawn at the focus points.
    Marked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarkStyle {
    pub radius: f64,
    pub color: [u8; 3],
    pub alpha: f64,
}

impl Default for MarkStyle {
    fn default() -> Self {
        Self {
            radius: 4.0,
            color: [255, 0, 0],
            alpha: 1.0,
        }
    }
}

impl MarkStyle {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::OutOfRange {
                what: "mark radius",
                value: self.radius,
                range: "[0, inf)",
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::OutOfRange {
                what: "mark alpha",
                value: self.alpha,
                range: "[0, 1]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusedSample {
    pub mode: FusionMode,
    /// 4 channels in channel mode, 3 in marked mode.
    pub image: Frame,
}

/// Stacks the attention map as alpha behind the RGB channels.
pub fn fuse_channel(image: &Frame, att: &QuantizedMap) -> Result<FusedSample> {
    image.geometry().ensure_same(att.geometry())?;
    if image.channels != 3 {
        return Err(Error::ShapeMismatch {
            expected: vec![image.height, image.width, 3],
            actual: vec![image.height, image.width, image.channels],
        });
    }
    let data = image
        .data
        .chunks_exact(3)
        .zip(&att.values)
        .flat_map(|(rgb, &a)| [rgb[0], rgb[1], rgb[2], a])
        .collect();
    let mut fused = Frame::new(image.geometry(), 4, data)?;
    fused.frame_index = image.frame_index;
    fused.t_ns = image.t_ns;
    Ok(FusedSample {
        mode: FusionMode::Channel,
        image: fused,
    })
}

/// Inverse of [`fuse_channel`].
pub fn split_channel(fused: &FusedSample) -> Result<(Frame, QuantizedMap)> {
    let f = &fused.image;
    if fused.mode != FusionMode::Channel || f.channels != 4 {
        return Err(Error::ShapeMismatch {
            expected: vec![f.height, f.width, 4],
            actual: vec![f.height, f.width, f.channels],
        });
    }
    let rgb = f
        .data
        .chunks_exact(4)
        .flat_map(|p| [p[0], p[1], p[2]])
        .collect();
    let mut image = Frame::new(f.geometry(), 3, rgb)?;
    image.frame_index = f.frame_index;
    image.t_ns = f.t_ns;
    Ok((image, QuantizedMap::from_frame(f)))
}

/// Blends a filled disc of `style.radius` pixels around each rounded focus
/// point; pixels outside every disc are untouched.
pub fn mark_points(image: &Frame, points: &FocusPointSet, style: &MarkStyle) -> Result<FusedSample> {
    style.validate()?;
    let g: Geometry = image.geometry();
    points.ensure_within(g)?;
    let mut out = image.clone();
    let r = style.radius;
    let reach = r.floor() as i64;
    let r_sq = r * r;
    // Mark each pixel once even where discs overlap, so overlap does not
    // double-blend.
    let mut covered = vec![false; g.pixels()];
    for p in &points.points {
        let (cx, cy) = p.pixel(g);
        let (cx, cy) = (cx as i64, cy as i64);
        for y in (cy - reach).max(0)..=(cy + reach).min(g.height as i64 - 1) {
            for x in (cx - reach).max(0)..=(cx + reach).min(g.width as i64 - 1) {
                let (dx, dy) = ((x - cx) as f64, (y - cy) as f64);
                if dx * dx + dy * dy <= r_sq {
                    covered[y as usize * g.width + x as usize] = true;
                }
            }
        }
    }
    let a = style.alpha;
    for (px, _) in out
        .data
        .chunks_exact_mut(image.channels)
        .zip(&covered)
        .filter(|(_, &c)| c)
    {
        for (v, &c) in px.iter_mut().zip(&style.color) {
            *v = (a * f64::from(c) + (1.0 - a) * f64::from(*v)).round() as u8;
        }
    }
    Ok(FusedSample {
        mode: FusionMode::Marked,
        image: out,
    })
}

/// One line of the fused dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetRecord {
    Imitation {
        path: String,
        mode: FusionMode,
        steering: f64,
        velocity: f64,
    },
    Detection {
        path: String,
        boxes_ref: Option<String>,
    },
}

impl DatasetRecord {
    pub fn path(&self) -> &str {
        match self {
            DatasetRecord::Imitation { path, .. } | DatasetRecord::Detection { path, .. } => path,
        }
    }
}
