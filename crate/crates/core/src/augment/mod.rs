//! Training-time augmentation applied in lockstep to an image, its attention
//! channel, its focus points and its box annotations.
//!
//! Geometric ops move all four together (attention with nearest-neighbor
//! lookup so no intermediate likelihoods appear); photometric ops touch only
//! the color channels.

mod geometric;
mod mosaic;
mod photometric;
mod spec;

pub use geometric::{flip_h, resize, translate_scale, AxisAffine, FILL_GRAY, MIN_BOX_AREA};
pub use mosaic::{mosaic, mosaic_at};
pub use photometric::{brightness, hsv_jitter, hsv_to_rgb, rgb_to_hsv, HsvGains};
pub use spec::{augment_batch, sample_seed, AugmentOp, AugmentSpec};

use crate::annotation::BoxAnnotation;
use crate::attention::QuantizedMap;
use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Frame, Geometry};

/// One training example: RGB image plus everything that must move with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: Frame,
    pub attention: Option<QuantizedMap>,
    pub points: Option<FocusPointSet>,
    pub boxes: Vec<BoxAnnotation>,
}

impl Sample {
    pub fn new(image: Frame) -> Self {
        Self {
            image,
            attention: None,
            points: None,
            boxes: Vec::new(),
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.image.geometry()
    }

    pub fn validate(&self) -> Result<()> {
        if self.image.channels != 3 {
            return Err(Error::ShapeMismatch {
                expected: vec![self.image.height, self.image.width, 3],
                actual: vec![self.image.height, self.image.width, self.image.channels],
            });
        }
        let g = self.geometry();
        if let Some(att) = &self.attention {
            g.ensure_same(att.geometry())?;
        }
        if let Some(points) = &self.points {
            points.ensure_within(g)?;
        }
        Ok(())
    }
}
