use serde::{Deserialize, Serialize};

/// Axis-aligned box, top-left origin, pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + 0.5 * self.w, self.y + 0.5 * self.h)
    }
}

/// Ground-truth box as stored in the box JSONL files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxAnnotation {
    pub image_id: u64,
    pub class_id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoxAnnotation {
    pub fn new(image_id: u64, class_id: u32, b: BBox) -> Self {
        Self {
            image_id,
            class_id,
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(self.x, self.y, self.w, self.h)
    }

    pub fn with_bbox(self, b: BBox) -> Self {
        Self::new(self.image_id, self.class_id, b)
    }
}

/// A scored prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    pub image_id: u64,
    pub class_id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub score: f64,
}

impl Detection {
    pub fn new(image_id: u64, class_id: u32, b: BBox, score: f64) -> Self {
        Self {
            image_id,
            class_id,
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
            score,
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(self.x, self.y, self.w, self.h)
    }

    /// A perfect detection of `gt` with the given score.
    pub fn from_annotation(gt: &BoxAnnotation, score: f64) -> Self {
        Self::new(gt.image_id, gt.class_id, gt.bbox(), score)
    }
}
