use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::ingest::GazeSample;

const MIN_DETERMINANT: f64 = 1e-12;
const MIN_HOMOGENEOUS_W: f64 = 1e-9;

/// Row-major 3x3 homography from tracker coordinates to camera pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct CameraTransform {
    m: [[f64; 3]; 3],
}

impl CameraTransform {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let t = Self { m };
        let det = t.determinant();
        if !(det.abs() > MIN_DETERMINANT) {
            return Err(Error::Config(format!(
                "camera transform is not invertible (det = {det:e})"
            )));
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `self * other`: apply `other` first.
    pub fn then_after(&self, other: &CameraTransform) -> CameraTransform {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        CameraTransform { m }
    }

    /// Projects `(x, y)`; `None` when the homogeneous coordinate vanishes.
    pub fn apply(&self, x: f64, y: f64) -> Option<Point> {
        let m = &self.m;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        if w.abs() < MIN_HOMOGENEOUS_W {
            return None;
        }
        let u = m[0][0] * x + m[0][1] * y + m[0][2];
        let v = m[1][0] * x + m[1][1] * y + m[1][2];
        Some(Point::new(u / w, v / w))
    }
}

impl TryFrom<[[f64; 3]; 3]> for CameraTransform {
    type Error = Error;

    fn try_from(m: [[f64; 3]; 3]) -> Result<Self> {
        CameraTransform::new(m)
    }
}

impl From<CameraTransform> for [[f64; 3]; 3] {
    fn from(t: CameraTransform) -> Self {
        t.m
    }
}

impl Default for CameraTransform {
    fn default() -> Self {
        Self::identity()
    }
}

/// What became of one gaze sample when mapped into the camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Inside(Point),
    Invalid,
    OutOfFrame,
    Degenerate,
}

impl Projection {
    pub fn point(self) -> Option<Point> {
        match self {
            Projection::Inside(p) => Some(p),
            _ => None,
        }
    }
}

/// Maps a gaze sample into camera pixels, discarding invalid samples and
/// anything that lands outside `[0, W) x [0, H)`.
pub fn to_camera_frame(
    sample: &GazeSample,
    tf: &CameraTransform,
    geometry: Geometry,
) -> Projection {
    if !sample.valid || !sample.x.is_finite() || !sample.y.is_finite() {
        return Projection::Invalid;
    }
    match tf.apply(sample.x, sample.y) {
        None => Projection::Degenerate,
        Some(p) if geometry.contains(p) => Projection::Inside(p),
        Some(_) => Projection::OutOfFrame,
    }
}
