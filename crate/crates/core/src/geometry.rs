use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frame dimensions in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    pub height: usize,
    pub width: usize,
}

impl Geometry {
    pub const fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    /// Point lies in `[0, W) x [0, H)`.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }

    pub fn ensure_same(&self, other: Geometry) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::geometry(
                (self.height, self.width),
                (other.height, other.width),
            ))
        }
    }
}

/// A location in pixel coordinates. Integer coordinates are pixel centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Nearest pixel (column, row), clamped into `geometry`.
    pub fn pixel(&self, geometry: Geometry) -> (usize, usize) {
        let clamp = |v: f64, n: usize| (v.round().max(0.0) as usize).min(n.saturating_sub(1));
        (clamp(self.x, geometry.width), clamp(self.y, geometry.height))
    }
}

/// The focus points tracked for one frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FocusPointSet {
    pub frame_index: u64,
    pub points: Vec<Point>,
}

impl FocusPointSet {
    pub fn new(frame_index: u64, points: Vec<Point>) -> Self {
        Self {
            frame_index,
            points,
        }
    }

    pub fn empty(frame_index: u64) -> Self {
        Self::new(frame_index, Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn ensure_within(&self, geometry: Geometry) -> Result<()> {
        match self.points.iter().find(|p| !geometry.contains(**p)) {
            None => Ok(()),
            Some(p) => Err(Error::PointOutOfBounds {
                x: p.x,
                y: p.y,
                height: geometry.height,
                width: geometry.width,
            }),
        }
    }

    /// Checks both the geometry and the cardinality bound.
    pub fn validate(&self, geometry: Geometry, max_points: usize) -> Result<()> {
        if self.points.len() > max_points {
            return Err(Error::TooManyPoints {
                count: self.points.len(),
                limit: max_points,
            });
        }
        self.ensure_within(geometry)
    }
}

/// Interleaved 8-bit image, row-major, `channels` samples per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
    pub frame_index: u64,
    pub t_ns: i64,
}

impl Frame {
    pub fn new(geometry: Geometry, channels: usize, data: Vec<u8>) -> Result<Self> {
        let expected = geometry.pixels() * channels;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected: vec![geometry.height, geometry.width, channels],
                actual: vec![data.len()],
            });
        }
        Ok(Self {
            width: geometry.width,
            height: geometry.height,
            channels,
            data,
            frame_index: 0,
            t_ns: 0,
        })
    }

    pub fn filled(geometry: Geometry, channels: usize, value: u8) -> Self {
        Self {
            width: geometry.width,
            height: geometry.height,
            channels,
            data: vec![value; geometry.pixels() * channels],
            frame_index: 0,
            t_ns: 0,
        }
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.height, self.width)
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.channels;
        &self.data[y * stride..(y + 1) * stride]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_is_half_open() {
        let g = Geometry::new(480, 848);
        assert!(g.contains(Point::new(0.0, 0.0)));
        assert!(g.contains(Point::new(847.9, 479.9)));
        assert!(!g.contains(Point::new(848.0, 10.0)));
        assert!(!g.contains(Point::new(-0.1, 10.0)));
    }

    #[test]
    fn cardinality_bound_is_enforced() {
        let g = Geometry::new(10, 10);
        let set = FocusPointSet::new(0, vec![Point::new(1.0, 1.0); 5]);
        assert!(matches!(
            set.validate(g, 4),
            Err(Error::TooManyPoints { count: 5, limit: 4 })
        ));
        assert!(set.validate(g, 5).is_ok());
    }

    #[test]
    fn pixel_rounds_and_clamps() {
        let g = Geometry::new(10, 10);
        assert_eq!(Point::new(2.4, 2.6).pixel(g), (2, 3));
        assert_eq!(Point::new(9.7, 0.0).pixel(g), (9, 0));
    }
}
