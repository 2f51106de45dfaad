//! Toy stand-in for driving frames: a bright blob marks the goal location on
//! a noisy background, with dimmer look-alike blobs as distractors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attention::{render_heatmap, DecayConfig};
use crate::error::{Error, Result};
use crate::fusion::{mark_points, MarkStyle};
use crate::geometry::{FocusPointSet, Frame, Geometry, Point};
use crate::toytrain::readout::grid_coord;
use crate::toytrain::train::{frame_to_chw, Dataset};

pub const BACKGROUND: f64 = 60.0;
pub const NOISE: f64 = 20.0;
pub const BLOB_SIGMA: f64 = 1.5;
pub const TARGET_LEVEL: f64 = 190.0;
pub const DISTRACTOR_LEVEL: f64 = 150.0;
pub const DISTRACTORS: usize = 2;
/// Sigma of the target attention map.
pub const TARGET_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub frame: Frame,
    /// Center of the target blob (integer pixel).
    pub target: Point,
}

impl SyntheticScene {
    /// Target location in `[-1, 1]^2`.
    pub fn command(&self) -> [f64; 2] {
        let g = self.frame.geometry();
        [
            grid_coord(self.target.x as usize, g.width),
            grid_coord(self.target.y as usize, g.height),
        ]
    }
}

/// Mark used when rendering marked scenes; smaller than the fusion default
/// because the toy frames are tiny.
pub fn synthetic_mark() -> MarkStyle {
    MarkStyle {
        radius: 2.0,
        ..MarkStyle::default()
    }
}

fn draw_blob(canvas: &mut [f64], g: Geometry, c: Point, level: f64) {
    let r = (4.0 * BLOB_SIGMA).ceil() as i64;
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (c.x as i64 + dx, c.y as i64 + dy);
            if x < 0 || y < 0 || x >= g.width as i64 || y >= g.height as i64 {
                continue;
            }
            let v = level * (-((dx * dx + dy * dy) as f64) / (2.0 * BLOB_SIGMA * BLOB_SIGMA)).exp();
            let cell = &mut canvas[y as usize * g.width + x as usize];
            *cell = cell.max(v);
        }
    }
}

fn random_center(rng: &mut ChaCha8Rng, g: Geometry, margin: usize) -> Point {
    Point::new(
        rng.random_range(margin..g.width - margin) as f64,
        rng.random_range(margin..g.height - margin) as f64,
    )
}

/// `n` scenes drawn from `seed`. Geometry must be at least 10x10.
pub fn synthetic_scenes(n: usize, geometry: Geometry, seed: u64) -> Result<Vec<SyntheticScene>> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if geometry.width < 10 || geometry.height < 10 {
        return Err(Error::Config(format!(
            "synthetic frames need at least 10x10 pixels, got {}x{}",
            geometry.height, geometry.width
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = geometry.pixels();
    let mut scenes = Vec::with_capacity(n);
    for _ in 0..n {
        let target = random_center(&mut rng, geometry, 2);
        let mut blobs = vec![0.0; plane];
        draw_blob(&mut blobs, geometry, target, TARGET_LEVEL);
        let mut placed = 0;
        while placed < DISTRACTORS {
            let d = random_center(&mut rng, geometry, 1);
            if (d.x - target.x).abs().max((d.y - target.y).abs()) < 4.0 {
                continue;
            }
            draw_blob(&mut blobs, geometry, d, DISTRACTOR_LEVEL);
            placed += 1;
        }
        let mut data = Vec::with_capacity(plane * 3);
        for b in &blobs {
            for _ in 0..3 {
                let noise = rng.random_range(-NOISE..=NOISE);
                data.push((BACKGROUND + noise).max(*b).round().clamp(0.0, 255.0) as u8);
            }
        }
        scenes.push(SyntheticScene {
            frame: Frame::new(geometry, 3, data)?,
            target,
        });
    }
    Ok(scenes)
}

/// RGB inputs in `[0, 1]`, a Gaussian attention map at the target and the
/// target's normalized coordinates as the command. With `marked`, the
/// target is painted with [`synthetic_mark`]; the scenes themselves are the
/// same for both settings of `marked`.
pub fn make_synthetic_task(n: usize, geometry: Geometry, seed: u64, marked: bool) -> Result<Dataset> {
    let scenes = synthetic_scenes(n, geometry, seed)?;
    let decay = DecayConfig {
        sigma: TARGET_SIGMA,
        ..DecayConfig::default()
    };
    let mut data = Dataset {
        chw: [3, geometry.height, geometry.width],
        inputs: Vec::with_capacity(n),
        maps: Vec::with_capacity(n),
        commands: Vec::with_capacity(n),
    };
    for s in &scenes {
        let points = FocusPointSet::new(0, vec![s.target]);
        let frame = if marked {
            mark_points(&s.frame, &points, &synthetic_mark())?.image
        } else {
            s.frame.clone()
        };
        data.inputs.push(frame_to_chw(&frame, 3));
        data.maps.push(render_heatmap(&points, geometry, &decay)?.values);
        data.commands.push(s.command());
    }
    Ok(data)
}
