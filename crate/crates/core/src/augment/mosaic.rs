use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attention::QuantizedMap;
use crate::augment::geometric::{clip_box, resize, FILL_GRAY};
use crate::augment::Sample;
use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Frame, Geometry, Point};

/// Four-image mosaic around a center drawn uniformly from
/// `[W/2, 3W/2] x [H/2, 3H/2]` on a `2W x 2H` canvas.
///
/// With `rescale` the canvas is resampled back to `W x H`.
pub fn mosaic(samples: &[Sample; 4], seed: u64, rescale: bool) -> Result<Sample> {
    let g = samples[0].geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = rng.random_range(g.width.div_ceil(2)..=(3 * g.width) / 2);
    let cy = rng.random_range(g.height.div_ceil(2)..=(3 * g.height) / 2);
    mosaic_at(samples, (cx, cy), rescale)
}

struct Placement {
    /// Canvas region `[x0, x1) x [y0, y1)`.
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
    /// Source pixel that lands on `(x0, y0)`.
    sx0: usize,
    sy0: usize,
}

fn placements(g: Geometry, cx: usize, cy: usize) -> [Placement; 4] {
    let (w, h) = (g.width, g.height);
    let left = cx.saturating_sub(w);
    let top = cy.saturating_sub(h);
    let right = (cx + w).min(2 * w);
    let bottom = (cy + h).min(2 * h);
    [
        // top-left: bottom-right corner of the image meets the center
        Placement { x0: left, y0: top, x1: cx, y1: cy, sx0: w - (cx - left), sy0: h - (cy - top) },
        // top-right
        Placement { x0: cx, y0: top, x1: right, y1: cy, sx0: 0, sy0: h - (cy - top) },
        // bottom-left
        Placement { x0: left, y0: cy, x1: cx, y1: bottom, sx0: w - (cx - left), sy0: 0 },
        // bottom-right
        Placement { x0: cx, y0: cy, x1: right, y1: bottom, sx0: 0, sy0: 0 },
    ]
}

/// Mosaic with an explicit center `(cx, cy)` in canvas pixels.
pub fn mosaic_at(samples: &[Sample; 4], center: (usize, usize), rescale: bool) -> Result<Sample> {
    let g = samples[0].geometry();
    for s in &samples[1..] {
        g.ensure_same(s.geometry())?;
    }
    let with_attention = samples.iter().filter(|s| s.attention.is_some()).count();
    if with_attention != 0 && with_attention != 4 {
        return Err(Error::Config(
            "mosaic inputs must all carry attention maps or none".into(),
        ));
    }
    let (cx, cy) = center;
    if cx > 2 * g.width || cy > 2 * g.height {
        return Err(Error::PointOutOfBounds {
            x: cx as f64,
            y: cy as f64,
            height: 2 * g.height,
            width: 2 * g.width,
        });
    }

    let canvas_g = Geometry::new(2 * g.height, 2 * g.width);
    let mut image = Frame::filled(canvas_g, 3, FILL_GRAY);
    image.frame_index = samples[0].image.frame_index;
    image.t_ns = samples[0].image.t_ns;
    let mut attention = (with_attention == 4).then(|| QuantizedMap::zeros(canvas_g));
    let any_points = samples.iter().any(|s| s.points.is_some());
    let mut points = Vec::new();
    let mut boxes = Vec::new();

    for (s, p) in samples.iter().zip(placements(g, cx, cy)) {
        let cols = p.x1 - p.x0;
        for row in 0..p.y1 - p.y0 {
            let src = s.image.row(p.sy0 + row);
            let dst_start = ((p.y0 + row) * canvas_g.width + p.x0) * 3;
            image.data[dst_start..dst_start + cols * 3]
                .copy_from_slice(&src[p.sx0 * 3..(p.sx0 + cols) * 3]);
            if let (Some(out), Some(att)) = (attention.as_mut(), s.attention.as_ref()) {
                let src = &att.values[(p.sy0 + row) * g.width + p.sx0..][..cols];
                let dst = (p.y0 + row) * canvas_g.width + p.x0;
                out.values[dst..dst + cols].copy_from_slice(src);
            }
        }

        let dx = p.x0 as f64 - p.sx0 as f64;
        let dy = p.y0 as f64 - p.sy0 as f64;
        let (x0, y0, x1, y1) = (p.x0 as f64, p.y0 as f64, p.x1 as f64, p.y1 as f64);
        if let Some(set) = &s.points {
            points.extend(
                set.points
                    .iter()
                    .map(|q| Point::new(q.x + dx, q.y + dy))
                    .filter(|q| q.x >= x0 && q.x < x1 && q.y >= y0 && q.y < y1),
            );
        }
        for b in &s.boxes {
            let mut shifted = b.bbox();
            shifted.x += dx;
            shifted.y += dy;
            if let Some(c) = clip_box(shifted, x0, y0, x1, y1) {
                boxes.push(b.with_bbox(c));
            }
        }
    }

    let frame_index = samples[0].points.as_ref().map_or(0, |p| p.frame_index);
    let canvas = Sample {
        image,
        attention,
        points: any_points.then(|| FocusPointSet::new(frame_index, points)),
        boxes,
    };
    Ok(if rescale { resize(&canvas, g) } else { canvas })
}
