use crate::annotation::{BBox, BoxAnnotation};
use crate::attention::QuantizedMap;
use crate::augment::Sample;
use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Frame, Geometry, Point};

/// Gray used for canvas regions that no source pixel maps to.
pub const FILL_GRAY: u8 = 114;
/// Boxes whose clipped area drops below this are removed.
pub const MIN_BOX_AREA: f64 = 4.0;

/// Mirrors columns. Points use pixel-center coordinates (`x -> W - 1 - x`),
/// boxes use edge coordinates (`x -> W - x - w`).
pub fn flip_h(s: &Sample) -> Sample {
    let g = s.geometry();
    let mut image = s.image.clone();
    let c = image.channels;
    for y in 0..g.height {
        let src = s.image.row(y);
        let dst = &mut image.data[y * g.width * c..(y + 1) * g.width * c];
        for x in 0..g.width {
            let from = (g.width - 1 - x) * c;
            dst[x * c..(x + 1) * c].copy_from_slice(&src[from..from + c]);
        }
    }
    let attention = s.attention.as_ref().map(|att| {
        let mut out = att.clone();
        for row in out.values.chunks_exact_mut(att.width) {
            row.reverse();
        }
        out
    });
    let w = g.width as f64;
    let points = s.points.as_ref().map(|set| {
        FocusPointSet::new(
            set.frame_index,
            set.points
                .iter()
                .map(|p| Point::new(w - 1.0 - p.x, p.y))
                .collect(),
        )
    });
    let boxes = s
        .boxes
        .iter()
        .map(|b| BoxAnnotation { x: w - b.x - b.w, ..*b })
        .collect();
    Sample {
        image,
        attention,
        points,
        boxes,
    }
}

/// Per-axis scale plus translation in edge coordinates:
/// `X' = sx * X + tx`, `Y' = sy * Y + ty`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAffine {
    pub sx: f64,
    pub sy: f64,
    pub tx: f64,
    pub ty: f64,
    pub output: Geometry,
}

impl AxisAffine {
    /// Scale about the image center, then shift by a fraction of the size.
    pub fn centered(g: Geometry, fx: f64, fy: f64, scale: f64) -> Self {
        let (w, h) = (g.width as f64, g.height as f64);
        Self {
            sx: scale,
            sy: scale,
            tx: (1.0 - scale) * 0.5 * w + fx * w,
            ty: (1.0 - scale) * 0.5 * h + fy * h,
            output: g,
        }
    }

    fn inverse(&self, x_out: f64, y_out: f64) -> (f64, f64) {
        ((x_out - self.tx) / self.sx, (y_out - self.ty) / self.sy)
    }

    pub fn map_point(&self, p: Point) -> Point {
        Point::new(
            self.sx * (p.x + 0.5) + self.tx - 0.5,
            self.sy * (p.y + 0.5) + self.ty - 0.5,
        )
    }

    pub fn map_box(&self, b: BBox) -> BBox {
        let x0 = self.sx * b.x + self.tx;
        let x1 = self.sx * b.right() + self.tx;
        let y0 = self.sy * b.y + self.ty;
        let y1 = self.sy * b.bottom() + self.ty;
        BBox::new(x0, y0, x1 - x0, y1 - y0)
    }
}

/// Clips to `[x0, x1) x [y0, y1)`; `None` when too little remains.
pub(crate) fn clip_box(b: BBox, x0: f64, y0: f64, x1: f64, y1: f64) -> Option<BBox> {
    let l = b.x.max(x0);
    let t = b.y.max(y0);
    let r = b.right().min(x1);
    let btm = b.bottom().min(y1);
    let clipped = BBox::new(l, t, r - l, btm - t);
    (clipped.w > 0.0 && clipped.h > 0.0 && clipped.area() >= MIN_BOX_AREA).then_some(clipped)
}

fn warp_color(src: &Frame, a: &AxisAffine) -> Frame {
    let (w, h) = (src.width, src.height);
    let c = src.channels;
    let mut out = Frame::filled(a.output, c, FILL_GRAY);
    out.frame_index = src.frame_index;
    out.t_ns = src.t_ns;
    let mut acc = vec![0.0f64; c];
    for oy in 0..a.output.height {
        for ox in 0..a.output.width {
            let (sx, sy) = a.inverse(ox as f64 + 0.5, oy as f64 + 0.5);
            if !(sx >= 0.0 && sy >= 0.0 && sx < w as f64 && sy < h as f64) {
                continue;
            }
            let u = (sx - 0.5).clamp(0.0, (w - 1) as f64);
            let v = (sy - 0.5).clamp(0.0, (h - 1) as f64);
            let (x0, y0) = (u.floor() as usize, v.floor() as usize);
            let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
            let (tu, tv) = (u - x0 as f64, v - y0 as f64);
            let corners = [
                (x0, y0, (1.0 - tu) * (1.0 - tv)),
                (x1, y0, tu * (1.0 - tv)),
                (x0, y1, (1.0 - tu) * tv),
                (x1, y1, tu * tv),
            ];
            acc.iter_mut().for_each(|v| *v = 0.0);
            for (cx, cy, wt) in corners {
                if wt == 0.0 {
                    continue;
                }
                for (a, &p) in acc.iter_mut().zip(src.pixel(cx, cy)) {
                    *a += wt * f64::from(p);
                }
            }
            for (d, a) in out.pixel_mut(ox, oy).iter_mut().zip(&acc) {
                *d = a.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}

fn warp_attention(src: &QuantizedMap, a: &AxisAffine) -> QuantizedMap {
    let mut out = QuantizedMap::zeros(a.output);
    for oy in 0..a.output.height {
        for ox in 0..a.output.width {
            let (sx, sy) = a.inverse(ox as f64 + 0.5, oy as f64 + 0.5);
            if sx >= 0.0 && sy >= 0.0 && sx < src.width as f64 && sy < src.height as f64 {
                out.values[oy * a.output.width + ox] = src.get(sx as usize, sy as usize);
            }
        }
    }
    out
}

/// Applies an axis-aligned affine map to every component of a sample.
pub fn warp(s: &Sample, a: &AxisAffine) -> Sample {
    let out_g = a.output;
    let image = warp_color(&s.image, a);
    let attention = s.attention.as_ref().map(|m| warp_attention(m, a));
    let points = s.points.as_ref().map(|set| {
        FocusPointSet::new(
            set.frame_index,
            set.points
                .iter()
                .map(|&p| a.map_point(p))
                .filter(|&p| out_g.contains(p))
                .collect(),
        )
    });
    let (w, h) = (out_g.width as f64, out_g.height as f64);
    let boxes = s
        .boxes
        .iter()
        .filter_map(|b| clip_box(a.map_box(b.bbox()), 0.0, 0.0, w, h).map(|c| b.with_bbox(c)))
        .collect();
    Sample {
        image,
        attention,
        points,
        boxes,
    }
}

/// Shift by `(fx * W, fy * H)` and scale by `scale` about the center.
/// Color is resampled bilinearly, attention by nearest neighbor.
pub fn translate_scale(s: &Sample, fx: f64, fy: f64, scale: f64) -> Result<Sample> {
    for (what, v) in [("translate.fx", fx), ("translate.fy", fy)] {
        if !(v.abs() <= 0.5) {
            return Err(Error::OutOfRange {
                what,
                value: v,
                range: "[-0.5, 0.5]",
            });
        }
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::OutOfRange {
            what: "scale",
            value: scale,
            range: "(0, inf)",
        });
    }
    Ok(warp(s, &AxisAffine::centered(s.geometry(), fx, fy, scale)))
}

/// Resamples a sample to `target` dimensions.
pub fn resize(s: &Sample, target: Geometry) -> Sample {
    let g = s.geometry();
    let a = AxisAffine {
        sx: target.width as f64 / g.width as f64,
        sy: target.height as f64 / g.height as f64,
        tx: 0.0,
        ty: 0.0,
        output: target,
    };
    warp(s, &a)
}
