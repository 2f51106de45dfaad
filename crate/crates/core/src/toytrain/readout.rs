//! Spatial soft-argmax: reads a 2-vector in `[-1, 1]^2` off an output map.

use crate::toytrain::tensor::Tensor;

/// Normalized coordinate of pixel `i` along an axis of length `n`.
#[inline]
pub fn grid_coord(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        2.0 * i as f64 / (n - 1) as f64 - 1.0
    }
}

pub struct SoftArgmax {
    /// Per-sample softmax weights over pixels.
    probs: Vec<Vec<f64>>,
    pub coords: Vec<[f64; 2]>,
    h: usize,
    w: usize,
}

impl SoftArgmax {
    pub fn forward(map: &Tensor) -> Self {
        let [n, _, h, w] = map.shape;
        let mut probs = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for b in 0..n {
            let m = map.plane(b, 0);
            let max = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut p: Vec<f64> = m.iter().map(|&v| (v - max).exp()).collect();
            let z: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= z);
            let mut xy = [0.0; 2];
            for (i, &pi) in p.iter().enumerate() {
                xy[0] += pi * grid_coord(i % w, w);
                xy[1] += pi * grid_coord(i / w, h);
            }
            probs.push(p);
            coords.push(xy);
        }
        Self {
            probs,
            coords,
            h,
            w,
        }
    }

    /// Map gradient from gradients w.r.t. the read-out coordinates.
    pub fn backward(&self, dcoords: &[[f64; 2]]) -> Tensor {
        let (h, w) = (self.h, self.w);
        let mut dmap = Tensor::zeros([self.probs.len(), 1, h, w]);
        for (b, (p, (xy, g))) in self
            .probs
            .iter()
            .zip(self.coords.iter().zip(dcoords))
            .enumerate()
        {
            let plane = dmap.plane_mut(b, 0);
            for (i, (d, &pi)) in plane.iter_mut().zip(p).enumerate() {
                let gx = grid_coord(i % w, w) - xy[0];
                let gy = grid_coord(i / w, h) - xy[1];
                *d = pi * (g[0] * gx + g[1] * gy);
            }
        }
        dmap
    }
}
