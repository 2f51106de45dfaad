//! Forward and backward passes of the few layer types the toy network uses.

use crate::toytrain::tensor::Tensor;

/// Square convolution, stride 1, zero padding `k / 2` (same-size output).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSlot {
    pub in_c: usize,
    pub out_c: usize,
    pub k: usize,
    /// Start of this layer's weights in the flat parameter vector; the
    /// `out_c` biases follow the `out_c * in_c * k * k` weights.
    pub offset: usize,
}

impl ConvSlot {
    pub fn weight_len(&self) -> usize {
        self.out_c * self.in_c * self.k * self.k
    }

    pub fn len(&self) -> usize {
        self.weight_len() + self.out_c
    }

    pub fn fan_in(&self) -> usize {
        self.in_c * self.k * self.k
    }

    fn bias_offset(&self) -> usize {
        self.offset + self.weight_len()
    }

    fn w_index(&self, o: usize, i: usize, ky: usize, kx: usize) -> usize {
        self.offset + ((o * self.in_c + i) * self.k + ky) * self.k + kx
    }
}

/// Row/column ranges of the output that read in-bounds input for a kernel
/// tap displaced by `d`.
#[inline]
fn valid_range(len: usize, d: isize) -> (usize, usize) {
    let lo = (-d).max(0) as usize;
    let hi = (len as isize - d).min(len as isize).max(0) as usize;
    (lo, hi.max(lo))
}

pub fn conv_forward(input: &Tensor, params: &[f64], slot: &ConvSlot) -> Tensor {
    let [n, c, h, w] = input.shape;
    debug_assert_eq!(c, slot.in_c);
    let pad = (slot.k / 2) as isize;
    let mut out = Tensor::zeros([n, slot.out_c, h, w]);
    for b in 0..n {
        for o in 0..slot.out_c {
            let bias = params[slot.bias_offset() + o];
            let plane = out.plane_mut(b, o);
            plane.iter_mut().for_each(|v| *v = bias);
            for i in 0..slot.in_c {
                let src = input.plane(b, i);
                for ky in 0..slot.k {
                    let dy = ky as isize - pad;
                    let (y0, y1) = valid_range(h, dy);
                    for kx in 0..slot.k {
                        let dx = kx as isize - pad;
                        let (x0, x1) = valid_range(w, dx);
                        let wv = params[slot.w_index(o, i, ky, kx)];
                        for y in y0..y1 {
                            let sy = (y as isize + dy) as usize;
                            let sx0 = (x0 as isize + dx) as usize;
                            let dst = &mut plane[y * w + x0..y * w + x1];
                            let s = &src[sy * w + sx0..sy * w + sx0 + (x1 - x0)];
                            for (d, &v) in dst.iter_mut().zip(s) {
                                *d += wv * v;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Accumulates parameter gradients into `grads` and returns the input
/// gradient when `need_input_grad` is set.
pub fn conv_backward(
    input: &Tensor,
    dout: &Tensor,
    params: &[f64],
    slot: &ConvSlot,
    grads: &mut [f64],
    need_input_grad: bool,
) -> Option<Tensor> {
    let [n, _, h, w] = input.shape;
    let pad = (slot.k / 2) as isize;
    let mut din = need_input_grad.then(|| Tensor::zeros(input.shape));
    for b in 0..n {
        for o in 0..slot.out_c {
            let g = dout.plane(b, o);
            grads[slot.bias_offset() + o] += g.iter().sum::<f64>();
            for i in 0..slot.in_c {
                let src = input.plane(b, i);
                for ky in 0..slot.k {
                    let dy = ky as isize - pad;
                    let (y0, y1) = valid_range(h, dy);
                    for kx in 0..slot.k {
                        let dx = kx as isize - pad;
                        let (x0, x1) = valid_range(w, dx);
                        let widx = slot.w_index(o, i, ky, kx);
                        let wv = params[widx];
                        let mut acc = 0.0;
                        for y in y0..y1 {
                            let sy = (y as isize + dy) as usize;
                            let sx0 = (x0 as isize + dx) as usize;
                            let gr = &g[y * w + x0..y * w + x1];
                            let s = &src[sy * w + sx0..sy * w + sx0 + (x1 - x0)];
                            acc += gr.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
                        }
                        grads[widx] += acc;
                        if let Some(din) = din.as_mut() {
                            let dplane = din.plane_mut(b, i);
                            for y in y0..y1 {
                                let sy = (y as isize + dy) as usize;
                                let sx0 = (x0 as isize + dx) as usize;
                                let gr = &g[y * w + x0..y * w + x1];
                                let d = &mut dplane[sy * w + sx0..sy * w + sx0 + (x1 - x0)];
                                for (dv, &gv) in d.iter_mut().zip(gr) {
                                    *dv += wv * gv;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    din
}

pub fn leaky_forward(z: &Tensor, slope: f64) -> Tensor {
    Tensor {
        shape: z.shape,
        data: z
            .data
            .iter()
            .map(|&v| if v > 0.0 { v } else { slope * v })
            .collect(),
    }
}

pub fn leaky_backward(z: &Tensor, dout: &Tensor, slope: f64) -> Tensor {
    Tensor {
        shape: z.shape,
        data: z
            .data
            .iter()
            .zip(&dout.data)
            .map(|(&v, &g)| if v > 0.0 { g } else { slope * g })
            .collect(),
    }
}

/// 2x2 mean pooling; spatial dims must be even.
pub fn avgpool_forward(x: &Tensor) -> Tensor {
    let [n, c, h, w] = x.shape;
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Tensor::zeros([n, c, oh, ow]);
    for b in 0..n {
        for ch in 0..c {
            let src = x.plane(b, ch);
            let dst = out.plane_mut(b, ch);
            for y in 0..oh {
                for xx in 0..ow {
                    let i = 2 * y * w + 2 * xx;
                    dst[y * ow + xx] = 0.25 * (src[i] + src[i + 1] + src[i + w] + src[i + w + 1]);
                }
            }
        }
    }
    out
}

pub fn avgpool_backward(dout: &Tensor) -> Tensor {
    let [n, c, oh, ow] = dout.shape;
    let (h, w) = (oh * 2, ow * 2);
    let mut din = Tensor::zeros([n, c, h, w]);
    for b in 0..n {
        for ch in 0..c {
            let g = dout.plane(b, ch);
            let dst = din.plane_mut(b, ch);
            for y in 0..h {
                for x in 0..w {
                    dst[y * w + x] = 0.25 * g[(y / 2) * ow + x / 2];
                }
            }
        }
    }
    din
}

/// Nearest-neighbor 2x upsampling.
pub fn upsample_forward(x: &Tensor) -> Tensor {
    let [n, c, h, w] = x.shape;
    let (oh, ow) = (h * 2, w * 2);
    let mut out = Tensor::zeros([n, c, oh, ow]);
    for b in 0..n {
        for ch in 0..c {
            let src = x.plane(b, ch);
            let dst = out.plane_mut(b, ch);
            for y in 0..oh {
                for xx in 0..ow {
                    dst[y * ow + xx] = src[(y / 2) * w + xx / 2];
                }
            }
        }
    }
    out
}

pub fn upsample_backward(dout: &Tensor) -> Tensor {
    let [n, c, oh, ow] = dout.shape;
    let (h, w) = (oh / 2, ow / 2);
    let mut din = Tensor::zeros([n, c, h, w]);
    for b in 0..n {
        for ch in 0..c {
            let g = dout.plane(b, ch);
            let dst = din.plane_mut(b, ch);
            for y in 0..oh {
                for x in 0..ow {
                    dst[(y / 2) * w + x / 2] += g[y * ow + x];
                }
            }
        }
    }
    din
}

/// Channel concatenation `[a, b]`.
pub fn concat(a: &Tensor, b: &Tensor) -> Tensor {
    let [n, ca, h, w] = a.shape;
    let cb = b.shape[1];
    let mut out = Tensor::zeros([n, ca + cb, h, w]);
    let p = h * w;
    for s in 0..n {
        let dst = &mut out.data[s * (ca + cb) * p..(s + 1) * (ca + cb) * p];
        dst[..ca * p].copy_from_slice(a.sample(s));
        dst[ca * p..].copy_from_slice(b.sample(s));
    }
    out
}

/// Inverse of [`concat`] for gradients.
pub fn split(x: &Tensor, ca: usize) -> (Tensor, Tensor) {
    let [n, c, h, w] = x.shape;
    let cb = c - ca;
    let p = h * w;
    let mut a = Tensor::zeros([n, ca, h, w]);
    let mut b = Tensor::zeros([n, cb, h, w]);
    for s in 0..n {
        let src = x.sample(s);
        a.data[s * ca * p..(s + 1) * ca * p].copy_from_slice(&src[..ca * p]);
        b.data[s * cb * p..(s + 1) * cb * p].copy_from_slice(&src[ca * p..]);
    }
    (a, b)
}
