use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toytrain::layers::{
    avgpool_backward, avgpool_forward, concat, conv_backward, conv_forward, leaky_backward,
    leaky_forward, split, upsample_backward, upsample_forward, ConvSlot,
};
use crate::toytrain::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TinyNetConfig {
    pub input_channels: usize,
    pub base_width: usize,
    pub depth: usize,
    pub leaky_slope: f64,
}

impl Default for TinyNetConfig {
    fn default() -> Self {
        Self {
            input_channels: 3,
            base_width: 8,
            depth: 2,
            leaky_slope: 0.1,
        }
    }
}

impl TinyNetConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.input_channels, 1 | 3 | 4) {
            return Err(Error::Config(format!(
                "net.input_channels must be 1, 3 or 4, got {}",
                self.input_channels
            )));
        }
        if self.base_width == 0 {
            return Err(Error::Config("net.base_width must be at least 1".into()));
        }
        if !(1..=3).contains(&self.depth) {
            return Err(Error::Config(format!(
                "net.depth must be 1, 2 or 3, got {}",
                self.depth
            )));
        }
        if !(0.0..1.0).contains(&self.leaky_slope) {
            return Err(Error::Config("net.leaky_slope must be in [0, 1)".into()));
        }
        Ok(())
    }

    /// Spatial sizes must be divisible by this.
    pub fn stride(&self) -> usize {
        1 << self.depth
    }

    /// Convolutions in declaration order: stem, `depth` down-convolutions,
    /// `depth` up-convolutions, the skip fusion and the 1x1 head.
    pub fn layout(&self) -> Vec<ConvSlot> {
        let b = self.base_width;
        let mut dims = vec![(self.input_channels, b, 3)];
        for l in 1..=self.depth {
            dims.push((b << (l - 1), b << l, 3));
        }
        for l in (1..=self.depth).rev() {
            dims.push((b << l, b << (l - 1), 3));
        }
        dims.push((2 * b, b, 3));
        dims.push((b, 1, 1));
        let mut offset = 0;
        dims.into_iter()
            .map(|(in_c, out_c, k)| {
                let slot = ConvSlot {
                    in_c,
                    out_c,
                    k,
                    offset,
                };
                offset += slot.len();
                slot
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layout().iter().map(ConvSlot::len).sum()
    }
}

/// Skip-connected convolutional encoder-decoder producing one output map.
///
/// ```text
/// x -> stem -> s ----------------------------------+
///              s -> [pool -> conv]*depth            |
///                -> [upsample -> conv]*depth -> concat(., s) -> conv -> 1x1 head
/// ```
/// Every convolution except the head is followed by a leaky rectifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyNet {
    cfg: TinyNetConfig,
    layout: Vec<ConvSlot>,
    pub params: Vec<f64>,
}

/// Intermediate values kept by the forward pass for the backward pass.
#[derive(Debug)]
pub struct ForwardCache {
    conv_inputs: Vec<Tensor>,
    pre_acts: Vec<Tensor>,
}

impl ForwardCache {
    /// Smallest rectifier input magnitude seen in the pass.
    pub fn min_abs_preactivation(&self) -> f64 {
        self.pre_acts
            .iter()
            .flat_map(|t| t.data.iter())
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }
}

impl TinyNet {
    /// He-scaled normal weights, zero biases and a zero head, so the initial
    /// prediction is the zero map.
    pub fn init(cfg: TinyNetConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let layout = cfg.layout();
        let mut params = vec![0.0; cfg.param_count()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for slot in &layout[..layout.len() - 1] {
            let std = (2.0 / slot.fan_in() as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            for p in &mut params[slot.offset..slot.offset + slot.weight_len()] {
                *p = normal.sample(&mut rng);
            }
        }
        Ok(Self {
            cfg,
            layout,
            params,
        })
    }

    pub fn from_params(cfg: TinyNetConfig, params: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        if params.len() != cfg.param_count() {
            return Err(Error::ShapeMismatch {
                expected: vec![cfg.param_count()],
                actual: vec![params.len()],
            });
        }
        Ok(Self {
            cfg,
            layout: cfg.layout(),
            params,
        })
    }

    pub fn config(&self) -> &TinyNetConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &[ConvSlot] {
        &self.layout
    }

    pub fn check_input(&self, x: &Tensor) -> Result<()> {
        let [n, c, h, w] = x.shape;
        let s = self.cfg.stride();
        if n == 0 || c != self.cfg.input_channels || h == 0 || w == 0 || h % s != 0 || w % s != 0 {
            let round = |v: usize| v.div_ceil(s).max(1) * s;
            return Err(Error::ShapeMismatch {
                expected: vec![n.max(1), self.cfg.input_channels, round(h), round(w)],
                actual: x.shape.to_vec(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_cached(x)?.0)
    }

    pub fn forward_cached(&self, x: &Tensor) -> Result<(Tensor, ForwardCache)> {
        self.check_input(x)?;
        let slope = self.cfg.leaky_slope;
        let d = self.cfg.depth;
        let mut cache = ForwardCache {
            conv_inputs: Vec::with_capacity(self.layout.len()),
            pre_acts: Vec::with_capacity(self.layout.len() - 1),
        };
        let conv_act = |input: Tensor, slot: &ConvSlot, cache: &mut ForwardCache| {
            let z = conv_forward(&input, &self.params, slot);
            let a = leaky_forward(&z, slope);
            cache.conv_inputs.push(input);
            cache.pre_acts.push(z);
            a
        };

        let skip = conv_act(x.clone(), &self.layout[0], &mut cache);
        let mut cur = skip.clone();
        for l in 1..=d {
            cur = conv_act(avgpool_forward(&cur), &self.layout[l], &mut cache);
        }
        for j in 0..d {
            cur = conv_act(upsample_forward(&cur), &self.layout[d + 1 + j], &mut cache);
        }
        let fused = conv_act(concat(&cur, &skip), &self.layout[2 * d + 1], &mut cache);
        let head = &self.layout[2 * d + 2];
        let out = conv_forward(&fused, &self.params, head);
        cache.conv_inputs.push(fused);
        Ok((out, cache))
    }

    /// Gradient of the loss w.r.t. every parameter, given the gradient
    /// w.r.t. the output map.
    pub fn backward(&self, cache: &ForwardCache, dout: &Tensor) -> Vec<f64> {
        let slope = self.cfg.leaky_slope;
        let d = self.cfg.depth;
        let b = self.cfg.base_width;
        let mut grads = vec![0.0; self.params.len()];
        let head = 2 * d + 2;

        let back = |idx: usize, g: &Tensor, grads: &mut Vec<f64>, need: bool| {
            conv_backward(
                &cache.conv_inputs[idx],
                g,
                &self.params,
                &self.layout[idx],
                grads,
                need,
            )
        };

        let mut g = back(head, dout, &mut grads, true).expect("requested");
        g = leaky_backward(&cache.pre_acts[head - 1], &g, slope);
        let g_cat = back(head - 1, &g, &mut grads, true).expect("requested");
        let (mut g, g_skip) = split(&g_cat, b);
        for idx in (d + 1..=2 * d).rev() {
            g = leaky_backward(&cache.pre_acts[idx], &g, slope);
            g = upsample_backward(&back(idx, &g, &mut grads, true).expect("requested"));
        }
        for idx in (1..=d).rev() {
            g = leaky_backward(&cache.pre_acts[idx], &g, slope);
            g = avgpool_backward(&back(idx, &g, &mut grads, true).expect("requested"));
        }
        for (a, s) in g.data.iter_mut().zip(&g_skip.data) {
            *a += s;
        }
        g = leaky_backward(&cache.pre_acts[0], &g, slope);
        back(0, &g, &mut grads, false);
        grads
    }
}
