//! Finite-difference verification of [`TinyNet::backward`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::toytrain::loss::{smooth_l1, smooth_l1_with_grad};
use crate::toytrain::net::{TinyNet, TinyNetConfig};
use crate::toytrain::tensor::Tensor;

/// Gradients below this magnitude are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub params: usize,
    pub max_relative_error: f64,
    /// Parameter index where the maximum was reached.
    pub worst: usize,
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

/// Compares analytic and central-difference gradients of the smooth-L1
/// restoration loss for `net` on `(x, target)`.
pub fn check_gradients(net: &TinyNet, x: &Tensor, target: &[f64], beta: f64, h: f64) -> Result<GradCheck> {
    let (out, cache) = net.forward_cached(x)?;
    let (_, dout) = smooth_l1_with_grad(&out.data, target, beta)?;
    let analytic = net.backward(&cache, &Tensor::from_vec(out.shape, dout)?);

    let mut probe = net.clone();
    let mut loss_at = |i: usize, v: f64| -> Result<f64> {
        probe.params[i] = v;
        let y = probe.forward(x)?;
        smooth_l1(&y.data, target, beta)
    };
    let mut worst = (0.0, 0);
    for (i, &a) in analytic.iter().enumerate() {
        let p = net.params[i];
        let plus = loss_at(i, p + h)?;
        let minus = loss_at(i, p - h)?;
        loss_at(i, p)?;
        let numeric = (plus - minus) / (2.0 * h);
        let err = relative_error(a, numeric);
        if err > worst.0 {
            worst = (err, i);
        }
    }
    Ok(GradCheck {
        params: analytic.len(),
        max_relative_error: worst.0,
        worst: worst.1,
    })
}

const BETA: f64 = 1.0;
const STEP: f64 = 1e-4;
/// Instances with a rectifier input or a loss residual this close to a kink
/// are redrawn: a central difference straddling a kink measures a one-sided
/// slope mix, not the derivative.
pub const KINK_MARGIN: f64 = 1e-3;
const MAX_DRAWS: usize = 1000;

/// Gradient check on a freshly drawn network: random weights everywhere
/// (head included, so every gradient is live), random input and target.
/// Draws that land within [`KINK_MARGIN`] of a non-differentiable point are
/// rejected and redrawn from the same stream.
pub fn random_gradient_check(cfg: TinyNetConfig, hw: (usize, usize), seed: u64) -> Result<GradCheck> {
    let (h, w) = hw;
    let n = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let mut net = TinyNet::init(cfg, rng.random())?;
        for p in net.params.iter_mut() {
            *p += rng.random_range(-0.3..0.3);
        }
        let x = Tensor::from_vec(
            [n, cfg.input_channels, h, w],
            (0..n * cfg.input_channels * h * w)
                .map(|_| rng.random_range(0.0..1.0))
                .collect(),
        )?;
        let target: Vec<f64> = (0..n * h * w).map(|_| rng.random_range(0.0..1.0)).collect();
        let (out, cache) = net.forward_cached(&x)?;
        let near_beta = out
            .data
            .iter()
            .zip(&target)
            .any(|(o, t)| ((o - t).abs() - BETA).abs() < KINK_MARGIN);
        if near_beta || cache.min_abs_preactivation() < KINK_MARGIN {
            continue;
        }
        return check_gradients(&net, &x, &target, BETA, STEP);
    }
    Err(crate::error::Error::Config(format!(
        "no kink-free instance in {MAX_DRAWS} draws"
    )))
}
