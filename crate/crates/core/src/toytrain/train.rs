use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ensure_parent;
use crate::toytrain::loss::{mse, mse_with_grad, smooth_l1_with_grad, LossConfig};
use crate::toytrain::net::{TinyNet, TinyNetConfig};
use crate::toytrain::optim::{adamw_step, AdamState, OptimConfig};
use crate::toytrain::readout::SoftArgmax;
use crate::toytrain::tensor::Tensor;

/// Samples stored channels-first, with per-sample attention targets and
/// driving commands (either may be absent).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub chw: [usize; 3],
    pub inputs: Vec<Vec<f64>>,
    /// `H x W` target maps.
    pub maps: Vec<Vec<f64>>,
    /// `[steering, velocity]`-like 2-vectors in `[-1, 1]`.
    pub commands: Vec<[f64; 2]>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            chw: self.chw,
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            maps: if self.maps.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&i| self.maps[i].clone()).collect()
            },
            commands: if self.commands.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&i| self.commands[i]).collect()
            },
        }
    }

    pub fn validate(&self, objective: Objective) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let per: usize = self.chw.iter().product();
        let plane = self.chw[1] * self.chw[2];
        if let Some(bad) = self.inputs.iter().find(|s| s.len() != per) {
            return Err(Error::ShapeMismatch {
                expected: self.chw.to_vec(),
                actual: vec![bad.len()],
            });
        }
        let (len, what) = match objective {
            Objective::Restoration => (self.maps.len(), "attention maps"),
            Objective::Command => (self.commands.len(), "commands"),
        };
        if len != self.len() {
            return Err(Error::Config(format!(
                "dataset has {} inputs but {len} {what}",
                self.len()
            )));
        }
        if let Some(bad) = self.maps.iter().find(|m| m.len() != plane) {
            return Err(Error::ShapeMismatch {
                expected: vec![1, self.chw[1], self.chw[2]],
                actual: vec![bad.len()],
            });
        }
        Ok(())
    }

    fn input_batch(&self, idx: &[usize]) -> Tensor {
        let refs: Vec<&[f64]> = idx.iter().map(|&i| self.inputs[i].as_slice()).collect();
        Tensor::stack(&refs, self.chw).expect("validated")
    }

    fn map_batch(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().flat_map(|&i| self.maps[i].iter().copied()).collect()
    }
}

/// What the network output is trained against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Output map vs. target attention map under smooth L1.
    #[default]
    Restoration,
    /// Soft-argmax of the output map vs. the 2-vector command under MSE.
    Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub net: TinyNetConfig,
    pub optim: OptimConfig,
    pub loss: LossConfig,
    pub objective: Objective,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            net: TinyNetConfig::default(),
            optim: OptimConfig::default(),
            loss: LossConfig::default(),
            objective: Objective::Restoration,
            epochs: 60,
            batch_size: 16,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.net.validate()?;
        self.optim.validate()?;
        self.loss.validate()?;
        if self.batch_size == 0 {
            return Err(Error::Config("train.batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean training loss over the epoch's samples.
    pub loss: f64,
    pub lr: f64,
    /// Held-out error after the epoch, when an evaluation set was given.
    pub eval: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
}

impl TrainLog {
    pub fn losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.loss).collect()
    }

    pub fn eval_errors(&self) -> Vec<f64> {
        self.epochs.iter().filter_map(|e| e.eval).collect()
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "epoch,loss,lr")?;
        for e in &self.epochs {
            writeln!(w, "{},{},{}", e.epoch, e.loss, e.lr)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        ensure_parent(path)?;
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(&mut f).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: TinyNet,
    pub log: TrainLog,
}

/// Loss and parameter gradient for one batch.
pub fn batch_loss_and_grad(
    net: &TinyNet,
    data: &Dataset,
    idx: &[usize],
    objective: Objective,
    loss: &LossConfig,
) -> Result<(f64, Vec<f64>)> {
    let x = data.input_batch(idx);
    let (out, cache) = net.forward_cached(&x)?;
    let (l, dout) = match objective {
        Objective::Restoration => {
            let target = data.map_batch(idx);
            let (l, g) = smooth_l1_with_grad(&out.data, &target, loss.beta)?;
            (l, Tensor::from_vec(out.shape, g)?)
        }
        Objective::Command => {
            let sa = SoftArgmax::forward(&out);
            let pred: Vec<f64> = sa.coords.iter().flatten().copied().collect();
            let target: Vec<f64> = idx.iter().flat_map(|&i| data.commands[i]).collect();
            let (l, g) = mse_with_grad(&pred, &target)?;
            let dcoords: Vec<[f64; 2]> = g.chunks(2).map(|c| [c[0], c[1]]).collect();
            (l, sa.backward(&dcoords))
        }
    };
    Ok((l, net.backward(&cache, &dout)))
}

/// Soft-argmax read-out of every sample's output map.
pub fn predict_commands(net: &TinyNet, data: &Dataset, batch_size: usize) -> Result<Vec<[f64; 2]>> {
    let all: Vec<usize> = (0..data.len()).collect();
    let mut out = Vec::with_capacity(data.len());
    for idx in all.chunks(batch_size.max(1)) {
        let y = net.forward(&data.input_batch(idx))?;
        out.extend(SoftArgmax::forward(&y).coords);
    }
    Ok(out)
}

pub fn predict_maps(net: &TinyNet, data: &Dataset, batch_size: usize) -> Result<Vec<Vec<f64>>> {
    let all: Vec<usize> = (0..data.len()).collect();
    let mut out = Vec::with_capacity(data.len());
    for idx in all.chunks(batch_size.max(1)) {
        let y = net.forward(&data.input_batch(idx))?;
        out.extend((0..idx.len()).map(|b| y.plane(b, 0).to_vec()));
    }
    Ok(out)
}

/// Held-out error: mean smooth L1 for restoration, command MSE otherwise.
pub fn evaluate(net: &TinyNet, data: &Dataset, cfg: &TrainConfig) -> Result<f64> {
    data.validate(cfg.objective)?;
    match cfg.objective {
        Objective::Restoration => {
            let pred: Vec<f64> = predict_maps(net, data, cfg.batch_size)?.concat();
            let target: Vec<f64> = data.maps.concat();
            crate::toytrain::loss::smooth_l1(&pred, &target, cfg.loss.beta)
        }
        Objective::Command => {
            let pred: Vec<f64> = predict_commands(net, data, cfg.batch_size)?.concat();
            let target: Vec<f64> = data.commands.concat();
            mse(&pred, &target)
        }
    }
}

/// Trains from a seeded initialization. Each epoch visits the samples in a
/// fresh seed-determined order; the log holds one entry per epoch.
pub fn train(data: &Dataset, cfg: &TrainConfig, seed: u64) -> Result<TrainOutcome> {
    train_with_eval(data, None, cfg, seed)
}

pub fn train_with_eval(
    data: &Dataset,
    eval: Option<&Dataset>,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    data.validate(cfg.objective)?;
    if data.chw[0] != cfg.net.input_channels {
        return Err(Error::ShapeMismatch {
            expected: vec![cfg.net.input_channels, data.chw[1], data.chw[2]],
            actual: data.chw.to_vec(),
        });
    }
    if let Some(e) = eval {
        e.validate(cfg.objective)?;
    }
    let mut net = TinyNet::init(cfg.net, seed)?;
    net.check_input(&Tensor::zeros([1, data.chw[0], data.chw[1], data.chw[2]]))?;
    // Shuffling draws from its own stream so it does not alias the init.
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut state = AdamState::new(net.params.len());
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut step = 0u64;
    let mut log = TrainLog::default();

    for epoch in 0..cfg.epochs {
        let lr = cfg.optim.lr_at(epoch, cfg.epochs);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for idx in order.chunks(cfg.batch_size) {
            let (l, g) = batch_loss_and_grad(&net, data, idx, cfg.objective, &cfg.loss)?;
            step += 1;
            adamw_step(&mut net.params, &g, &mut state, &cfg.optim, lr, step);
            total += l * idx.len() as f64;
        }
        let eval = eval.map(|e| evaluate(&net, e, cfg)).transpose()?;
        let entry = EpochLog {
            epoch,
            loss: total / data.len() as f64,
            lr,
            eval,
        };
        log::debug!("epoch {epoch}: loss {:.6} lr {:.3e}", entry.loss, lr);
        log.epochs.push(entry);
    }
    Ok(TrainOutcome { net, log })
}

/// First `channels` channels of an 8-bit frame, channels-first, scaled to `[0, 1]`.
pub fn frame_to_chw(frame: &crate::geometry::Frame, channels: usize) -> Vec<f64> {
    let c = frame.channels;
    let plane = frame.width * frame.height;
    let mut out = vec![0.0; channels.min(c) * plane];
    for (i, px) in frame.data.chunks_exact(c).enumerate() {
        for ch in 0..channels.min(c) {
            out[ch * plane + i] = px[ch] as f64 / 255.0;
        }
    }
    out
}
