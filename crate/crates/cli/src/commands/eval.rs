use std::collections::BTreeMap;
use std::path::PathBuf;

use attn_core::io::{read_jsonl, read_map_png, write_json};
use attn_core::metrics::{attention_error, command_mse, map_coco, EvalReport, ReportRow};
use attn_core::toytrain::{load_checkpoint, predict_commands, predict_maps, Objective};
use attn_core::{BoxAnnotation, Detection, Error, MapKind, PipelineConfig, Result};
use clap::{Args, Subcommand};

use super::fuse::CommandRecord;
use super::train::load_dataset;
use crate::common::require;

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// mAP@.5:.95 of detections against ground truth.
    Map(MapArgs),
    /// Attention-map error, between two map directories or of a model on a
    /// channel-fused dataset.
    Att(SourceArgs),
    /// Driving-command MSE, between two command files or of a model on a
    /// marked dataset.
    Mse(SourceArgs),
}

#[derive(Args, Debug)]
pub struct MapArgs {
    #[arg(long)]
    pub dets: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Also write a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    #[arg(long, requires = "reference", conflicts_with_all = ["checkpoint", "dataset"])]
    pub pred: Option<PathBuf>,
    #[arg(long = "ref", id = "reference")]
    pub reference: Option<PathBuf>,
    #[arg(long, requires = "dataset")]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, requires = "checkpoint")]
    pub dataset: Option<PathBuf>,
    /// Also write a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cfg: &PipelineConfig, cmd: &EvalCommand) -> Result<()> {
    let (report, out) = match cmd {
        EvalCommand::Map(a) => {
            let dets: Vec<Detection> = read_jsonl(&a.dets)?;
            let gts: Vec<BoxAnnotation> = read_jsonl(&a.gt)?;
            let m = map_coco(&dets, &gts);
            println!("{m:?}");
            let mut r = single("map_coco", m)?;
            r.metadata.counts.insert("detections".into(), dets.len());
            r.metadata.counts.insert("gt".into(), gts.len());
            (r, &a.out)
        }
        EvalCommand::Att(a) => (eval_attention(cfg, a)?, &a.out),
        EvalCommand::Mse(a) => (eval_commands(a)?, &a.out),
    };
    if let Some(path) = out {
        let mut report = report;
        report.metadata.config_hash = cfg.hash();
        write_json(path, &report)?;
    }
    Ok(())
}

fn single(metric: &str, value: f64) -> Result<EvalReport> {
    EvalReport::new(
        metric,
        vec![ReportRow {
            condition: "all".into(),
            metric: value,
            std: None,
        }],
    )
}

fn no_source() -> Error {
    Error::Config("give either --pred/--ref or --checkpoint/--dataset".into())
}

fn eval_attention(cfg: &PipelineConfig, a: &SourceArgs) -> Result<EvalReport> {
    let beta = cfg.train.loss.beta;
    let (mut l1, mut se, mut n) = (0.0, 0.0, 0usize);
    if let (Some(pred), Some(reference)) = (&a.pred, &a.reference) {
        require(reference)?;
        let mut names: Vec<_> = std::fs::read_dir(reference)
            .map_err(|e| Error::io(reference, e))?
            .filter_map(|e| e.ok().map(|e| e.file_name()))
            .filter(|n| n.to_string_lossy().ends_with(".png"))
            .collect();
        names.sort();
        for name in names {
            let r = read_map_png(&reference.join(&name))?.to_float(MapKind::Aggregated);
            let p = read_map_png(&pred.join(&name))?.to_float(MapKind::Aggregated);
            let e = attention_error(&p, &r, beta)?;
            l1 += e.smooth_l1;
            se += e.mse;
            n += 1;
        }
    } else if let (Some(ckpt), Some(dataset)) = (&a.checkpoint, &a.dataset) {
        let (data, objective) = load_dataset(dataset)?;
        if objective != Objective::Restoration {
            return Err(Error::Config(format!("{}: not a channel-fused dataset", dataset.display())));
        }
        let net = load_checkpoint(ckpt)?;
        let preds = predict_maps(&net, &data, cfg.train.batch_size)?;
        for (p, t) in preds.iter().zip(&data.maps) {
            l1 += attn_core::toytrain::smooth_l1(p, t, beta)?;
            se += attn_core::toytrain::mse(p, t)?;
            n += 1;
        }
    } else {
        return Err(no_source());
    }
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let (l1, se) = (l1 / n as f64, se / n as f64);
    println!("smooth_l1={l1} mse={se} maps={n}");
    let mut r = EvalReport::new(
        "attention_error",
        vec![
            ReportRow {
                condition: "smooth_l1".into(),
                metric: l1,
                std: None,
            },
            ReportRow {
                condition: "mse".into(),
                metric: se,
                std: None,
            },
        ],
    )?;
    r.metadata.counts.insert("maps".into(), n);
    Ok(r)
}

fn eval_commands(a: &SourceArgs) -> Result<EvalReport> {
    let (pred, target) = if let (Some(pred), Some(reference)) = (&a.pred, &a.reference) {
        let p: Vec<CommandRecord> = read_jsonl(pred)?;
        let t: BTreeMap<u64, CommandRecord> = read_jsonl::<CommandRecord>(reference)?
            .into_iter()
            .map(|c| (c.frame_index, c))
            .collect();
        let mut pairs = (Vec::new(), Vec::new());
        for c in &p {
            let r = t.get(&c.frame_index).ok_or_else(|| {
                Error::Config(format!("{}: no reference for frame {}", reference.display(), c.frame_index))
            })?;
            pairs.0.push([c.steering, c.velocity]);
            pairs.1.push([r.steering, r.velocity]);
        }
        pairs
    } else if let (Some(ckpt), Some(dataset)) = (&a.checkpoint, &a.dataset) {
        let (data, objective) = load_dataset(dataset)?;
        if objective != Objective::Command {
            return Err(Error::Config(format!("{}: not a marked dataset", dataset.display())));
        }
        let net = load_checkpoint(ckpt)?;
        (predict_commands(&net, &data, 16)?, data.commands)
    } else {
        return Err(no_source());
    };
    let m = command_mse(&pred, &target)?;
    println!("{m:?}");
    let mut r = single("command_mse", m)?;
    r.metadata.counts.insert("samples".into(), pred.len());
    Ok(r)
}
