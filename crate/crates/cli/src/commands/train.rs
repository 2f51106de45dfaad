use std::path::{Path, PathBuf};

use attn_core::fusion::DatasetRecord;
use attn_core::io::{read_jsonl, read_png};
use attn_core::toytrain::{frame_to_chw, save_checkpoint, train, Dataset, Objective};
use attn_core::{Error, PipelineConfig, Result};
use clap::Args;
use rayon::prelude::*;

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// `dataset.jsonl` written by `attn fuse`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Receives `model.tnet` and `train_log.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

/// Loads a fused dataset. Channel-fused records train map restoration
/// (RGB in, alpha as target); marked records train command regression.
pub fn load_dataset(path: &Path) -> Result<(Dataset, Objective)> {
    let records: Vec<DatasetRecord> = read_jsonl(path)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let base = path.parent().unwrap_or(Path::new(""));
    let objective = match records[0] {
        DatasetRecord::Detection { .. } => Objective::Restoration,
        DatasetRecord::Imitation { .. } => Objective::Command,
    };
    let frames: Vec<_> = records
        .par_iter()
        .map(|r| read_png(&base.join(r.path())))
        .collect::<Result<_>>()?;
    let g = frames[0].geometry();
    let mut data = Dataset {
        chw: [3, g.height, g.width],
        inputs: Vec::with_capacity(frames.len()),
        maps: Vec::new(),
        commands: Vec::new(),
    };
    for (r, f) in records.iter().zip(&frames) {
        g.ensure_same(f.geometry())?;
        data.inputs.push(frame_to_chw(f, 3));
        match (r, objective) {
            (DatasetRecord::Detection { path, .. }, Objective::Restoration) => {
                if f.channels != 4 {
                    return Err(Error::Format {
                        path: base.join(path),
                        reason: format!("expected an RGBA image, found {} channels", f.channels),
                    });
                }
                data.maps
                    .push(f.data.chunks_exact(4).map(|px| px[3] as f64 / 255.0).collect());
            }
            (
                DatasetRecord::Imitation {
                    steering, velocity, ..
                },
                Objective::Command,
            ) => data.commands.push([*steering, *velocity]),
            _ => {
                return Err(Error::Config(format!(
                    "{}: mixes channel-fused and marked records",
                    path.display()
                )))
            }
        }
    }
    Ok((data, objective))
}

pub fn run(cfg: &PipelineConfig, args: &TrainArgs) -> Result<()> {
    let (data, objective) = load_dataset(&args.dataset)?;
    let mut tc = cfg.train;
    tc.objective = objective;
    let outcome = train(&data, &tc, cfg.child_seed("train"))?;
    save_checkpoint(&args.out.join("model.tnet"), &outcome.net)?;
    outcome.log.save_csv(&args.out.join("train_log.csv"))?;
    if let Some(last) = outcome.log.epochs.last() {
        println!("epochs={} final_loss={}", outcome.log.epochs.len(), last.loss);
    }
    Ok(())
}
