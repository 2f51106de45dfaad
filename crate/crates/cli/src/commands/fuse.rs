use std::collections::BTreeMap;
use std::path::PathBuf;

use attn_core::fusion::{fuse_channel, mark_points, DatasetRecord};
use attn_core::ingest::read_manifest;
use attn_core::io::{read_jsonl, read_map_png, write_jsonl, write_png};
use attn_core::{BoxAnnotation, Error, FocusPointSet, FusionMode, PipelineConfig, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{crop_boxes, frame_name, load_frame, points_path, require};

#[derive(Args, Debug)]
pub struct FuseArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory of `attn build` for this sequence.
    #[arg(long)]
    pub maps: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Box annotations (JSONL, image_id = frame_index) for channel mode.
    #[arg(long)]
    pub boxes: Option<PathBuf>,
    /// Driving commands (JSONL {frame_index, steering, velocity}); required
    /// in marked mode.
    #[arg(long)]
    pub commands: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandRecord {
    pub frame_index: u64,
    pub steering: f64,
    pub velocity: f64,
}

pub fn run(cfg: &PipelineConfig, args: &FuseArgs) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    require(&args.maps)?;
    let records = match cfg.fusion.mode {
        FusionMode::Channel => fuse_channels(cfg, args, &manifest)?,
        FusionMode::Marked => fuse_marks(cfg, args, &manifest)?,
    };
    write_jsonl(&args.out.join("dataset.jsonl"), &records)?;
    log::info!("{} fused samples in {}", records.len(), args.out.display());
    Ok(())
}

fn fuse_channels(
    cfg: &PipelineConfig,
    args: &FuseArgs,
    manifest: &[attn_core::ingest::FrameManifestEntry],
) -> Result<Vec<DatasetRecord>> {
    let boxes_ref = match &args.boxes {
        Some(path) => {
            let boxes: Vec<BoxAnnotation> = read_jsonl(path)?;
            let height = manifest.first().map_or(0, |e| e.height);
            write_jsonl(&args.out.join("boxes.jsonl"), &crop_boxes(cfg, &boxes, height))?;
            Some("boxes.jsonl".to_string())
        }
        None => None,
    };
    manifest
        .par_iter()
        .map(|entry| {
            let name = frame_name(entry.frame_index);
            let image = load_frame(cfg, &args.manifest, entry)?;
            let att = read_map_png(&args.maps.join(&name))?;
            let fused = fuse_channel(&image, &att)?;
            write_png(&args.out.join(&name), &fused.image)?;
            Ok(DatasetRecord::Detection {
                path: name,
                boxes_ref: boxes_ref.clone(),
            })
        })
        .collect()
}

fn fuse_marks(
    cfg: &PipelineConfig,
    args: &FuseArgs,
    manifest: &[attn_core::ingest::FrameManifestEntry],
) -> Result<Vec<DatasetRecord>> {
    let Some(commands_path) = &args.commands else {
        return Err(Error::Config("marked fusion needs --commands".into()));
    };
    let commands: BTreeMap<u64, CommandRecord> = read_jsonl::<CommandRecord>(commands_path)?
        .into_iter()
        .map(|c| (c.frame_index, c))
        .collect();
    let points: BTreeMap<u64, FocusPointSet> = read_jsonl::<FocusPointSet>(&points_path(&args.maps))?
        .into_iter()
        .map(|s| (s.frame_index, s))
        .collect();
    manifest
        .par_iter()
        .map(|entry| {
            let idx = entry.frame_index;
            let command = commands.get(&idx).ok_or_else(|| {
                Error::Config(format!("{}: no command for frame {idx}", commands_path.display()))
            })?;
            let empty = FocusPointSet::empty(idx);
            let set = points.get(&idx).unwrap_or(&empty);
            let name = frame_name(idx);
            let image = load_frame(cfg, &args.manifest, entry)?;
            let fused = mark_points(&image, set, &cfg.fusion.mark)?;
            write_png(&args.out.join(&name), &fused.image)?;
            Ok(DatasetRecord::Imitation {
                path: name,
                mode: FusionMode::Marked,
                steering: command.steering,
                velocity: command.velocity,
            })
        })
        .collect()
}
