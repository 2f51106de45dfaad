use std::path::PathBuf;

use attn_core::attention::aggregate_sequence;
use attn_core::ingest::{cropped_geometry, crop_points, read_gaze, read_manifest, synchronize};
use attn_core::io::{write_json, write_jsonl, write_map_png};
use attn_core::{Error, FocusPointSet, PipelineConfig, Result};
use clap::Args;
use rayon::prelude::*;

use crate::common::{frame_name, points_path};

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Gaze samples, JSONL {t_ns, x, y, valid}.
    #[arg(long)]
    pub gaze: PathBuf,
    /// Frame manifest, JSONL {frame_index, t_ns, path, width, height}.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Sequence name; maps go to `<out>/<seq>/`.
    #[arg(long, default_value = "seq")]
    pub seq: String,
}

pub fn run(cfg: &PipelineConfig, args: &BuildArgs) -> Result<()> {
    let gaze = read_gaze(&args.gaze)?;
    let manifest = read_manifest(&args.manifest)?;
    let Some(first) = manifest.first() else {
        return Err(Error::Config(format!("{}: no frames", args.manifest.display())));
    };
    let outcome = synchronize(&gaze, &manifest, &cfg.ingest)?;
    let full = first.geometry();
    let (geometry, sets): (_, Vec<FocusPointSet>) = if cfg.ingest.crop_upper_third {
        (
            cropped_geometry(full),
            outcome.sets.iter().map(|s| crop_points(s, full.height)).collect(),
        )
    } else {
        (full, outcome.sets)
    };
    let maps = aggregate_sequence(&sets, geometry, &cfg.decay)?;

    let dir = args.out.join(&args.seq);
    maps.par_iter()
        .zip(&sets)
        .try_for_each(|(map, set)| write_map_png(&dir.join(frame_name(set.frame_index)), &map.quantize()?))?;
    write_jsonl(&points_path(&dir), &sets)?;
    write_json(&dir.join("report.json"), &outcome.report)?;
    log::info!(
        "{} maps of {}x{} written to {}",
        maps.len(),
        geometry.height,
        geometry.width,
        dir.display()
    );
    println!("{}", serde_json::to_string(&outcome.report).expect("report serializes"));
    Ok(())
}
