use std::collections::BTreeMap;
use std::path::PathBuf;

use attn_core::augment::{augment_batch, Sample};
use attn_core::ingest::read_manifest;
use attn_core::io::{read_jsonl, read_map_png, write_jsonl, write_map_png, write_png};
use attn_core::{BoxAnnotation, FocusPointSet, PipelineConfig, Result};
use clap::Args;
use rayon::prelude::*;

use crate::common::{crop_boxes, frame_name, load_frame, points_path};

#[derive(Args, Debug)]
pub struct AugmentArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory of `attn build`; attention maps and focus points are
    /// augmented along with the frames when given.
    #[arg(long)]
    pub maps: Option<PathBuf>,
    /// Box annotations (JSONL, image_id = frame_index).
    #[arg(long)]
    pub boxes: Option<PathBuf>,
    /// Receives `<index>.png`, `<index>_att.png`, `points.jsonl` and `boxes.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cfg: &PipelineConfig, args: &AugmentArgs) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    let mut boxes: BTreeMap<u64, Vec<BoxAnnotation>> = BTreeMap::new();
    if let Some(path) = &args.boxes {
        let height = manifest.first().map_or(0, |e| e.height);
        for b in crop_boxes(cfg, &read_jsonl::<BoxAnnotation>(path)?, height) {
            boxes.entry(b.image_id).or_default().push(b);
        }
    }
    let points: BTreeMap<u64, FocusPointSet> = match &args.maps {
        Some(dir) => read_jsonl::<FocusPointSet>(&points_path(dir))?
            .into_iter()
            .map(|s| (s.frame_index, s))
            .collect(),
        None => BTreeMap::new(),
    };
    let batch: Vec<Sample> = manifest
        .par_iter()
        .map(|entry| {
            let idx = entry.frame_index;
            let mut s = Sample::new(load_frame(cfg, &args.manifest, entry)?);
            if let Some(dir) = &args.maps {
                s.attention = Some(read_map_png(&dir.join(frame_name(idx)))?);
                s.points = Some(points.get(&idx).cloned().unwrap_or_else(|| FocusPointSet::empty(idx)));
            }
            s.boxes = boxes.get(&idx).cloned().unwrap_or_default();
            Ok(s)
        })
        .collect::<Result<_>>()?;

    let out = augment_batch(&batch, &cfg.augment_spec())?;
    out.par_iter().zip(&manifest).try_for_each(|(s, entry)| -> Result<()> {
        let name = frame_name(entry.frame_index);
        write_png(&args.out.join(&name), &s.image)?;
        if let Some(att) = &s.attention {
            write_map_png(&args.out.join(name.replace(".png", "_att.png")), att)?;
        }
        Ok(())
    })?;
    let all_boxes: Vec<BoxAnnotation> = out.iter().flat_map(|s| s.boxes.iter().copied()).collect();
    write_jsonl(&args.out.join("boxes.jsonl"), &all_boxes)?;
    if args.maps.is_some() {
        let sets: Vec<FocusPointSet> = out.iter().filter_map(|s| s.points.clone()).collect();
        write_jsonl(&args.out.join("points.jsonl"), &sets)?;
    }
    log::info!("{} augmented samples in {}", out.len(), args.out.display());
    Ok(())
}
