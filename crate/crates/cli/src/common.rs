use std::path::{Path, PathBuf};

use attn_core::ingest::{crop_upper_third, upper_third_rows, FrameManifestEntry};
use attn_core::io::read_rgb;
use attn_core::{BoxAnnotation, Error, FocusPointSet, Frame, PipelineConfig, Result};

/// File name of a frame's image or map.
pub fn frame_name(index: u64) -> String {
    format!("{index:06}.png")
}

pub fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingInput(path.to_path_buf()))
    }
}

/// Reads a manifest frame as RGB, checking its size against the manifest
/// and dropping the upper third when the config asks for it.
pub fn load_frame(cfg: &PipelineConfig, manifest: &Path, entry: &FrameManifestEntry) -> Result<Frame> {
    let path = cfg.io.resolve(manifest, &entry.path);
    let frame = read_rgb(&path)?;
    entry.geometry().ensure_same(frame.geometry())?;
    Ok(if cfg.ingest.crop_upper_third {
        crop_upper_third(&frame, &FocusPointSet::empty(entry.frame_index)).0
    } else {
        frame
    })
}

/// Moves full-frame boxes into cropped-frame coordinates, clipping at the cut.
pub fn crop_boxes(cfg: &PipelineConfig, boxes: &[BoxAnnotation], frame_height: usize) -> Vec<BoxAnnotation> {
    if !cfg.ingest.crop_upper_third {
        return boxes.to_vec();
    }
    let cut = upper_third_rows(frame_height) as f64;
    boxes
        .iter()
        .filter_map(|b| {
            let top = (b.y - cut).max(0.0);
            let bottom = b.y + b.h - cut;
            (bottom > top).then_some(BoxAnnotation {
                y: top,
                h: bottom - top,
                ..*b
            })
        })
        .collect()
}

pub fn points_path(maps_dir: &Path) -> PathBuf {
    maps_dir.join("points.jsonl")
}
