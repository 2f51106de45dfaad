use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Point};
use crate::ingest::{
    to_camera_frame, CameraTransform, FrameManifestEntry, GazeSample, Projection,
    DEFAULT_MAX_POINTS, DEFAULT_WINDOW_NS,
};

/// How raw tracker coordinates are expressed before the homography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazeUnits {
    /// Already in tracker pixels.
    #[default]
    Pixels,
    /// In `[0, 1]`, scaled by the frame width/height first.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestConfig {
    /// Full association window; a gaze sample joins a frame when
    /// `|t_gaze - t_frame| <= window_ns / 2`.
    pub window_ns: i64,
    pub max_points: usize,
    pub transform: CameraTransform,
    pub units: GazeUnits,
    /// Drop the top third of every frame before rendering.
    pub crop_upper_third: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            window_ns: DEFAULT_WINDOW_NS,
            max_points: DEFAULT_MAX_POINTS,
            transform: CameraTransform::identity(),
            units: GazeUnits::Pixels,
            crop_upper_third: true,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_ns < 0 {
            return Err(Error::Config("ingest.window_ns must be non-negative".into()));
        }
        if self.max_points == 0 {
            return Err(Error::Config("ingest.max_points must be at least 1".into()));
        }
        Ok(())
    }
}

/// Discard counts, written next to the rendered maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub discarded_out_of_frame: u64,
    pub discarded_invalid: u64,
    pub discarded_degenerate: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncOutcome {
    /// One set per manifest entry, in manifest order.
    pub sets: Vec<FocusPointSet>,
    pub report: IngestReport,
}

/// Projects every gaze sample into the camera frame and assigns the in-frame
/// ones to frames by timestamp.
///
/// Each frame keeps at most `max_points` of its samples, preferring the most
/// recent; frames without gaze get an empty set. Runs as a single merge pass
/// over the two time-ordered streams.
pub fn synchronize(
    gaze: &[GazeSample],
    manifest: &[FrameManifestEntry],
    cfg: &IngestConfig,
) -> Result<SyncOutcome> {
    cfg.validate()?;
    let mut report = IngestReport::default();
    let Some(first) = manifest.first() else {
        return Ok(SyncOutcome {
            sets: Vec::new(),
            report,
        });
    };
    let geometry = first.geometry();
    for entry in manifest {
        geometry.ensure_same(entry.geometry())?;
    }
    if let Some(i) = manifest.windows(2).position(|w| w[1].t_ns < w[0].t_ns) {
        return Err(Error::Ordering {
            source_name: "manifest".into(),
            line: i + 2,
            reason: "frame timestamps must not decrease".into(),
        });
    }
    if let Some(i) = gaze.windows(2).position(|w| w[1].t_ns <= w[0].t_ns) {
        return Err(Error::Ordering {
            source_name: "gaze".into(),
            line: i + 2,
            reason: "gaze timestamps must strictly increase".into(),
        });
    }

    let tf = match cfg.units {
        GazeUnits::Pixels => cfg.transform,
        GazeUnits::Normalized => {
            let scale = CameraTransform::new([
                [geometry.width as f64, 0.0, 0.0],
                [0.0, geometry.height as f64, 0.0],
                [0.0, 0.0, 1.0],
            ])?;
            cfg.transform.then_after(&scale)
        }
    };

    let mut kept: Vec<(i64, Point)> = Vec::with_capacity(gaze.len());
    for s in gaze {
        match to_camera_frame(s, &tf, geometry) {
            Projection::Inside(p) => kept.push((s.t_ns, p)),
            Projection::Invalid => report.discarded_invalid += 1,
            Projection::OutOfFrame => report.discarded_out_of_frame += 1,
            Projection::Degenerate => report.discarded_degenerate += 1,
        }
    }

    let window = i128::from(cfg.window_ns);
    let mut start = 0;
    let mut sets = Vec::with_capacity(manifest.len());
    for entry in manifest {
        let t_frame = i128::from(entry.t_ns);
        while start < kept.len() && 2 * (t_frame - i128::from(kept[start].0)) > window {
            start += 1;
        }
        let mut end = start;
        while end < kept.len() && 2 * (i128::from(kept[end].0) - t_frame) <= window {
            end += 1;
        }
        let lo = end.saturating_sub(cfg.max_points).max(start);
        let points = kept[lo..end].iter().map(|&(_, p)| p).collect();
        sets.push(FocusPointSet::new(entry.frame_index, points));
    }
    Ok(SyncOutcome { sets, report })
}
