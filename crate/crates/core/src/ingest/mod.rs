//! Gaze recordings in, per-frame focus point sets out.

mod crop;
mod gaze;
mod manifest;
mod sync;
mod transform;

pub use crop::{crop_points, crop_upper_third, cropped_geometry, upper_third_rows};
pub use gaze::{parse_gaze, read_gaze, GazeSample};
pub use manifest::{parse_manifest, read_manifest, FrameManifestEntry};
pub use sync::{synchronize, GazeUnits, IngestConfig, IngestReport, SyncOutcome};
pub use transform::{to_camera_frame, CameraTransform, Projection};

/// One camera period at 30 FPS.
pub const DEFAULT_WINDOW_NS: i64 = 33_333_333;
pub const DEFAULT_MAX_POINTS: usize = 4;
