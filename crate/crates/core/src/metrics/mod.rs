//! Evaluation: detection mAP, attention-map and command errors, and the
//! brightness and training-budget sweeps.

pub mod detection;
pub mod regression;
pub mod report;
pub mod sweep;

pub use detection::{ap_table, average_precision, coco_thresholds, interpolated_ap, iou, map_coco, match_detections};
pub use regression::{attention_error, command_mse, MapError};
pub use report::{condition_label, mean_std, EvalReport, ReportMetadata, ReportRow};
pub use sweep::{
    brightness_eval_sets, brightness_sweep, budget_subsets, budget_sweep, DEFAULT_FACTORS, DEFAULT_FRACTIONS,
};
