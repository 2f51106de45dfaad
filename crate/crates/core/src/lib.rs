pub mod annotation;
pub mod attention;
pub mod augment;
pub mod config;
pub mod error;
pub mod fusion;
pub mod geometry;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod toytrain;

pub use annotation::{BBox, BoxAnnotation, Detection};
pub use config::PipelineConfig;
pub use attention::{AttentionMap, DecayConfig, MapKind, QuantizedMap};
pub use error::{Error, Result};
pub use fusion::{FusedSample, FusionMode, MarkStyle};
pub use metrics::EvalReport;
pub use geometry::{FocusPointSet, Frame, Geometry, Point};
pub use toytrain::{Dataset, TinyNet, TinyNetConfig, TrainConfig};
