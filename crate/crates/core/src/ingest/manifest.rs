use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::io::{open, parse_jsonl};

/// One extracted video frame and its capture time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameManifestEntry {
    pub frame_index: u64,
    pub t_ns: i64,
    pub path: String,
    pub width: usize,
    pub height: usize,
}

impl FrameManifestEntry {
    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.height, self.width)
    }
}

/// Parses a frame manifest; indices must run 0, 1, 2, ... and times must not
/// go backwards.
pub fn parse_manifest<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<FrameManifestEntry>> {
    let records: Vec<(usize, FrameManifestEntry)> = parse_jsonl(reader, source_name)?;
    let mut prev_t = i64::MIN;
    for (expected, (line, entry)) in records.iter().enumerate() {
        let fail = |reason: String| Error::Ordering {
            source_name: source_name.to_string(),
            line: *line,
            reason,
        };
        if entry.frame_index != expected as u64 {
            return Err(fail(format!(
                "frame_index {} where {expected} was expected",
                entry.frame_index
            )));
        }
        if entry.t_ns < prev_t {
            return Err(fail(format!("t_ns {} precedes {prev_t}", entry.t_ns)));
        }
        if entry.width == 0 || entry.height == 0 {
            return Err(fail("frame has zero area".into()));
        }
        prev_t = entry.t_ns;
    }
    Ok(records.into_iter().map(|(_, e)| e).collect())
}

pub fn read_manifest(path: &Path) -> Result<Vec<FrameManifestEntry>> {
    parse_manifest(open(path)?, &path.display().to_string())
}
