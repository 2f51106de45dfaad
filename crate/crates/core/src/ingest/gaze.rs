use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{open, parse_jsonl};

/// A raw gaze point as recorded by the eye tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GazeSample {
    pub t_ns: i64,
    pub x: f64,
    pub y: f64,
    pub valid: bool,
}

/// Parses a JSONL gaze recording. Timestamps must be strictly increasing.
pub fn parse_gaze<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<GazeSample>> {
    let records: Vec<(usize, GazeSample)> = parse_jsonl(reader, source_name)?;
    for pair in records.windows(2) {
        let ((_, prev), (line, cur)) = (&pair[0], &pair[1]);
        if cur.t_ns <= prev.t_ns {
            return Err(Error::Ordering {
                source_name: source_name.to_string(),
                line: *line,
                reason: format!(
                    "timestamp {} does not increase past {}",
                    cur.t_ns, prev.t_ns
                ),
            });
        }
    }
    Ok(records.into_iter().map(|(_, s)| s).collect())
}

pub fn read_gaze(path: &Path) -> Result<Vec<GazeSample>> {
    parse_gaze(open(path)?, &path.display().to_string())
}
