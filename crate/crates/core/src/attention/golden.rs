//! Raw float map files used as golden references in tests.
//!
//! Layout (little-endian): `b"ATTN"`, `u32` height, `u32` width, `u32`
//! reserved (zero), then `height * width` `f32` values row by row.

use std::fs;
use std::path::Path;

use crate::attention::{AttentionMap, MapKind};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::io::ensure_parent;

pub const GOLDEN_MAGIC: [u8; 4] = *b"ATTN";
const HEADER_LEN: usize = 16;

pub fn encode_golden(map: &AttentionMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * map.values.len());
    out.extend_from_slice(&GOLDEN_MAGIC);
    out.extend_from_slice(&(map.height as u32).to_le_bytes());
    out.extend_from_slice(&(map.width as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for &v in &map.values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_golden(bytes: &[u8], kind: MapKind) -> std::result::Result<AttentionMap, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!("{} bytes is shorter than the header", bytes.len()));
    }
    if bytes[..4] != GOLDEN_MAGIC {
        return Err("bad magic".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (height, width) = (word(4), word(8));
    let body = &bytes[HEADER_LEN..];
    if body.len() != height * width * 4 {
        return Err(format!(
            "expected {} value bytes for {height}x{width}, found {}",
            height * width * 4,
            body.len()
        ));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    AttentionMap::from_values(Geometry::new(height, width), values, kind).map_err(|e| e.to_string())
}

pub fn write_golden(path: &Path, map: &AttentionMap) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, encode_golden(map)).map_err(|e| Error::io(path, e))
}

pub fn read_golden(path: &Path, kind: MapKind) -> Result<AttentionMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_golden(&bytes, kind).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })
}
