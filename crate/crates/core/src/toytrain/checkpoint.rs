//! `TNET` checkpoints: magic, version, network config, then the parameters
//! in layout order. Everything little-endian.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::ensure_parent;
use crate::toytrain::net::{TinyNet, TinyNetConfig};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"TNET";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn encode_checkpoint(net: &TinyNet) -> Vec<u8> {
    let cfg = net.config();
    let mut out = Vec::with_capacity(40 + 8 * net.params.len());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for v in [cfg.input_channels, cfg.base_width, cfg.depth] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&cfg.leaky_slope.to_le_bytes());
    out.extend_from_slice(&(net.params.len() as u64).to_le_bytes());
    for p in &net.params {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn decode_checkpoint(bytes: &[u8]) -> std::result::Result<TinyNet, String> {
    let mut cur = bytes;
    let mut take = |n: usize| -> std::result::Result<&[u8], String> {
        if cur.len() < n {
            return Err("truncated checkpoint".into());
        }
        let (head, rest) = cur.split_at(n);
        cur = rest;
        Ok(head)
    };
    if take(4)? != CHECKPOINT_MAGIC {
        return Err("not a TNET checkpoint".into());
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().expect("4 bytes"));
    let version = u32_at(take(4)?);
    if version != CHECKPOINT_VERSION {
        return Err(format!("unsupported checkpoint version {version}"));
    }
    let input_channels = u32_at(take(4)?) as usize;
    let base_width = u32_at(take(4)?) as usize;
    let depth = u32_at(take(4)?) as usize;
    let leaky_slope = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
    let cfg = TinyNetConfig {
        input_channels,
        base_width,
        depth,
        leaky_slope,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    if count != cfg.param_count() {
        return Err(format!(
            "checkpoint holds {count} parameters, config needs {}",
            cfg.param_count()
        ));
    }
    let body = take(8 * count)?;
    if !cur.is_empty() {
        return Err("trailing bytes after parameters".into());
    }
    let params = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    TinyNet::from_params(cfg, params).map_err(|e| e.to_string())
}

pub fn save_checkpoint(path: &Path, net: &TinyNet) -> Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, encode_checkpoint(net)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<TinyNet> {
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingInput(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    decode_checkpoint(&bytes).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })
}
