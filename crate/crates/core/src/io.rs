//! File helpers shared by the pipeline stages: JSONL records and PNG images.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use image::{ExtendedColorType, ImageEncoder};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::attention::QuantizedMap;
use crate::error::{Error, Result};
use crate::geometry::{Frame, Geometry};

/// Parses one JSON object per non-blank line, keeping 1-based line numbers.
pub fn parse_jsonl<T, R>(reader: R, source_name: &str) -> Result<Vec<(usize, T)>>
where
    T: DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: line_no,
            text: trimmed.to_string(),
            reason: e.to_string(),
        })?;
        out.push((line_no, value));
    }
    Ok(out)
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = open(path)?;
    Ok(parse_jsonl(reader, &path.display().to_string())?
        .into_iter()
        .map(|(_, v)| v)
        .collect())
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    ensure_parent(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

fn color_type(channels: usize) -> Option<ExtendedColorType> {
    match channels {
        1 => Some(ExtendedColorType::L8),
        3 => Some(ExtendedColorType::Rgb8),
        4 => Some(ExtendedColorType::Rgba8),
        _ => None,
    }
}

/// Writes a 1-, 3- or 4-channel frame as PNG.
pub fn write_png(path: &Path, frame: &Frame) -> Result<()> {
    let color = color_type(frame.channels).ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        reason: format!("{} channels cannot be stored as PNG", frame.channels),
    })?;
    ensure_parent(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = image::codecs::png::PngEncoder::new(BufWriter::new(file));
    encoder
        .write_image(
            &frame.data,
            frame.width as u32,
            frame.height as u32,
            color,
        )
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Reads a PNG keeping its channel layout (gray, RGB or RGBA).
pub fn read_png(path: &Path) -> Result<Frame> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let img = image::open(path).map_err(|source| match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })?;
    let geometry = Geometry::new(img.height() as usize, img.width() as usize);
    let (channels, data) = match img {
        image::DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        image::DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        image::DynamicImage::ImageRgba8(b) => (4, b.into_raw()),
        other => (3, other.to_rgb8().into_raw()),
    };
    Frame::new(geometry, channels, data)
}

/// Reads a PNG and converts it to 3-channel RGB.
pub fn read_rgb(path: &Path) -> Result<Frame> {
    let frame = read_png(path)?;
    Ok(match frame.channels {
        3 => frame,
        1 => {
            let data = frame.data.iter().flat_map(|&v| [v, v, v]).collect();
            Frame::new(frame.geometry(), 3, data)?
        }
        _ => {
            let data = frame
                .data
                .chunks_exact(frame.channels)
                .flat_map(|p| [p[0], p[1], p[2]])
                .collect();
            Frame::new(frame.geometry(), 3, data)?
        }
    })
}

pub fn write_map_png(path: &Path, map: &QuantizedMap) -> Result<()> {
    write_png(path, &map.to_frame())
}

pub fn read_map_png(path: &Path) -> Result<QuantizedMap> {
    let frame = read_png(path)?;
    if frame.channels != 1 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!(
                "attention map must be single-channel, found {} channels",
                frame.channels
            ),
        });
    }
    Ok(QuantizedMap::from_frame(&frame))
}
