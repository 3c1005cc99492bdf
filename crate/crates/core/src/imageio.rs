//! Portable graymap and raw-float-row image files.
//!
//! `encode` reads either format; frame dumps are written as binary graymaps.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::compressor::Observation;
use crate::error::{Error, Result};

/// Load an observation from a PGM (`P2`/`P5`) or a plain text file of
/// whitespace-separated float rows, one image row per line, values in [0, 1].
pub fn load_image(path: &Path) -> Result<Observation> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes)
    } else {
        parse_float_rows(std::str::from_utf8(&bytes).map_err(|_| {
            Error::Format("image file is neither a graymap nor text float rows".into())
        })?)
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<Observation> {
    let binary = bytes.starts_with(b"P5");
    let mut pos = 2;
    let mut header = [0usize; 3]; // width, height, maxval
    let mut found = 0;
    while found < 3 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated graymap header".into()));
        }
        header[found] = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Format("bad graymap header value".into()))?;
        found += 1;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Format("bad graymap dimensions".into()));
    }

    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        pos += 1; // single whitespace after maxval
        let wide = maxval > 255;
        let bytes_per = if wide { 2 } else { 1 };
        if bytes.len() < pos + count * bytes_per {
            return Err(Error::Format("truncated graymap data".into()));
        }
        for i in 0..count {
            let raw = if wide {
                u32::from(bytes[pos + 2 * i]) << 8 | u32::from(bytes[pos + 2 * i + 1])
            } else {
                u32::from(bytes[pos + i])
            };
            pixels.push((raw as f64 / maxval as f64) as f32);
        }
    } else {
        let text = std::str::from_utf8(&bytes[pos..])
            .map_err(|_| Error::Format("non-ascii data in P2 graymap".into()))?;
        for token in text.split_ascii_whitespace().take(count) {
            let raw: u32 = token
                .parse()
                .map_err(|_| Error::Format(format!("bad graymap sample '{token}'")))?;
            pixels.push((f64::from(raw) / maxval as f64) as f32);
        }
        if pixels.len() != count {
            return Err(Error::Format("truncated graymap data".into()));
        }
    }
    // clamp rounding overshoot from odd maxval scaling
    for p in &mut pixels {
        *p = p.clamp(0.0, 1.0);
    }
    Observation::new(pixels, width, height)
}

fn parse_float_rows(text: &str) -> Result<Observation> {
    let mut rows: Vec<Vec<f32>> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Vec<f32> = trimmed
            .split_ascii_whitespace()
            .map(|t| {
                t.parse::<f32>()
                    .map_err(|_| Error::Format(format!("bad float '{t}'")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Format("ragged float rows".into()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty image file".into()));
    }
    let width = rows[0].len();
    let height = rows.len();
    Observation::new(rows.concat(), width, height)
}

/// Write an observation as a binary graymap, maxval 255.
pub fn write_pgm(path: &Path, obs: &Observation) -> Result<()> {
    let mut out = Vec::with_capacity(obs.len() + 32);
    write!(out, "P5\n{} {}\n255\n", obs.width(), obs.height())?;
    for p in obs.pixels() {
        out.push((p * 255.0).round().clamp(0.0, 255.0) as u8);
    }
    fs::write(path, out)?;
    Ok(())
}
