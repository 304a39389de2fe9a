//! HF1 height field files.
//!
//! Layout: one ASCII header line
//!
//! ```text
//! HF1 <m> <n> <cell_size> <origin_x> <origin_y>\n
//! ```
//!
//! fields separated by single spaces, followed immediately by `m * n`
//! little-endian IEEE-754 `f32` elevations in row-major order (row `j`
//! holds samples `i = 0..m`). Nothing may follow the last elevation.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Point;

use super::HeightField;

const MAGIC: &str = "HF1";

pub fn encode(field: &HeightField) -> Vec<u8> {
    let header = format!(
        "{MAGIC} {} {} {} {} {}\n",
        field.width(),
        field.height(),
        field.cell_size(),
        field.origin().x,
        field.origin().y
    );
    let mut out = Vec::with_capacity(header.len() + 4 * field.elevations().len());
    out.extend_from_slice(header.as_bytes());
    for h in field.elevations() {
        out.extend_from_slice(&h.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> std::result::Result<HeightField, String> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or("missing header line")?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| "header is not ASCII")?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 6 || fields[0] != MAGIC {
        return Err(format!("bad header {header:?}"));
    }
    let m: usize = fields[1].parse().map_err(|_| "bad width")?;
    let n: usize = fields[2].parse().map_err(|_| "bad height")?;
    let cell: f64 = fields[3].parse().map_err(|_| "bad cell size")?;
    let ox: f64 = fields[4].parse().map_err(|_| "bad origin x")?;
    let oy: f64 = fields[5].parse().map_err(|_| "bad origin y")?;
    let body = &bytes[nl + 1..];
    let expected = m
        .checked_mul(n)
        .and_then(|c| c.checked_mul(4))
        .ok_or("dimensions overflow")?;
    if body.len() != expected {
        return Err(format!(
            "expected {expected} bytes of elevations, found {}",
            body.len()
        ));
    }
    let elevations = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    HeightField::new(m, n, cell, Point::new(ox, oy), elevations).map_err(|e| e.to_string())
}

pub fn read(path: &Path) -> Result<HeightField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|msg| Error::parse(path, msg))
}

pub fn write(path: &Path, field: &HeightField) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode(field)).map_err(|e| Error::io(path, e))
}
