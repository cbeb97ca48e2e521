//! FARR: the raster interchange format used between all pipeline stages.
//!
//! A FARR file is a single JSON header line
//! `{"nx","ny","resolution_m","origin_lat","origin_lon","units","background"}`
//! terminated by `\n`, followed by `nx * ny` 32-bit little-endian floats in
//! row-major order with the north row first.
//!
//! The `background` header field records the payload value that stands for
//! never-burned pixels: arrival files serialize background as the horizon in
//! hours, normalized files as 1.0. The row/column orientation is a toolkit
//! convention (the header carries it implicitly through this format).

use crate::error::{Error, Result};
use crate::raster::{ArrivalField, GridSpec, NormalizedField, BACKGROUND};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Header line of a FARR file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarrHeader {
    pub nx: usize,
    pub ny: usize,
    pub resolution_m: f64,
    pub origin_lat: f64,
    pub origin_lon: f64,
    /// One of "hours", "normalized", or "category".
    pub units: String,
    /// Payload value that stands for background pixels.
    pub background: f32,
}

impl FarrHeader {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::with_size_unchecked(
            self.nx,
            self.ny,
            self.resolution_m,
            self.origin_lat,
            self.origin_lon,
        )
    }
}

/// Writes raw raster values with an explicit units/background convention.
pub fn write_raw(
    path: &Path,
    spec: &GridSpec,
    values: &[f32],
    units: &str,
    background: f32,
) -> Result<()> {
    if values.len() != spec.len() {
        return Err(Error::invalid("value count does not match grid"));
    }
    let header = FarrHeader {
        nx: spec.nx,
        ny: spec.ny,
        resolution_m: spec.resolution_m,
        origin_lat: spec.origin_lat,
        origin_lon: spec.origin_lon,
        units: units.to_string(),
        background,
    };
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let mut line = serde_json::to_string(&header).expect("header serializes");
    line.push('\n');
    let io_err = |e| Error::io(path.display().to_string(), e);
    w.write_all(line.as_bytes()).map_err(io_err)?;
    for &v in values {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Reads a FARR file back as its header plus raw payload values.
pub fn read_raw(path: &Path) -> Result<(FarrHeader, Vec<f32>)> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut r = BufReader::new(file);
    let mut header_bytes = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = r
            .read(&mut byte)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        if n == 0 {
            return Err(Error::Schema(format!(
                "{}: missing newline after FARR header",
                path.display()
            )));
        }
        if byte[0] == b'\n' {
            break;
        }
        header_bytes.push(byte[0]);
        if header_bytes.len() > 4096 {
            return Err(Error::Schema(format!(
                "{}: FARR header longer than 4096 bytes",
                path.display()
            )));
        }
    }
    let header: FarrHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| Error::Schema(format!("{}: bad FARR header: {e}", path.display())))?;
    let n = header.nx * header.ny;
    let mut payload = vec![0u8; n * 4];
    r.read_exact(&mut payload)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(|e| Error::io(path.display().to_string(), e))? != 0 {
        return Err(Error::Schema(format!(
            "{}: trailing bytes after {} payload floats",
            path.display(),
            n
        )));
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok((header, values))
}

/// Writes an arrival field; background pixels serialize as `horizon` hours.
pub fn write_arrival(path: &Path, field: &ArrivalField, horizon: f64) -> Result<()> {
    let bg = horizon as f32;
    let values: Vec<f32> = field
        .values()
        .iter()
        .map(|&v| if v == BACKGROUND { bg } else { v })
        .collect();
    write_raw(path, &field.spec, &values, "hours", bg)
}

/// Reads an arrival field; payload values equal to the header background (or
/// beyond it) become the internal background sentinel.
pub fn read_arrival(path: &Path) -> Result<ArrivalField> {
    let (header, values) = read_raw(path)?;
    if header.units != "hours" {
        return Err(Error::Schema(format!(
            "{}: expected units \"hours\", got \"{}\"",
            path.display(),
            header.units
        )));
    }
    let spec = header.spec()?;
    let values = values
        .iter()
        .map(|&v| if v >= header.background { BACKGROUND } else { v })
        .collect();
    ArrivalField::new(spec, values)
}

/// Writes a normalized field (background is exactly 1.0 by construction).
pub fn write_normalized(path: &Path, field: &NormalizedField) -> Result<()> {
    write_raw(path, &field.spec, field.values(), "normalized", 1.0)
}

pub fn read_normalized(path: &Path) -> Result<NormalizedField> {
    let (header, values) = read_raw(path)?;
    if header.units != "normalized" {
        return Err(Error::Schema(format!(
            "{}: expected units \"normalized\", got \"{}\"",
            path.display(),
            header.units
        )));
    }
    let spec = header.spec()?;
    NormalizedField::new(spec, values)
}
