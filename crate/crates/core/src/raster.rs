//! Georeferenced raster grids of fire arrival times and derived fields.
//!
//! Conventions used throughout the toolkit:
//!
//! - Pixels are square. Row `i` runs north to south, column `j` west to
//!   east; the linear index is `i * nx + j` (row-major, north row first).
//! - Arrival times are stored in hours since the start of the ignition day.
//! - Never-burned pixels carry the [`BACKGROUND`] sentinel (`f32::INFINITY`)
//!   in arrival fields; normalized fields encode background as exactly 1.0.
//! - Geolocation uses a local equirectangular tangent plane at the grid
//!   origin; on domains of a few tens of kilometres the projection error is
//!   far below one pixel.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sentinel marking a never-burned pixel in an [`ArrivalField`].
pub const BACKGROUND: f32 = f32::INFINITY;

/// Meters per degree of latitude on the reference ellipsoid.
pub const M_PER_DEG_LAT: f64 = 111_132.95;

/// Meters per degree of longitude at latitude `lat_deg`.
pub fn m_per_deg_lon(lat_deg: f64) -> f64 {
    111_320.0 * lat_deg.to_radians().cos()
}

/// Normalized values at or above this threshold denormalize to background.
pub const BACKGROUND_THRESHOLD: f32 = 1.0 - 1e-6;

/// Geometry of a square-pixel raster grid centered on a lat/lon origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Pixel count east-west (columns).
    pub nx: usize,
    /// Pixel count north-south (rows).
    pub ny: usize,
    /// Meters per pixel.
    pub resolution_m: f64,
    /// Latitude of the grid center, degrees.
    pub origin_lat: f64,
    /// Longitude of the grid center, degrees.
    pub origin_lon: f64,
}

impl GridSpec {
    /// Validated constructor for production-sized grids (at least 8x8).
    pub fn new(
        nx: usize,
        ny: usize,
        resolution_m: f64,
        origin_lat: f64,
        origin_lon: f64,
    ) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::invalid(format!(
                "grid must be at least 8x8, got {nx}x{ny}"
            )));
        }
        Self::with_size_unchecked(nx, ny, resolution_m, origin_lat, origin_lon)
    }

    /// Constructor that skips the minimum-size check. Used for intermediate
    /// grids (e.g. sensor-resolution rasters of small test domains).
    pub fn with_size_unchecked(
        nx: usize,
        ny: usize,
        resolution_m: f64,
        origin_lat: f64,
        origin_lon: f64,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("grid dimensions must be positive"));
        }
        if !(resolution_m > 0.0) {
            return Err(Error::invalid(format!(
                "resolution must be positive, got {resolution_m}"
            )));
        }
        if !(origin_lat.abs() < 85.0) {
            return Err(Error::invalid(format!(
                "origin latitude must satisfy |lat| < 85, got {origin_lat}"
            )));
        }
        if !origin_lon.is_finite() {
            return Err(Error::invalid("origin longitude must be finite"));
        }
        Ok(GridSpec {
            nx,
            ny,
            resolution_m,
            origin_lat,
            origin_lon,
        })
    }

    /// The default production grid: 512x512 at 60 m (a 30.72 km square).
    pub fn production(origin_lat: f64, origin_lon: f64) -> Result<Self> {
        Self::new(512, 512, 60.0, origin_lat, origin_lon)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Domain extent east-west, meters.
    pub fn extent_x_m(&self) -> f64 {
        self.nx as f64 * self.resolution_m
    }

    /// Domain extent north-south, meters.
    pub fn extent_y_m(&self) -> f64 {
        self.ny as f64 * self.resolution_m
    }

    #[inline]
    pub fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.ny && col < self.nx);
        row * self.nx + col
    }
}

/// Maps pixel `(row, col)` to the latitude/longitude of its center.
pub fn pixel_to_latlon(spec: &GridSpec, row: usize, col: usize) -> (f64, f64) {
    let cy = (spec.ny as f64 - 1.0) / 2.0;
    let cx = (spec.nx as f64 - 1.0) / 2.0;
    let north_m = (cy - row as f64) * spec.resolution_m;
    let east_m = (col as f64 - cx) * spec.resolution_m;
    let lat = spec.origin_lat + north_m / M_PER_DEG_LAT;
    let lon = spec.origin_lon + east_m / m_per_deg_lon(spec.origin_lat);
    (lat, lon)
}

/// Maps a latitude/longitude to the pixel `(row, col)` containing it.
///
/// Inverse of [`pixel_to_latlon`] to within half a pixel. Points outside the
/// grid produce an out-of-range error.
pub fn latlon_to_pixel(spec: &GridSpec, lat: f64, lon: f64) -> Result<(usize, usize)> {
    let (rf, cf) = latlon_to_pixel_f64(spec, lat, lon);
    let row = rf.round();
    let col = cf.round();
    if row < 0.0 || col < 0.0 || row >= spec.ny as f64 || col >= spec.nx as f64 {
        return Err(Error::OutOfRange(format!(
            "({lat}, {lon}) falls outside the {}x{} domain",
            spec.nx, spec.ny
        )));
    }
    Ok((row as usize, col as usize))
}

/// Fractional pixel coordinates of a lat/lon point (no bounds check).
pub fn latlon_to_pixel_f64(spec: &GridSpec, lat: f64, lon: f64) -> (f64, f64) {
    let cy = (spec.ny as f64 - 1.0) / 2.0;
    let cx = (spec.nx as f64 - 1.0) / 2.0;
    let north_m = (lat - spec.origin_lat) * M_PER_DEG_LAT;
    let east_m = (lon - spec.origin_lon) * m_per_deg_lon(spec.origin_lat);
    (
        cy - north_m / spec.resolution_m,
        cx + east_m / spec.resolution_m,
    )
}

/// Per-pixel fire arrival times in hours; background marks never-burned.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalField {
    pub spec: GridSpec,
    values: Vec<f32>,
}

impl ArrivalField {
    /// Builds a field, checking that every value is either background or a
    /// finite non-negative number of hours.
    pub fn new(spec: GridSpec, values: Vec<f32>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid(format!(
                "expected {} values for a {}x{} grid, got {}",
                spec.len(),
                spec.nx,
                spec.ny,
                values.len()
            )));
        }
        for &v in &values {
            if v != BACKGROUND && !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "arrival values must be background or finite and >= 0, got {v}"
                )));
            }
        }
        Ok(ArrivalField { spec, values })
    }

    /// All-background field.
    pub fn background(spec: GridSpec) -> Self {
        let n = spec.len();
        ArrivalField {
            spec,
            values: vec![BACKGROUND; n],
        }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[self.spec.idx(row, col)]
    }

    #[inline]
    pub fn is_background(&self, row: usize, col: usize) -> bool {
        self.get(row, col) == BACKGROUND
    }
}

/// Per-pixel scalar in [0, 1]; background encodes as exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedField {
    pub spec: GridSpec,
    values: Vec<f32>,
}

impl NormalizedField {
    pub fn new(spec: GridSpec, values: Vec<f32>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid(format!(
                "expected {} values for a {}x{} grid, got {}",
                spec.len(),
                spec.nx,
                spec.ny,
                values.len()
            )));
        }
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "normalized values must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(NormalizedField { spec, values })
    }

    /// All-background (= 1.0) field.
    pub fn background(spec: GridSpec) -> Self {
        let n = spec.len();
        NormalizedField {
            spec,
            values: vec![1.0; n],
        }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[self.spec.idx(row, col)]
    }
}

/// Per-pixel burned-by-time-t mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BurnMask {
    pub spec: GridSpec,
    values: Vec<bool>,
}

impl BurnMask {
    pub fn new(spec: GridSpec, values: Vec<bool>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid("mask length does not match grid"));
        }
        Ok(BurnMask { spec, values })
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.values[self.spec.idx(row, col)]
    }

    pub fn count_burned(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

/// Scales arrival hours into [0, 1] by `horizon`; background maps to 1.
///
/// Values exceeding the horizon are clamped to 1.0; the second return is the
/// number of clamped pixels (a δ-shifted field can legitimately run past the
/// horizon).
pub fn normalize_with_stats(field: &ArrivalField, horizon: f64) -> Result<(NormalizedField, usize)> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let mut clamped = 0usize;
    let values = field
        .values
        .iter()
        .map(|&v| {
            if v == BACKGROUND {
                1.0
            } else {
                let n = (v as f64 / horizon) as f32;
                if n > 1.0 {
                    clamped += 1;
                    1.0
                } else {
                    n
                }
            }
        })
        .collect();
    Ok((
        NormalizedField {
            spec: field.spec.clone(),
            values,
        },
        clamped,
    ))
}

/// Scales arrival hours into [0, 1] by `horizon` (default 72).
pub fn normalize(field: &ArrivalField, horizon: f64) -> Result<NormalizedField> {
    let (out, clamped) = normalize_with_stats(field, horizon)?;
    if clamped > 0 {
        log::warn!("normalize clamped {clamped} pixels exceeding the {horizon} h horizon");
    }
    Ok(out)
}

/// Inverse of [`normalize`]: values at or above [`BACKGROUND_THRESHOLD`]
/// map to background, the rest back to hours.
pub fn denormalize(field: &NormalizedField, horizon: f64) -> Result<ArrivalField> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let values = field
        .values
        .iter()
        .map(|&n| {
            if n >= BACKGROUND_THRESHOLD {
                BACKGROUND
            } else {
                (n as f64 * horizon) as f32
            }
        })
        .collect();
    Ok(ArrivalField {
        spec: field.spec.clone(),
        values,
    })
}

/// Rounds to the nearest integer with ties going to even (used when deriving
/// pixel counts from a resolution change, so a 512.5-pixel footprint stays
/// at 512).
fn round_ties_even(x: f64) -> f64 {
    let f = x.floor();
    let frac = x - f;
    if frac > 0.5 {
        f + 1.0
    } else if frac < 0.5 {
        f
    } else if (f as i64) % 2 == 0 {
        f
    } else {
        f + 1.0
    }
}

/// Nearest source index for a target pixel center, ties to the lower index.
#[inline]
fn nearest_index(x_src: f64, n_src: usize) -> usize {
    let f = x_src.floor();
    let frac = x_src - f;
    let k = if frac > 0.5 { f + 1.0 } else { f };
    (k.max(0.0) as usize).min(n_src - 1)
}

fn resample_values(
    src: &[f32],
    src_spec: &GridSpec,
    dst_spec: &GridSpec,
) -> Vec<f32> {
    // Footprints are center-aligned; positions are in source-index units.
    let rx = dst_spec.resolution_m / src_spec.resolution_m;
    let off_x = (src_spec.extent_x_m() - dst_spec.extent_x_m()) / (2.0 * src_spec.resolution_m);
    let off_y = (src_spec.extent_y_m() - dst_spec.extent_y_m()) / (2.0 * src_spec.resolution_m);
    let mut out = Vec::with_capacity(dst_spec.len());
    for i in 0..dst_spec.ny {
        let y = (i as f64 + 0.5) * rx + off_y - 0.5;
        let si = nearest_index(y, src_spec.ny);
        for j in 0..dst_spec.nx {
            let x = (j as f64 + 0.5) * rx + off_x - 0.5;
            let sj = nearest_index(x, src_spec.nx);
            out.push(src[src_spec.idx(si, sj)]);
        }
    }
    out
}

/// Nearest-neighbor resampling to a new resolution over the same footprint.
///
/// Works both ways: coarsening (60 m to 375 m) and refining back. The target
/// pixel count is the footprint divided by the new resolution, rounded ties
/// to even; each target pixel takes the source pixel whose center is nearest
/// to its own center (ties to the lower index).
pub fn resample_nearest(field: &ArrivalField, target_resolution_m: f64) -> Result<ArrivalField> {
    if !(target_resolution_m > 0.0) {
        return Err(Error::invalid("target resolution must be positive"));
    }
    let nx = round_ties_even(field.spec.extent_x_m() / target_resolution_m).max(1.0) as usize;
    let ny = round_ties_even(field.spec.extent_y_m() / target_resolution_m).max(1.0) as usize;
    let dst_spec = GridSpec::with_size_unchecked(
        nx,
        ny,
        target_resolution_m,
        field.spec.origin_lat,
        field.spec.origin_lon,
    )?;
    resample_to(field, &dst_spec)
}

/// Nearest-neighbor resampling onto an explicit target grid.
///
/// The target footprint must match the source footprint to within one target
/// pixel in each direction.
pub fn resample_to(field: &ArrivalField, dst_spec: &GridSpec) -> Result<ArrivalField> {
    let dx = (field.spec.extent_x_m() - dst_spec.extent_x_m()).abs();
    let dy = (field.spec.extent_y_m() - dst_spec.extent_y_m()).abs();
    if dx > dst_spec.resolution_m || dy > dst_spec.resolution_m {
        return Err(Error::invalid(format!(
            "resample footprint mismatch: source {}x{} m, target {}x{} m",
            field.spec.extent_x_m(),
            field.spec.extent_y_m(),
            dst_spec.extent_x_m(),
            dst_spec.extent_y_m()
        )));
    }
    let values = resample_values(&field.values, &field.spec, dst_spec);
    Ok(ArrivalField {
        spec: dst_spec.clone(),
        values,
    })
}

/// Retains the central `new_nx` x `new_ny` window; an odd remainder leaves
/// the extra row/column on the high-index side.
pub fn crop_center(field: &ArrivalField, new_nx: usize, new_ny: usize) -> Result<ArrivalField> {
    let spec = &field.spec;
    if new_nx == 0 || new_ny == 0 || new_nx > spec.nx || new_ny > spec.ny {
        return Err(Error::invalid(format!(
            "cannot crop {}x{} to {}x{}",
            spec.nx, spec.ny, new_nx, new_ny
        )));
    }
    let off_x = (spec.nx - new_nx) / 2;
    let off_y = (spec.ny - new_ny) / 2;
    let mut values = Vec::with_capacity(new_nx * new_ny);
    for i in 0..new_ny {
        let src_row = i + off_y;
        let start = spec.idx(src_row, off_x);
        values.extend_from_slice(&field.values[start..start + new_nx]);
    }
    let dst_spec = GridSpec::with_size_unchecked(
        new_nx,
        new_ny,
        spec.resolution_m,
        spec.origin_lat,
        spec.origin_lon,
    )?;
    Ok(ArrivalField {
        spec: dst_spec,
        values,
    })
}

/// Pixels burned by time `t`: arrival value is non-background and <= t.
pub fn burn_mask(field: &ArrivalField, t: f64) -> BurnMask {
    let values = field
        .values
        .iter()
        .map(|&v| v != BACKGROUND && (v as f64) <= t)
        .collect();
    BurnMask {
        spec: field.spec.clone(),
        values,
    }
}
