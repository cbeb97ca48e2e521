//! Data augmentation, the 11-step synthetic measurement operator, and the
//! paired training/validation dataset builder.
//!
//! The measurement operator turns a complete arrival-time field into a
//! coarse, sparse, noisy satellite-style observation: coarsen to the sensor
//! resolution, pick four overpass times, keep detections within a random
//! lookback interval of each, drop half the pixels per overpass, combine by
//! first detection, occlude a few patches, resample back, shift the unknown
//! ignition day, and normalize.
//!
//! Randomness contract: all draws come from one ChaCha stream seeded per
//! call, consumed in a fixed order (overpass times, lookback intervals,
//! per-copy knowledge masks in row-major pixel order, occlusion centers,
//! day shift). The committed golden files depend on this order.

use crate::error::{Error, Result};
use crate::farr;
use crate::raster::{
    normalize_with_stats, resample_nearest, resample_to, ArrivalField, GridSpec, NormalizedField,
    BACKGROUND,
};
use crate::rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Parameters of the synthetic measurement operator. Defaults replicate the
/// 375 m satellite active-fire product over a 72 h horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    /// Number of overpass measurement times.
    pub n_obs: usize,
    /// Overpass times are drawn uniformly from this window, hours.
    pub obs_window_h: (f64, f64),
    /// Lookback interval length is drawn uniformly from this range, hours.
    pub lookback_range_h: (f64, f64),
    /// Fraction of pixels each knowledge mask keeps.
    pub mask_keep_fraction: f64,
    /// Number of occlusion patches.
    pub n_occlusions: usize,
    /// Occlusion patch edge length, km.
    pub occlusion_size_km: f64,
    /// The unknown-ignition day shift is drawn uniformly from this range,
    /// hours.
    pub day_shift_range_h: (f64, f64),
    /// Sensor resolution, meters.
    pub sensor_resolution_m: f64,
    /// Normalization horizon, hours.
    pub horizon_h: f64,
}

impl Default for MeasurementParams {
    fn default() -> Self {
        MeasurementParams {
            n_obs: 4,
            obs_window_h: (2.0, 48.0),
            lookback_range_h: (6.0, 12.0),
            mask_keep_fraction: 0.5,
            n_occlusions: 3,
            occlusion_size_km: 3.0,
            day_shift_range_h: (0.0, 24.0),
            sensor_resolution_m: 375.0,
            horizon_h: 72.0,
        }
    }
}

impl MeasurementParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_obs == 0 {
            return Err(Error::invalid("n_obs must be >= 1"));
        }
        if !(self.obs_window_h.0 < self.obs_window_h.1)
            || !(self.lookback_range_h.0 < self.lookback_range_h.1)
            || !(self.day_shift_range_h.0 <= self.day_shift_range_h.1)
        {
            return Err(Error::invalid("measurement parameter ranges are degenerate"));
        }
        if !(self.mask_keep_fraction > 0.0 && self.mask_keep_fraction <= 1.0) {
            return Err(Error::invalid("mask_keep_fraction must be in (0, 1]"));
        }
        if !(self.horizon_h > 0.0) {
            return Err(Error::invalid("horizon must be positive"));
        }
        if !(self.sensor_resolution_m > 0.0) {
            return Err(Error::invalid("sensor resolution must be positive"));
        }
        Ok(())
    }
}

/// Parameters of the rotation/translation augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    /// Rotations are drawn uniformly from this range, degrees.
    pub rotation_range_deg: (f64, f64),
    /// Translations are drawn from a centered box of this size, km.
    pub translation_box_km: (f64, f64),
    /// Augmented samples generated per base simulation.
    pub samples_per_sim: usize,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            rotation_range_deg: (0.0, 360.0),
            translation_box_km: (9.0, 9.0),
            samples_per_sim: 500,
        }
    }
}

impl AugmentParams {
    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        if self.translation_box_km.0 * 1000.0 > spec.extent_x_m()
            || self.translation_box_km.1 * 1000.0 > spec.extent_y_m()
        {
            return Err(Error::invalid(
                "translation box does not fit inside the domain",
            ));
        }
        if self.samples_per_sim == 0 {
            return Err(Error::invalid("samples_per_sim must be >= 1"));
        }
        Ok(())
    }
}

/// Rotates the field about the grid center and then translates it by whole
/// pixels. Rotation uses inverse-mapping nearest-neighbor sampling; pixels
/// mapping outside the source, and regions vacated by the translation,
/// become background.
///
/// `rotation_deg` is counterclockwise in map view; `translation_m` is
/// (east, north) meters and must fit in the augmentation box.
pub fn augment(
    field: &ArrivalField,
    rotation_deg: f64,
    translation_m: (f64, f64),
    params: &AugmentParams,
) -> Result<ArrivalField> {
    let spec = &field.spec;
    params.validate(spec)?;
    let half_x = params.translation_box_km.0 * 1000.0 / 2.0;
    let half_y = params.translation_box_km.1 * 1000.0 / 2.0;
    if translation_m.0.abs() > half_x || translation_m.1.abs() > half_y {
        return Err(Error::invalid(format!(
            "translation ({}, {}) m outside the {}x{} km box",
            translation_m.0, translation_m.1, params.translation_box_km.0, params.translation_box_km.1
        )));
    }

    let (nx, ny) = (spec.nx, spec.ny);
    let cx = (nx as f64 - 1.0) / 2.0;
    let cy = (ny as f64 - 1.0) / 2.0;
    let theta = rotation_deg.to_radians();
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    let mut rotated = vec![BACKGROUND; nx * ny];
    for i in 0..ny {
        for j in 0..nx {
            // Work in (east, north) coordinates about the center and pull
            // each output pixel back through the inverse rotation.
            let x = j as f64 - cx;
            let y = cy - i as f64;
            let sx = cos_t * x + sin_t * y;
            let sy = -sin_t * x + cos_t * y;
            let sj = (cx + sx).round();
            let si = (cy - sy).round();
            if sj < 0.0 || si < 0.0 || sj >= nx as f64 || si >= ny as f64 {
                continue;
            }
            rotated[i * nx + j] = field.values()[si as usize * nx + sj as usize];
        }
    }

    let dx_px = (translation_m.0 / spec.resolution_m).round() as i64;
    let dy_px = (translation_m.1 / spec.resolution_m).round() as i64;
    let mut out = vec![BACKGROUND; nx * ny];
    for i in 0..ny {
        for j in 0..nx {
            let si = i as i64 + dy_px; // translating north by dy moves rows up
            let sj = j as i64 - dx_px;
            if si < 0 || sj < 0 || si >= ny as i64 || sj >= nx as i64 {
                continue;
            }
            out[i * nx + j] = rotated[si as usize * nx + sj as usize];
        }
    }
    ArrivalField::new(spec.clone(), out)
}

/// Result of one application of the measurement operator.
#[derive(Debug, Clone)]
pub struct MeasureOutcome {
    /// The arrival target after the unknown-ignition day shift, in hours.
    pub shifted_arrival: ArrivalField,
    /// The normalized synthetic measurement.
    pub measurement: NormalizedField,
    /// Overpass times drawn in step 2, sorted ascending (pre-shift hours).
    pub obs_times_h: Vec<f64>,
    /// Lookback interval lengths drawn in step 3.
    pub lookbacks_h: Vec<f64>,
    /// Day shift added to both fields in step 10.
    pub day_shift_h: f64,
}

/// Draws one knowledge mask: `true` entries survive. Masks are i.i.d. per
/// pixel; the expected surviving fraction is `keep_fraction`.
pub fn knowledge_mask(rng: &mut ChaCha8Rng, len: usize, keep_fraction: f64) -> Vec<bool> {
    (0..len).map(|_| rng.gen::<f64>() < keep_fraction).collect()
}

/// Applies the synthetic measurement operator to a complete arrival field.
///
/// Returns the day-shifted arrival target (hours) paired with the
/// normalized measurement. All randomness derives from `seed`.
pub fn measure(
    field: &ArrivalField,
    params: &MeasurementParams,
    seed: u64,
) -> Result<MeasureOutcome> {
    params.validate()?;
    if field.spec.resolution_m > params.sensor_resolution_m {
        return Err(Error::invalid(format!(
            "field resolution {} m is coarser than the sensor resolution {} m",
            field.spec.resolution_m, params.sensor_resolution_m
        )));
    }
    let mut rng = rng::stream_from(seed);

    // Step 2: overpass times, sorted ascending.
    let mut obs_times: Vec<f64> = (0..params.n_obs)
        .map(|_| rng.gen_range(params.obs_window_h.0..params.obs_window_h.1))
        .collect();
    obs_times.sort_by(f64::total_cmp);
    // Step 3: lookback interval per overpass, clipped at zero on the left.
    let lookbacks: Vec<f64> = (0..params.n_obs)
        .map(|_| rng.gen_range(params.lookback_range_h.0..params.lookback_range_h.1))
        .collect();

    // Step 1: coarsen to the sensor resolution.
    let coarse = resample_nearest(field, params.sensor_resolution_m)?;
    let nc = coarse.spec.len();

    // Steps 4-6: one masked interval detection per overpass copy.
    let mut copies: Vec<Vec<f32>> = Vec::with_capacity(params.n_obs);
    for k in 0..params.n_obs {
        let mask = knowledge_mask(&mut rng, nc, params.mask_keep_fraction);
        let t = obs_times[k];
        let lo = (t - lookbacks[k]).max(0.0);
        let copy = coarse
            .values()
            .iter()
            .zip(&mask)
            .map(|(&v, &keep)| {
                if keep && v != BACKGROUND && (v as f64) > lo && (v as f64) <= t {
                    t as f32
                } else {
                    BACKGROUND
                }
            })
            .collect();
        copies.push(copy);
    }

    // Step 7: combine by first detection (background acts as +inf).
    let mut combined = vec![BACKGROUND; nc];
    for copy in &copies {
        for (dst, &v) in combined.iter_mut().zip(copy) {
            if v < *dst {
                *dst = v;
            }
        }
    }

    // Step 8: occlusion patches, centered at random pixels, clipped.
    let patch_px =
        ((params.occlusion_size_km * 1000.0 / params.sensor_resolution_m).round() as usize).max(1);
    let (nxc, nyc) = (coarse.spec.nx, coarse.spec.ny);
    for _ in 0..params.n_occlusions {
        let ccol = rng.gen_range(0..nxc);
        let crow = rng.gen_range(0..nyc);
        let r0 = crow.saturating_sub(patch_px / 2);
        let c0 = ccol.saturating_sub(patch_px / 2);
        for i in r0..(r0 + patch_px).min(nyc) {
            for j in c0..(c0 + patch_px).min(nxc) {
                combined[i * nxc + j] = BACKGROUND;
            }
        }
    }

    // Step 9: back to the native grid.
    let combined_field = ArrivalField::new(coarse.spec.clone(), combined)?;
    let measurement_native = resample_to(&combined_field, &field.spec)?;

    // Step 10: unknown-ignition day shift, applied to both fields.
    let delta = rng.gen_range(params.day_shift_range_h.0..params.day_shift_range_h.1);
    let shift = |v: f32| {
        if v == BACKGROUND {
            BACKGROUND
        } else {
            (v as f64 + delta) as f32
        }
    };
    let shifted_arrival = ArrivalField::new(
        field.spec.clone(),
        field.values().iter().map(|&v| shift(v)).collect(),
    )?;
    let shifted_measurement = ArrivalField::new(
        field.spec.clone(),
        measurement_native.values().iter().map(|&v| shift(v)).collect(),
    )?;

    // Step 11: normalize the measurement; the arrival target is returned in
    // hours and normalized when written.
    let (measurement, _) = normalize_with_stats(&shifted_measurement, params.horizon_h)?;

    Ok(MeasureOutcome {
        shifted_arrival,
        measurement,
        obs_times_h: obs_times,
        lookbacks_h: lookbacks,
        day_shift_h: delta,
    })
}

/// One training pair on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    /// Normalized arrival raster, relative to the manifest.
    pub arrival: PathBuf,
    /// Normalized measurement raster, relative to the manifest.
    pub measurement: PathBuf,
    pub seed: u64,
    pub sim_id: usize,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
}

/// Index of all generated training pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub grid: GridSpec,
    pub horizon_h: f64,
    pub n_train: usize,
    pub n_val: usize,
    pub records: Vec<RecordEntry>,
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: bad manifest: {e}", path.display())))
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &RecordEntry> {
        self.records.iter().filter(move |r| r.split == split)
    }
}

/// Round-robin choice of validation simulations; for 20 sims at an 8000/2000
/// split this selects every fifth simulation.
fn validation_sims(n_sims: usize, n_train: usize, n_val: usize) -> Vec<bool> {
    let mut is_val = vec![false; n_sims];
    if n_val == 0 {
        return is_val;
    }
    let frac = n_val as f64 / (n_train + n_val) as f64;
    let n_val_sims = (((n_sims as f64) * frac).round() as usize).clamp(1, n_sims - 1);
    for k in 0..n_val_sims {
        let idx = (k + 1) * n_sims / n_val_sims - 1;
        is_val[idx] = true;
    }
    is_val
}

/// Builds the paired dataset: for every requested record, augments a base
/// simulation and applies the measurement operator, writing normalized FARR
/// pairs plus a manifest. Base simulations are split round-robin between
/// train and validation so no augmented pair of a validation simulation
/// leaks into training. Deterministic under `seed` regardless of worker
/// count.
pub fn build_dataset(
    sim_dir: &Path,
    out_dir: &Path,
    augment_params: &AugmentParams,
    measurement_params: &MeasurementParams,
    n_train: usize,
    n_val: usize,
    seed: u64,
) -> Result<DatasetManifest> {
    let mut sim_paths: Vec<PathBuf> = std::fs::read_dir(sim_dir)
        .map_err(|e| Error::io(sim_dir.display().to_string(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "farr").unwrap_or(false))
        .collect();
    sim_paths.sort();
    if sim_paths.is_empty() {
        return Err(Error::invalid(format!(
            "no .farr simulations found in {}",
            sim_dir.display()
        )));
    }
    if n_train == 0 {
        return Err(Error::invalid("n_train must be >= 1"));
    }
    if n_val > 0 && sim_paths.len() < 2 {
        return Err(Error::invalid(
            "need at least 2 simulations to split train and validation",
        ));
    }

    let sims: Vec<ArrivalField> = sim_paths
        .iter()
        .map(|p| farr::read_arrival(p))
        .collect::<Result<_>>()?;
    let spec = sims[0].spec.clone();
    for s in &sims {
        if s.spec != spec {
            return Err(Error::invalid("simulations use mismatched grids"));
        }
    }
    augment_params.validate(&spec)?;
    measurement_params.validate()?;

    let is_val = validation_sims(sims.len(), n_train, n_val);
    let train_sims: Vec<usize> = (0..sims.len()).filter(|&k| !is_val[k]).collect();
    let val_sims: Vec<usize> = (0..sims.len()).filter(|&k| is_val[k]).collect();
    if n_val > 0 && (train_sims.is_empty() || val_sims.is_empty()) {
        return Err(Error::invalid("insufficient simulations for the split"));
    }

    let pairs_dir = out_dir.join("pairs");
    std::fs::create_dir_all(&pairs_dir).map_err(|e| Error::io(pairs_dir.display().to_string(), e))?;

    let jobs: Vec<(usize, usize, Split)> = (0..n_train)
        .map(|r| (r, train_sims[r % train_sims.len()], Split::Train))
        .chain((0..n_val).map(|r| (n_train + r, val_sims[r % val_sims.len()], Split::Validation)))
        .collect();

    let records: Vec<RecordEntry> = jobs
        .par_iter()
        .map(|&(idx, sim_id, split)| -> Result<RecordEntry> {
            let record_seed = rng::derive_seed(seed, idx as u64);
            let mut rng = rng::stream_from(record_seed);
            let rotation = rng.gen_range(
                augment_params.rotation_range_deg.0..augment_params.rotation_range_deg.1,
            );
            let half_x = augment_params.translation_box_km.0 * 1000.0 / 2.0;
            let half_y = augment_params.translation_box_km.1 * 1000.0 / 2.0;
            let dx = rng.gen_range(-half_x..half_x);
            let dy = rng.gen_range(-half_y..half_y);
            let measure_seed = rng.gen::<u64>();

            let augmented = augment(&sims[sim_id], rotation, (dx, dy), augment_params)?;
            let outcome = measure(&augmented, measurement_params, measure_seed)?;
            let (arrival_norm, _) =
                normalize_with_stats(&outcome.shifted_arrival, measurement_params.horizon_h)?;

            let arrival_rel = PathBuf::from(format!("pairs/arrival_{idx:05}.farr"));
            let measurement_rel = PathBuf::from(format!("pairs/measurement_{idx:05}.farr"));
            farr::write_normalized(&out_dir.join(&arrival_rel), &arrival_norm)?;
            farr::write_normalized(&out_dir.join(&measurement_rel), &outcome.measurement)?;
            Ok(RecordEntry {
                arrival: arrival_rel,
                measurement: measurement_rel,
                seed: record_seed,
                sim_id,
                split,
            })
        })
        .collect::<Result<_>>()?;

    let manifest = DatasetManifest {
        grid: spec,
        horizon_h: measurement_params.horizon_h,
        n_train,
        n_val,
        records,
    };
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}
