//! The disc-recovery benchmark: small radial "fires" with masked
//! observations, used to exercise the full training loop at desk scale.

use crate::error::Result;
use pyrotime_core::farr;
use pyrotime_core::raster::{GridSpec, NormalizedField};
use pyrotime_core::rng;
use pyrotime_core::synthmeas::{DatasetManifest, RecordEntry, Split};
use rand::Rng;
use std::path::{Path, PathBuf};

/// Parameters of the toy disc dataset.
#[derive(Debug, Clone)]
pub struct ToyConfig {
    pub size: usize,
    pub n_train: usize,
    pub n_val: usize,
    /// Disc radius range in pixels.
    pub radius_range: (f64, f64),
    /// Arrival time at the disc edge, hours.
    pub burn_hours: f64,
    pub horizon_h: f64,
    /// Fraction of disc pixels the masked measurement keeps.
    pub keep_fraction: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            size: 16,
            n_train: 500,
            n_val: 100,
            radius_range: (3.0, 6.0),
            burn_hours: 24.0,
            horizon_h: 72.0,
            keep_fraction: 0.5,
            seed: 0,
        }
    }
}

impl ToyConfig {
    pub fn grid(&self) -> GridSpec {
        GridSpec::with_size_unchecked(self.size, self.size, 60.0, 37.0, -120.0)
            .expect("valid toy grid")
    }
}

/// The truth disc and its masked measurement for record `index`:
/// arrival grows linearly from the center to `burn_hours` at the disc edge,
/// background outside; the measurement keeps each disc pixel with
/// probability `keep_fraction`.
pub fn toy_pair(cfg: &ToyConfig, index: usize) -> (NormalizedField, NormalizedField) {
    let mut rng = rng::stream(cfg.seed, index as u64);
    let radius = rng.gen_range(cfg.radius_range.0..cfg.radius_range.1);
    let n = cfg.size;
    let c = (n as f64 - 1.0) / 2.0;
    let mut truth = Vec::with_capacity(n * n);
    let mut masked = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = ((i as f64 - c).powi(2) + (j as f64 - c).powi(2)).sqrt();
            if d <= radius {
                let v = ((d / radius * cfg.burn_hours) / cfg.horizon_h) as f32;
                truth.push(v);
                let keep = rng.gen::<f64>() < cfg.keep_fraction;
                masked.push(if keep { v } else { 1.0 });
            } else {
                truth.push(1.0);
                masked.push(1.0);
            }
        }
    }
    let spec = cfg.grid();
    (
        NormalizedField::new(spec.clone(), truth).expect("valid toy truth"),
        NormalizedField::new(spec, masked).expect("valid toy measurement"),
    )
}

/// Writes the toy dataset as ordinary FARR pairs plus a manifest, so the
/// production training path runs unchanged.
pub fn write_toy_dataset(dir: &Path, cfg: &ToyConfig) -> Result<DatasetManifest> {
    let pairs_dir = dir.join("pairs");
    std::fs::create_dir_all(&pairs_dir)
        .map_err(|e| crate::Error::io(pairs_dir.display().to_string(), e))?;
    let total = cfg.n_train + cfg.n_val;
    let mut records = Vec::with_capacity(total);
    for idx in 0..total {
        let (truth, masked) = toy_pair(cfg, idx);
        let arrival = PathBuf::from(format!("pairs/arrival_{idx:05}.farr"));
        let measurement = PathBuf::from(format!("pairs/measurement_{idx:05}.farr"));
        farr::write_normalized(&dir.join(&arrival), &truth)?;
        farr::write_normalized(&dir.join(&measurement), &masked)?;
        records.push(RecordEntry {
            arrival,
            measurement,
            seed: rng::derive_seed(cfg.seed, idx as u64),
            sim_id: idx,
            split: if idx < cfg.n_train {
                Split::Train
            } else {
                Split::Validation
            },
        });
    }
    let manifest = DatasetManifest {
        grid: cfg.grid(),
        horizon_h: cfg.horizon_h,
        n_train: cfg.n_train,
        n_val: cfg.n_val,
        records,
    };
    manifest.save(&dir.join("manifest.json"))?;
    Ok(manifest)
}
