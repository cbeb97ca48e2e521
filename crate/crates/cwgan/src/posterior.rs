//! Ensembles of generator realizations and their weighted pixel statistics.

use crate::error::{Error, Result};
use crate::net::sample_latent;
use crate::train::TrainedModel;
use pyrotime_autodiff::{Tape, Tensor};
use pyrotime_core::raster::{denormalize, ArrivalField, NormalizedField, BACKGROUND};
use pyrotime_core::rng;
use serde::Serialize;

/// Anything that can turn (latent draw, measurement) into an arrival-time
/// realization. The production implementation is the trained generator.
pub trait ArrivalSampler {
    fn latent_dim(&self) -> usize;

    /// Generates one realization per row of `z` (shape `[K, latent_dim]`).
    fn generate_batch(&self, z: &Tensor, measurement: &NormalizedField)
        -> Result<Vec<NormalizedField>>;
}

impl ArrivalSampler for TrainedModel {
    fn latent_dim(&self) -> usize {
        self.gen_config.latent_dim
    }

    fn generate_batch(
        &self,
        z: &Tensor,
        measurement: &NormalizedField,
    ) -> Result<Vec<NormalizedField>> {
        let size = self.gen_config.input_size;
        if measurement.spec.nx != size || measurement.spec.ny != size {
            return Err(Error::ShapeMismatch(format!(
                "measurement {}x{} does not match the network input size {size}",
                measurement.spec.nx, measurement.spec.ny
            )));
        }
        let k = z.shape()[0];
        let nz = self.gen_config.latent_dim;
        let m_row: Vec<f64> = measurement.values().iter().map(|&v| v as f64).collect();
        let mut out = Vec::with_capacity(k);
        // Fixed chunking; per-sample results do not depend on it.
        for chunk_start in (0..k).step_by(8) {
            let b = (k - chunk_start).min(8);
            let mut t = Tape::new();
            let params = self.gen_params.leaves(&mut t);
            let z_chunk = Tensor::from_vec(
                &[b, nz],
                z.data()[chunk_start * nz..(chunk_start + b) * nz].to_vec(),
            );
            let zv = t.leaf(z_chunk);
            let mut m_data = Vec::with_capacity(b * size * size);
            for _ in 0..b {
                m_data.extend_from_slice(&m_row);
            }
            let mv = t.leaf(Tensor::from_vec(&[b, 1, size, size], m_data));
            let fake = self.gen.forward(&mut t, &params, zv, mv);
            let fv = t.value(fake).data();
            let n = size * size;
            for s in 0..b {
                let values: Vec<f32> = fv[s * n..(s + 1) * n]
                    .iter()
                    .map(|&v| (v as f32).clamp(0.0, 1.0))
                    .collect();
                out.push(NormalizedField::new(measurement.spec.clone(), values)?);
            }
        }
        Ok(out)
    }
}

/// A weighted set of arrival-time realizations for one measurement.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<NormalizedField>,
    /// Non-negative, summing to one.
    pub weights: Vec<f64>,
    /// Measurement id / confidence tier the members were conditioned on.
    pub source: String,
}

impl Ensemble {
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() || self.members.len() != self.weights.len() {
            return Err(Error::invalid("ensemble needs one weight per member"));
        }
        let spec = &self.members[0].spec;
        if self.members.iter().any(|m| &m.spec != spec) {
            return Err(Error::invalid("ensemble members use mismatched grids"));
        }
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("ensemble weights must be non-negative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("ensemble weights sum to {total}")));
        }
        Ok(())
    }
}

/// Draws K realizations `g(z_i, measurement)` with i.i.d. standard normal
/// latents from `seed`, uniformly weighted.
pub fn sample_ensemble(
    sampler: &dyn ArrivalSampler,
    measurement: &NormalizedField,
    k: usize,
    seed: u64,
    source: impl Into<String>,
) -> Result<Ensemble> {
    if k == 0 {
        return Err(Error::invalid("ensemble size must be >= 1"));
    }
    let mut z_rng = rng::stream_from(seed);
    let z = sample_latent(&mut z_rng, k, sampler.latent_dim());
    let members = sampler.generate_batch(&z, measurement)?;
    Ok(Ensemble {
        members,
        weights: vec![1.0 / k as f64; k],
        source: source.into(),
    })
}

/// Pools two ensembles with tier weights `w` (defaults 0.2 high-confidence,
/// 0.8 high+nominal): each member of `e_high` carries `w.0 / |e_high|`, each
/// member of `e_both` carries `w.1 / |e_both|`.
pub fn merge_weighted(e_high: &Ensemble, e_both: &Ensemble, w: (f64, f64)) -> Result<Ensemble> {
    e_high.validate()?;
    e_both.validate()?;
    if e_high.members[0].spec != e_both.members[0].spec {
        return Err(Error::invalid("ensemble grids do not match"));
    }
    if w.0 < 0.0 || w.1 < 0.0 || (w.0 + w.1 - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("tier weights must be non-negative and sum to 1"));
    }
    let mut members = e_high.members.clone();
    members.extend(e_both.members.iter().cloned());
    let mut weights = Vec::with_capacity(members.len());
    weights.extend(std::iter::repeat(w.0 / e_high.members.len() as f64).take(e_high.members.len()));
    weights.extend(std::iter::repeat(w.1 / e_both.members.len() as f64).take(e_both.members.len()));
    Ok(Ensemble {
        members,
        weights,
        source: format!("{}+{}", e_high.source, e_both.source),
    })
}

/// Weighted per-pixel statistics of an ensemble, in hours.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    pub mean: ArrivalField,
    /// Per-pixel standard deviation in hours; background where the mean is
    /// background.
    pub std_h: ArrivalField,
    /// Minimum of the mean over non-background pixels, hours.
    pub ignition_estimate_h: f64,
    pub n_members: usize,
    pub weights: Vec<f64>,
}

/// JSON-friendly digest of a [`PosteriorSummary`].
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorDigest {
    pub ignition_estimate_h: f64,
    pub ignition_time_hhmm: Option<String>,
    pub n_members: usize,
    pub burned_pixels: usize,
}

/// Weighted mean and standard deviation per pixel, computed on normalized
/// values and converted to hours. Members at the background value
/// participate in the moments; a pixel becomes background only if its mean
/// reaches the background threshold.
pub fn pixel_stats(ensemble: &Ensemble, horizon: f64) -> Result<PosteriorSummary> {
    ensemble.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let spec = ensemble.members[0].spec.clone();
    let n = spec.len();
    let mut mean = vec![0.0f64; n];
    for (member, &w) in ensemble.members.iter().zip(&ensemble.weights) {
        for (m, &v) in mean.iter_mut().zip(member.values()) {
            *m += w * v as f64;
        }
    }
    let mut var = vec![0.0f64; n];
    for (member, &w) in ensemble.members.iter().zip(&ensemble.weights) {
        for (s, (&v, &m)) in member.values().iter().zip(&mean).enumerate() {
            let d = v as f64 - m;
            var[s] += w * d * d;
        }
    }
    let mean_norm = NormalizedField::new(
        spec.clone(),
        mean.iter().map(|&m| (m as f32).clamp(0.0, 1.0)).collect(),
    )?;
    let mean_field = denormalize(&mean_norm, horizon)?;
    let std_values: Vec<f32> = var
        .iter()
        .zip(mean_field.values())
        .map(|(&v, &m)| {
            if m == BACKGROUND {
                BACKGROUND
            } else {
                (v.max(0.0).sqrt() * horizon) as f32
            }
        })
        .collect();
    let std_h = ArrivalField::new(spec, std_values)?;
    let ignition_estimate_h = mean_field
        .values()
        .iter()
        .filter(|&&v| v != BACKGROUND)
        .fold(f64::INFINITY, |acc, &v| acc.min(v as f64));
    Ok(PosteriorSummary {
        mean: mean_field,
        std_h,
        ignition_estimate_h,
        n_members: ensemble.members.len(),
        weights: ensemble.weights.clone(),
    })
}

/// Formats the ignition estimate as HH:MM from the start of the ignition
/// day, rounded to the nearest minute; hours may exceed 24.
pub fn ignition_time(summary: &PosteriorSummary) -> Result<String> {
    if !summary.ignition_estimate_h.is_finite() {
        return Err(Error::Core(pyrotime_core::Error::NoFire(
            "prediction contains no burned pixels".into(),
        )));
    }
    Ok(format_hours(summary.ignition_estimate_h))
}

/// HH:MM rendering of an hour count (may exceed 24 h).
pub fn format_hours(hours: f64) -> String {
    let total_minutes = (hours * 60.0).round() as i64;
    format!("{:02}:{:02}", total_minutes / 60, total_minutes % 60)
}

impl PosteriorSummary {
    pub fn digest(&self) -> PosteriorDigest {
        PosteriorDigest {
            ignition_estimate_h: self.ignition_estimate_h,
            ignition_time_hhmm: ignition_time(self).ok(),
            n_members: self.n_members,
            burned_pixels: self
                .mean
                .values()
                .iter()
                .filter(|&&v| v != BACKGROUND)
                .count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyrotime_core::raster::GridSpec;

    fn spec(n: usize) -> GridSpec {
        GridSpec::with_size_unchecked(n, n, 60.0, 37.0, -120.0).unwrap()
    }

    fn member(n: usize, v: f32) -> NormalizedField {
        NormalizedField::new(spec(n), vec![v; n * n]).unwrap()
    }

    #[test]
    fn identical_members_have_zero_std() {
        let e = Ensemble {
            members: vec![member(4, 0.25); 5],
            weights: vec![0.2; 5],
            source: "t".into(),
        };
        let s = pixel_stats(&e, 72.0).unwrap();
        assert_eq!(s.mean.values()[0], 18.0);
        assert!(s.std_h.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.ignition_estimate_h, 18.0);
    }

    #[test]
    fn two_point_distribution_moments() {
        let e = Ensemble {
            members: vec![member(2, 0.25), member(2, 0.75)],
            weights: vec![0.5, 0.5],
            source: "t".into(),
        };
        let s = pixel_stats(&e, 72.0).unwrap();
        // Normalized mean 0.5, normalized std 0.25.
        assert_eq!(s.mean.values()[0], 36.0);
        assert!((s.std_h.values()[0] - 0.25 * 72.0).abs() < 1e-4);
    }

    #[test]
    fn merge_weights_follow_the_tier_split() {
        let a = Ensemble {
            members: vec![member(2, 0.1)],
            weights: vec![1.0],
            source: "high".into(),
        };
        let b = Ensemble {
            members: vec![member(2, 0.3)],
            weights: vec![1.0],
            source: "both".into(),
        };
        let merged = merge_weighted(&a, &b, (0.2, 0.8)).unwrap();
        assert_eq!(merged.weights, vec![0.2, 0.8]);
        merged.validate().unwrap();

        // Degenerate weights reduce to one tier's statistics.
        let only_a = merge_weighted(&a, &b, (1.0, 0.0)).unwrap();
        let sa = pixel_stats(&only_a, 72.0).unwrap();
        let sa_ref = pixel_stats(&a, 72.0).unwrap();
        assert_eq!(sa.mean.values(), sa_ref.mean.values());

        let big_a = Ensemble {
            members: vec![member(2, 0.1); 200],
            weights: vec![1.0 / 200.0; 200],
            source: "high".into(),
        };
        let big_b = Ensemble {
            members: vec![member(2, 0.3); 200],
            weights: vec![1.0 / 200.0; 200],
            source: "both".into(),
        };
        let merged = merge_weighted(&big_a, &big_b, (0.2, 0.8)).unwrap();
        assert_eq!(merged.members.len(), 400);
        assert!((merged.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn merged_stats_equal_pooled_moments() {
        let a = Ensemble {
            members: vec![member(2, 0.2), member(2, 0.4)],
            weights: vec![0.5, 0.5],
            source: "high".into(),
        };
        let b = Ensemble {
            members: vec![member(2, 0.6)],
            weights: vec![1.0],
            source: "both".into(),
        };
        let merged = merge_weighted(&a, &b, (0.2, 0.8)).unwrap();
        let s = pixel_stats(&merged, 72.0).unwrap();
        // Direct weighted moments over the union.
        let vals = [0.2f64, 0.4, 0.6];
        let ws = [0.1f64, 0.1, 0.8];
        let m: f64 = vals.iter().zip(&ws).map(|(v, w)| v * w).sum();
        let var: f64 = vals.iter().zip(&ws).map(|(v, w)| w * (v - m) * (v - m)).sum();
        assert!((s.mean.values()[0] as f64 - m * 72.0).abs() < 1e-4);
        assert!((s.std_h.values()[0] as f64 - var.sqrt() * 72.0).abs() < 1e-4);
    }

    #[test]
    fn mean_invariant_to_permutation_and_weight_splitting() {
        let e1 = Ensemble {
            members: vec![member(2, 0.2), member(2, 0.6)],
            weights: vec![0.25, 0.75],
            source: "t".into(),
        };
        let e2 = Ensemble {
            members: vec![member(2, 0.6), member(2, 0.2)],
            weights: vec![0.75, 0.25],
            source: "t".into(),
        };
        // Duplicate a member, splitting its weight.
        let e3 = Ensemble {
            members: vec![member(2, 0.2), member(2, 0.6), member(2, 0.6)],
            weights: vec![0.25, 0.5, 0.25],
            source: "t".into(),
        };
        let s1 = pixel_stats(&e1, 72.0).unwrap();
        let s2 = pixel_stats(&e2, 72.0).unwrap();
        let s3 = pixel_stats(&e3, 72.0).unwrap();
        assert!((s1.mean.values()[0] - s2.mean.values()[0]).abs() < 1e-6);
        assert!((s1.mean.values()[0] - s3.mean.values()[0]).abs() < 1e-6);
        assert!((s1.std_h.values()[0] - s3.std_h.values()[0]).abs() < 1e-4);
    }

    #[test]
    fn ignition_time_formats() {
        let mk = |est: f64| PosteriorSummary {
            mean: ArrivalField::background(spec(2)),
            std_h: ArrivalField::background(spec(2)),
            ignition_estimate_h: est,
            n_members: 1,
            weights: vec![1.0],
        };
        assert_eq!(ignition_time(&mk(23.8)).unwrap(), "23:48");
        assert_eq!(ignition_time(&mk(0.0)).unwrap(), "00:00");
        assert_eq!(ignition_time(&mk(27.883)).unwrap(), "27:53");
        assert!(ignition_time(&mk(f64::INFINITY)).is_err());
    }

    #[test]
    fn all_background_members_give_no_fire() {
        let e = Ensemble {
            members: vec![member(2, 1.0); 3],
            weights: vec![1.0 / 3.0; 3],
            source: "t".into(),
        };
        let s = pixel_stats(&e, 72.0).unwrap();
        assert!(ignition_time(&s).is_err());
    }
}
