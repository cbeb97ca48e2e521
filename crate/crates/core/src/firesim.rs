//! Wind-driven anisotropic eikonal fire-spread simulation.
//!
//! Generates ground-truth arrival-time fields by solving `|∇u| = 1/R` with a
//! direction-dependent rate of spread R on an 8-neighbor stencil. The solver
//! is a semi-Lagrangian update over the eight (axis, adjacent-diagonal)
//! triangles of the 1-ring, iterated with an active-set Jacobi scheme:
//! every sweep reads the previous state and commits all improvements at
//! once, so results are independent of traversal order and exactly
//! equivariant under grid rotations when the rate law is isotropic.
//!
//! The solve runs on a supersampled grid (odd factors keep fine and coarse
//! pixel centers aligned) and is then coarsened to the output resolution
//! with nearest-neighbor resampling, mirroring a 30 m -> 60 m pipeline.

use crate::error::{Error, Result};
use crate::raster::{resample_to, ArrivalField, GridSpec, BACKGROUND};
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Directional rate-of-spread law.
///
/// `R(phi) = base_ros * (1 + wind_gain * speed * A(phi))` where
/// `A(phi) = back_fraction + (1 - back_fraction) * e(phi)` and
/// `e(phi) = ((1 + cos phi) / 2)^shape_exponent` interpolates 1 downwind,
/// `flank_fraction` at 90 degrees (for the default exponent), and 0 upwind.
/// With no wind the law is exactly isotropic at `base_ros`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosModel {
    /// Head-free rate of spread for uniform brush fuel, m/s.
    pub base_ros: f64,
    /// Wind response per (m/s) of 10 m wind speed.
    pub wind_gain: f64,
    /// Anisotropy floor in the upwind direction, in (0, 1].
    pub back_fraction: f64,
    /// Crosswind fraction of the head anisotropy, in (0, 1].
    pub flank_fraction: f64,
    /// Exponent applied to (1 + cos phi)/2; 1 places `flank_fraction` = 0.5
    /// exactly on the crosswind heading.
    pub shape_exponent: f64,
}

impl Default for RosModel {
    fn default() -> Self {
        RosModel {
            base_ros: 0.05,
            wind_gain: 0.4,
            back_fraction: 0.2,
            flank_fraction: 0.5,
            shape_exponent: 1.0,
        }
    }
}

impl RosModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_ros > 0.0) {
            return Err(Error::invalid("base_ros must be positive"));
        }
        if !(self.wind_gain >= 0.0) {
            return Err(Error::invalid("wind_gain must be non-negative"));
        }
        if !(self.back_fraction > 0.0 && self.back_fraction <= 1.0) {
            return Err(Error::invalid("back_fraction must be in (0, 1]"));
        }
        if !(self.flank_fraction > 0.0 && self.flank_fraction <= 1.0) {
            return Err(Error::invalid("flank_fraction must be in (0, 1]"));
        }
        if !(self.shape_exponent > 0.0) {
            return Err(Error::invalid("shape_exponent must be positive"));
        }
        Ok(())
    }

    /// Rate of spread given the cosine of the angle between the propagation
    /// heading and the downwind direction.
    #[inline]
    pub fn ros_from_cos(&self, wind_speed: f64, cos_phi: f64) -> f64 {
        let e = if self.shape_exponent == 1.0 {
            (1.0 + cos_phi) * 0.5
        } else {
            ((1.0 + cos_phi) * 0.5).powf(self.shape_exponent)
        };
        let aniso = self.back_fraction + (1.0 - self.back_fraction) * e;
        self.base_ros * (1.0 + self.wind_gain * wind_speed * aniso)
    }
}

/// Rate of spread in m/s along `heading_deg` (degrees from north) under a
/// 10 m wind of `wind_speed` m/s blowing toward `wind_dir_deg`.
pub fn directional_ros(
    model: &RosModel,
    wind_speed: f64,
    wind_dir_deg: f64,
    heading_deg: f64,
) -> f64 {
    let phi = (heading_deg - wind_dir_deg).to_radians();
    model.ros_from_cos(wind_speed, phi.cos())
}

/// A single point ignition: pixel coordinates plus ignition time in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgnitionPoint {
    pub row: usize,
    pub col: usize,
    pub time_h: f64,
}

fn default_supersample() -> usize {
    3
}

/// Everything a single spread simulation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    pub spec: GridSpec,
    pub ignition_points: Vec<IgnitionPoint>,
    /// 10 m wind speed, m/s.
    pub wind_speed10: f64,
    /// Direction the wind blows toward, degrees from north.
    pub wind_direction_deg: f64,
    /// Base rate of spread fed to the default [`RosModel`], m/s.
    pub base_ros: f64,
    /// Simulated spread duration, hours.
    pub duration_h: f64,
    /// Solver grid refinement above the output resolution. Odd factors keep
    /// fine and coarse pixel centers exactly aligned.
    #[serde(default = "default_supersample")]
    pub supersample: usize,
}

impl SpreadConfig {
    /// Two-day center-ignition template on the given grid.
    pub fn template(spec: GridSpec) -> Self {
        let center = IgnitionPoint {
            row: spec.ny / 2,
            col: spec.nx / 2,
            time_h: 0.0,
        };
        SpreadConfig {
            spec,
            ignition_points: vec![center],
            wind_speed10: 0.0,
            wind_direction_deg: 0.0,
            base_ros: RosModel::default().base_ros,
            duration_h: 48.0,
            supersample: default_supersample(),
        }
    }

    pub fn ros_model(&self) -> RosModel {
        RosModel {
            base_ros: self.base_ros,
            ..RosModel::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ignition_points.is_empty()
            || !self
                .ignition_points
                .iter()
                .any(|p| p.row < self.spec.ny && p.col < self.spec.nx)
        {
            return Err(Error::invalid(
                "at least one ignition point must lie inside the grid",
            ));
        }
        for p in &self.ignition_points {
            if !(p.time_h >= 0.0) {
                return Err(Error::invalid("ignition times must be >= 0"));
            }
        }
        if !(self.wind_speed10 >= 0.0) {
            return Err(Error::invalid("wind speed must be >= 0"));
        }
        if !(self.duration_h > 0.0) {
            return Err(Error::invalid("duration must be positive"));
        }
        if self.supersample == 0 {
            return Err(Error::invalid("supersample factor must be >= 1"));
        }
        Ok(())
    }
}

/// Draws `n` training configurations: wind speed U(0,5) m/s, wind direction
/// U(0,360), single center ignition at time zero, uniform fuel. The grid,
/// duration, and base rate come from `template`. Deterministic under `seed`.
pub fn sample_training_configs(n: usize, seed: u64, template: &SpreadConfig) -> Vec<SpreadConfig> {
    (0..n)
        .map(|k| {
            let mut rng = rng::stream(seed, k as u64);
            let wind_speed10 = rng.gen_range(0.0..5.0);
            let wind_direction_deg = rng.gen_range(0.0..360.0);
            let center = IgnitionPoint {
                row: template.spec.ny / 2,
                col: template.spec.nx / 2,
                time_h: 0.0,
            };
            SpreadConfig {
                spec: template.spec.clone(),
                ignition_points: vec![center],
                wind_speed10,
                wind_direction_deg,
                base_ros: template.base_ros,
                duration_h: template.duration_h,
                supersample: template.supersample,
            }
        })
        .collect()
}

/// Offsets (d_row, d_col) of the eight (axis, adjacent-diagonal) triangles.
const TRIANGLES: [((i64, i64), (i64, i64)); 8] = [
    ((0, 1), (-1, 1)),
    ((-1, 0), (-1, 1)),
    ((-1, 0), (-1, -1)),
    ((0, -1), (-1, -1)),
    ((0, -1), (1, -1)),
    ((1, 0), (1, -1)),
    ((1, 0), (1, 1)),
    ((0, 1), (1, 1)),
];

/// Lambda grid resolution: all candidate points are multiples of 1/128.
const LAMBDA_DENOM: i64 = 128;

/// Ignition seeds are assigned exactly within this many fine pixels.
const SEED_RADIUS_PX: f64 = 3.0;

/// Relative improvement threshold; smaller updates are treated as converged.
const REL_EPS: f64 = 1e-14;

struct SolveCtx {
    nx: usize,
    ny: usize,
    /// h / (3600 * base_ros), hours per unit of local distance at R = base.
    cde: f64,
    gs: f64,
    back: f64,
    shape: f64,
    /// Per-triangle projections of the axis offset and the (diag - axis)
    /// offset onto the downwind unit vector.
    wa: [f64; 8],
    wd: [f64; 8],
    /// Travel time along a pure axis / pure diagonal edge, per triangle.
    axis_time: [f64; 8],
    diag_time: [f64; 8],
    /// sqrt(1 + lambda^2) for lambda = k / 128.
    len_table: Vec<f64>,
    duration_h: f64,
}

impl SolveCtx {
    fn new(config: &SpreadConfig, model: &RosModel, h_m: f64) -> Self {
        let theta = config.wind_direction_deg.to_radians();
        // Downwind unit vector in (east, north) components.
        let w = (theta.sin(), theta.cos());
        let gs = model.wind_gain * config.wind_speed10;
        let cde = h_m / (3600.0 * model.base_ros);
        let mut wa = [0.0; 8];
        let mut wd = [0.0; 8];
        let mut axis_time = [0.0; 8];
        let mut diag_time = [0.0; 8];
        let sqrt2 = 2f64.sqrt();
        for (t, ((ai, aj), (bi, bj))) in TRIANGLES.iter().enumerate() {
            let a_en = (*aj as f64, -*ai as f64);
            let b_en = (*bj as f64, -*bi as f64);
            let d_en = (b_en.0 - a_en.0, b_en.1 - a_en.1);
            wa[t] = a_en.0 * w.0 + a_en.1 * w.1;
            wd[t] = d_en.0 * w.0 + d_en.1 * w.1;
            // Propagation heading is from the neighbor toward the pixel.
            let cos_axis = -wa[t];
            let cos_diag = -(b_en.0 * w.0 + b_en.1 * w.1) / sqrt2;
            axis_time[t] =
                h_m / (3600.0 * model.ros_from_cos(config.wind_speed10, cos_axis));
            diag_time[t] =
                sqrt2 * h_m / (3600.0 * model.ros_from_cos(config.wind_speed10, cos_diag));
        }
        let len_table = (0..=LAMBDA_DENOM)
            .map(|k| {
                let lam = k as f64 / LAMBDA_DENOM as f64;
                (1.0 + lam * lam).sqrt()
            })
            .collect();
        SolveCtx {
            nx: config.spec.nx * config.supersample,
            ny: config.spec.ny * config.supersample,
            cde,
            gs,
            back: model.back_fraction,
            shape: model.shape_exponent,
            wa,
            wd,
            axis_time,
            diag_time,
            len_table,
            duration_h: config.duration_h,
        }
    }

    /// Travel time (hours) from the lambda point of triangle `t` to the
    /// pixel, for lambda = k / 128.
    #[inline]
    fn travel_time(&self, t: usize, k: i64) -> f64 {
        let lam = k as f64 / LAMBDA_DENOM as f64;
        let len = self.len_table[k as usize];
        let cos_phi = -(self.wa[t] + lam * self.wd[t]) / len;
        let e = if self.shape == 1.0 {
            (1.0 + cos_phi) * 0.5
        } else {
            ((1.0 + cos_phi) * 0.5).powf(self.shape)
        };
        let aniso = self.back + (1.0 - self.back) * e;
        self.cde * len / (1.0 + self.gs * aniso)
    }

    /// Minimizes (1-lam) u_a + lam u_b + travel over the lambda grid with
    /// two refinement passes.
    #[inline]
    fn simplex_min(&self, t: usize, ua: f64, ub: f64) -> f64 {
        let eval = |k: i64| {
            let lam = k as f64 / LAMBDA_DENOM as f64;
            (1.0 - lam) * ua + lam * ub + self.travel_time(t, k)
        };
        let mut best_k = 0i64;
        let mut best = f64::INFINITY;
        let mut k = 0i64;
        while k <= LAMBDA_DENOM {
            let f = eval(k);
            if f < best {
                best = f;
                best_k = k;
            }
            k += 16;
        }
        for step in [4i64, 1] {
            let center = best_k;
            let lo = (center - 3 * step).max(0);
            let hi = (center + 3 * step).min(LAMBDA_DENOM);
            let mut k = lo;
            while k <= hi {
                if k != center {
                    let f = eval(k);
                    if f < best {
                        best = f;
                        best_k = k;
                    }
                }
                k += step;
            }
        }
        best
    }

    /// Candidate value for pixel `p` given the previous sweep's field.
    fn update(&self, p: usize, u: &[f64]) -> f64 {
        let i = (p / self.nx) as i64;
        let j = (p % self.nx) as i64;
        let mut best = f64::INFINITY;
        for (t, ((ai, aj), (bi, bj))) in TRIANGLES.iter().enumerate() {
            let ua = self.value_at(u, i + ai, j + aj);
            let ub = self.value_at(u, i + bi, j + bj);
            if ua.is_infinite() && ub.is_infinite() {
                continue;
            }
            let cand = if ub.is_infinite() {
                ua + self.axis_time[t]
            } else if ua.is_infinite() {
                ub + self.diag_time[t]
            } else {
                self.simplex_min(t, ua, ub)
            };
            best = best.min(cand);
        }
        best
    }

    #[inline]
    fn value_at(&self, u: &[f64], i: i64, j: i64) -> f64 {
        if i < 0 || j < 0 || i >= self.ny as i64 || j >= self.nx as i64 {
            f64::INFINITY
        } else {
            u[i as usize * self.nx + j as usize]
        }
    }
}

/// Solves the fine-grid arrival field in f64 hours (background = +inf).
///
/// When `shuffle_seed` is set the per-sweep worklists are permuted before
/// processing; the committed result must not depend on it (all updates in a
/// sweep read the previous state).
pub(crate) fn solve_fine(
    config: &SpreadConfig,
    model: &RosModel,
    shuffle_seed: Option<u64>,
) -> Result<Vec<f64>> {
    config.validate()?;
    model.validate()?;
    if config.ignition_points.len() > 1 {
        // Solve each ignition independently and combine by first arrival.
        // Interpolated updates across two colliding fronts can undershoot,
        // so the pointwise minimum is taken literally.
        let mut combined: Option<Vec<f64>> = None;
        for p in &config.ignition_points {
            let mut single = config.clone();
            single.ignition_points = vec![*p];
            if p.row >= config.spec.ny || p.col >= config.spec.nx {
                continue;
            }
            let u = solve_fine(&single, model, shuffle_seed)?;
            combined = Some(match combined {
                None => u,
                Some(mut acc) => {
                    for (a, b) in acc.iter_mut().zip(&u) {
                        if *b < *a {
                            *a = *b;
                        }
                    }
                    acc
                }
            });
        }
        return Ok(combined.expect("validated: at least one ignition inside the grid"));
    }
    let f = config.supersample;
    let h_m = config.spec.resolution_m / f as f64;
    let ctx = SolveCtx::new(config, model, h_m);
    let (nx, ny) = (ctx.nx, ctx.ny);
    let n = nx * ny;
    let mut u = vec![f64::INFINITY; n];

    // Seed each ignition exactly (straight-ray travel time) within a small
    // disc; seeded values stay improvable so a faster discrete path, or an
    // earlier neighboring fire, can still lower them.
    let seed_r2 = (SEED_RADIUS_PX * SEED_RADIUS_PX).floor() as i64;
    let mut seeded = Vec::new();
    for p in &config.ignition_points {
        if p.row >= config.spec.ny || p.col >= config.spec.nx {
            continue;
        }
        let fi = (p.row * f + (f - 1) / 2) as i64;
        let fj = (p.col * f + (f - 1) / 2) as i64;
        let r = SEED_RADIUS_PX.ceil() as i64;
        for di in -r..=r {
            for dj in -r..=r {
                let d2 = di * di + dj * dj;
                if d2 > seed_r2 {
                    continue;
                }
                let (i, j) = (fi + di, fj + dj);
                if i < 0 || j < 0 || i >= ny as i64 || j >= nx as i64 {
                    continue;
                }
                let idx = i as usize * nx + j as usize;
                let t = if d2 == 0 {
                    p.time_h
                } else {
                    let dist_m = ((d2 as f64).sqrt()) * h_m;
                    let norm = (d2 as f64).sqrt();
                    let heading = (dj as f64 / norm, -di as f64 / norm);
                    let theta = config.wind_direction_deg.to_radians();
                    let cos_phi = heading.0 * theta.sin() + heading.1 * theta.cos();
                    let ros = model.ros_from_cos(config.wind_speed10, cos_phi);
                    p.time_h + dist_m / ros / 3600.0
                };
                if t < u[idx] {
                    u[idx] = t;
                    seeded.push(idx as u32);
                }
            }
        }
    }

    // Active-set Jacobi sweeps: recompute only pixels whose neighborhood
    // changed, read the previous state, commit all improvements at once.
    let mut stamp = vec![0u32; n];
    let mut work: Vec<u32> = Vec::new();
    let mut sweep = 0u32;
    let push_neighborhood =
        |idx: u32, sweep: u32, stamp: &mut Vec<u32>, out: &mut Vec<u32>, nx: usize, ny: usize| {
            let i = (idx as usize / nx) as i64;
            let j = (idx as usize % nx) as i64;
            for di in -1..=1i64 {
                for dj in -1..=1i64 {
                    let (qi, qj) = (i + di, j + dj);
                    if qi < 0 || qj < 0 || qi >= ny as i64 || qj >= nx as i64 {
                        continue;
                    }
                    let q = (qi as usize * nx + qj as usize) as u32;
                    if stamp[q as usize] != sweep {
                        stamp[q as usize] = sweep;
                        out.push(q);
                    }
                }
            }
        };
    sweep += 1;
    for &s in &seeded {
        let mut tmp = Vec::new();
        push_neighborhood(s, sweep, &mut stamp, &mut tmp, nx, ny);
        work.extend(tmp);
    }

    let max_sweeps = 4 * (nx + ny) + 64;
    let mut pending: Vec<(u32, f64)> = Vec::new();
    let mut rng = shuffle_seed.map(rng::stream_from);
    for _ in 0..max_sweeps {
        if work.is_empty() {
            break;
        }
        if let Some(r) = rng.as_mut() {
            shuffle(&mut work, r);
        }
        pending.clear();
        for &p in &work {
            let old = u[p as usize];
            let v = ctx.update(p as usize, &u);
            if v > ctx.duration_h {
                continue;
            }
            let improved = if old.is_infinite() {
                v < old
            } else {
                old - v > old * REL_EPS
            };
            if improved {
                pending.push((p, v));
            }
        }
        sweep += 1;
        let mut next = Vec::new();
        for &(p, v) in &pending {
            u[p as usize] = v;
        }
        for &(p, _) in &pending {
            push_neighborhood(p, sweep, &mut stamp, &mut next, nx, ny);
        }
        work = next;
    }
    if !work.is_empty() {
        log::warn!("eikonal solve hit the sweep limit with {} active pixels", work.len());
    }
    Ok(u)
}

fn shuffle(v: &mut [u32], rng: &mut rand_chacha::ChaCha8Rng) {
    for k in (1..v.len()).rev() {
        let j = rng.gen_range(0..=k);
        v.swap(k, j);
    }
}

/// Solves the anisotropic eikonal equation for `config` and returns the
/// arrival field on the output grid. Pixels the fire does not reach within
/// `duration_h` are background; multiple ignitions yield the pointwise
/// first arrival.
pub fn solve_arrival(config: &SpreadConfig, model: &RosModel) -> Result<ArrivalField> {
    let u = solve_fine(config, model, None)?;
    let f = config.supersample;
    let fine_spec = GridSpec::with_size_unchecked(
        config.spec.nx * f,
        config.spec.ny * f,
        config.spec.resolution_m / f as f64,
        config.spec.origin_lat,
        config.spec.origin_lon,
    )?;
    let values: Vec<f32> = u
        .iter()
        .map(|&v| {
            if v.is_finite() && v <= config.duration_h {
                v as f32
            } else {
                BACKGROUND
            }
        })
        .collect();
    let fine = ArrivalField::new(fine_spec, values)?;
    if f == 1 {
        return Ok(fine);
    }
    resample_to(&fine, &config.spec)
}

/// Brute-force first-arrival oracles, deliberately independent of the
/// fast-sweeping solver. Slow; used for validation only.
pub mod oracle {
    use super::{IgnitionPoint, RosModel};
    use crate::raster::GridSpec;
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    /// The sixteen shortest-path offsets (axes, diagonals, knight moves).
    pub const OFFSETS_16: [(i64, i64); 16] = [
        (0, 1),
        (0, -1),
        (1, 0),
        (-1, 0),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
        (1, 2),
        (1, -2),
        (-1, 2),
        (-1, -2),
        (2, 1),
        (2, -1),
        (-2, 1),
        (-2, -1),
    ];

    struct HeapItem(f64, u32);

    impl PartialEq for HeapItem {
        fn eq(&self, other: &Self) -> bool {
            self.0 == other.0 && self.1 == other.1
        }
    }
    impl Eq for HeapItem {}
    impl PartialOrd for HeapItem {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for HeapItem {
        fn cmp(&self, other: &Self) -> Ordering {
            // Min-heap on time, ties on index for determinism.
            other
                .0
                .total_cmp(&self.0)
                .then_with(|| other.1.cmp(&self.1))
        }
    }

    /// Dijkstra first-arrival times (hours) on a 16-neighbor graph whose
    /// edge weights are distance over the directional rate of spread.
    pub fn dijkstra_16(
        spec: &GridSpec,
        ignitions: &[IgnitionPoint],
        model: &RosModel,
        wind_speed: f64,
        wind_dir_deg: f64,
    ) -> Vec<f64> {
        let (nx, ny) = (spec.nx, spec.ny);
        let n = nx * ny;
        let theta = wind_dir_deg.to_radians();
        let w = (theta.sin(), theta.cos());
        let edge: Vec<f64> = OFFSETS_16
            .iter()
            .map(|&(di, dj)| {
                let dist = ((di * di + dj * dj) as f64).sqrt();
                let heading = (dj as f64 / dist, -di as f64 / dist);
                let cos_phi = heading.0 * w.0 + heading.1 * w.1;
                let ros = model.ros_from_cos(wind_speed, cos_phi);
                dist * spec.resolution_m / ros / 3600.0
            })
            .collect();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for p in ignitions {
            if p.row < ny && p.col < nx {
                let idx = p.row * nx + p.col;
                if p.time_h < dist[idx] {
                    dist[idx] = p.time_h;
                    heap.push(HeapItem(p.time_h, idx as u32));
                }
            }
        }
        while let Some(HeapItem(d, idx)) = heap.pop() {
            if d > dist[idx as usize] {
                continue;
            }
            let i = (idx as usize / nx) as i64;
            let j = (idx as usize % nx) as i64;
            for (k, &(di, dj)) in OFFSETS_16.iter().enumerate() {
                let (qi, qj) = (i + di, j + dj);
                if qi < 0 || qj < 0 || qi >= ny as i64 || qj >= nx as i64 {
                    continue;
                }
                let q = qi as usize * nx + qj as usize;
                let nd = d + edge[k];
                if nd < dist[q] {
                    dist[q] = nd;
                    heap.push(HeapItem(nd, q as u32));
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, res: f64) -> GridSpec {
        GridSpec::with_size_unchecked(n, n, res, 37.0, -120.0).unwrap()
    }

    #[test]
    fn directional_ros_is_isotropic_without_wind() {
        let m = RosModel::default();
        for heading in [0.0, 37.0, 90.0, 180.0, 301.5] {
            assert_eq!(directional_ros(&m, 0.0, 45.0, heading), m.base_ros);
        }
    }

    #[test]
    fn directional_ros_downwind_head() {
        let m = RosModel::default();
        let r = directional_ros(&m, 5.0, 90.0, 90.0);
        assert!((r - 3.0 * m.base_ros).abs() < 1e-12, "head rate {r}");
    }

    #[test]
    fn flank_rate_is_between_back_and_head() {
        let m = RosModel::default();
        let head = directional_ros(&m, 5.0, 0.0, 0.0);
        let flank = directional_ros(&m, 5.0, 0.0, 90.0);
        let back = directional_ros(&m, 5.0, 0.0, 180.0);
        assert!(back < flank && flank < head, "{back} {flank} {head}");
    }

    #[test]
    fn ros_is_maximal_downwind() {
        let m = RosModel::default();
        let head = directional_ros(&m, 3.0, 123.0, 123.0);
        for k in 0..72 {
            let h = k as f64 * 5.0;
            assert!(directional_ros(&m, 3.0, 123.0, h) <= head + 1e-12);
        }
    }

    fn radial_config(n: usize) -> (SpreadConfig, RosModel) {
        let mut config = SpreadConfig::template(spec(n, 60.0));
        config.base_ros = 1.0;
        config.duration_h = 10.0;
        let model = RosModel {
            base_ros: 1.0,
            ..RosModel::default()
        };
        (config, model)
    }

    #[test]
    fn zero_wind_matches_analytic_radial_solution() {
        let n = 65;
        let (config, model) = radial_config(n);
        let field = solve_arrival(&config, &model).unwrap();
        let (ci, cj) = (n / 2, n / 2);
        let mut max_rel = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d2 = (i as f64 - ci as f64).powi(2) + (j as f64 - cj as f64).powi(2);
                if d2 <= 25.0 {
                    continue;
                }
                let analytic = d2.sqrt() * 60.0 / 3600.0;
                let got = field.get(i, j);
                assert_ne!(got, BACKGROUND, "unreached pixel ({i},{j})");
                let rel = ((got as f64 - analytic) / analytic).abs();
                max_rel = max_rel.max(rel);
            }
        }
        assert!(max_rel <= 0.08, "max relative error {max_rel}");
    }

    #[test]
    fn two_ignitions_take_pointwise_minimum() {
        let n = 33;
        let (mut config, model) = radial_config(n);
        config.duration_h = 48.0;
        let a = IgnitionPoint {
            row: 8,
            col: 9,
            time_h: 0.0,
        };
        let b = IgnitionPoint {
            row: 24,
            col: 22,
            time_h: 0.1,
        };
        config.ignition_points = vec![a];
        let ua = solve_fine(&config, &model, None).unwrap();
        config.ignition_points = vec![b];
        let ub = solve_fine(&config, &model, None).unwrap();
        config.ignition_points = vec![a, b];
        let uab = solve_fine(&config, &model, None).unwrap();
        for k in 0..uab.len() {
            let expect = ua[k].min(ub[k]);
            if expect.is_infinite() {
                assert!(uab[k].is_infinite());
            } else {
                assert!(
                    (uab[k] - expect).abs() <= 1e-6,
                    "pixel {k}: {} vs {}",
                    uab[k],
                    expect
                );
            }
        }
    }

    #[test]
    fn no_ignition_inside_grid_is_invalid() {
        let (mut config, model) = radial_config(17);
        config.ignition_points = vec![IgnitionPoint {
            row: 99,
            col: 99,
            time_h: 0.0,
        }];
        assert!(solve_arrival(&config, &model).is_err());
        config.ignition_points.clear();
        assert!(solve_arrival(&config, &model).is_err());
    }

    #[test]
    fn solution_is_invariant_to_worklist_order() {
        let n = 25;
        let (mut config, model) = radial_config(n);
        config.wind_speed10 = 4.0;
        config.wind_direction_deg = 215.0;
        let base = solve_fine(&config, &model, None).unwrap();
        for seed in [1u64, 99] {
            let shuffled = solve_fine(&config, &model, Some(seed)).unwrap();
            for k in 0..base.len() {
                let (a, b) = (base[k], shuffled[k]);
                if a.is_infinite() {
                    assert!(b.is_infinite());
                } else {
                    assert!((a - b).abs() <= 1e-6, "pixel {k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn zero_wind_solution_has_exact_quarter_turn_symmetry() {
        let n = 33;
        let (config, model) = radial_config(n);
        let field = solve_arrival(&config, &model).unwrap();
        for i in 0..n {
            for j in 0..n {
                // (i, j) -> (j, n-1-i) is a quarter turn about the center.
                let a = field.get(i, j);
                let b = field.get(j, n - 1 - i);
                assert_eq!(a, b, "rotation symmetry broken at ({i},{j})");
            }
        }
    }

    #[test]
    fn scaling_base_ros_scales_arrival_times() {
        let n = 21;
        let (mut config, model) = radial_config(n);
        config.wind_speed10 = 2.5;
        config.wind_direction_deg = 40.0;
        config.duration_h = 1e9;
        let u1 = solve_fine(&config, &model, None).unwrap();
        // Power-of-two scaling commutes exactly with float rounding.
        let mut m2 = model.clone();
        m2.base_ros *= 2.0;
        let u2 = solve_fine(&config, &m2, None).unwrap();
        for k in 0..u1.len() {
            if u1[k].is_finite() {
                assert_eq!(u2[k], u1[k] / 2.0, "exact halving at {k}");
            }
        }
        let mut m3 = model.clone();
        m3.base_ros *= 3.0;
        let u3 = solve_fine(&config, &m3, None).unwrap();
        for k in 0..u1.len() {
            if u1[k].is_finite() {
                assert!((u3[k] - u1[k] / 3.0).abs() <= 1e-9 * u1[k].max(1.0));
            }
        }
    }

    #[test]
    fn arrival_exceeds_nearest_upwind_neighbor() {
        let n = 25;
        let (mut config, model) = radial_config(n);
        config.wind_speed10 = 5.0;
        config.wind_direction_deg = 10.0;
        let u = solve_fine(&config, &model, None).unwrap();
        let nf = n * config.supersample;
        for i in 0..nf {
            for j in 0..nf {
                let v = u[i * nf + j];
                if !v.is_finite() || v == 0.0 {
                    continue;
                }
                let mut min_nb = f64::INFINITY;
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (qi, qj) = (i as i64 + di, j as i64 + dj);
                        if qi < 0 || qj < 0 || qi >= nf as i64 || qj >= nf as i64 {
                            continue;
                        }
                        min_nb = min_nb.min(u[qi as usize * nf + qj as usize]);
                    }
                }
                if min_nb.is_finite() && v > 0.0 {
                    assert!(
                        v > min_nb,
                        "pixel ({i},{j}) = {v} not greater than min neighbor {min_nb}"
                    );
                }
            }
        }
    }

    #[test]
    fn anisotropic_transects_match_dijkstra_oracle() {
        // Coarse sanity check against the 16-neighbor oracle at the same
        // resolution; the acceptance suite runs the 4x-resolution version.
        let n = 49;
        let (mut config, model) = radial_config(n);
        config.wind_speed10 = 5.0;
        config.wind_direction_deg = 90.0; // blowing east
        config.duration_h = 1e9;
        let field = solve_arrival(&config, &model).unwrap();
        let oracle = oracle::dijkstra_16(
            &config.spec,
            &config.ignition_points,
            &model,
            config.wind_speed10,
            config.wind_direction_deg,
        );
        let c = n / 2;
        for k in 6..(n / 2 - 1) {
            for (i, j) in [
                (c, c + k), // head (east)
                (c, c - k), // back
                (c - k, c), // flank
            ] {
                let got = field.get(i, j) as f64;
                let want = oracle[i * n + j];
                let rel = ((got - want) / want).abs();
                assert!(rel <= 0.10, "transect pixel ({i},{j}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn training_configs_are_deterministic_and_uniform() {
        let template = SpreadConfig::template(spec(16, 60.0));
        let a = sample_training_configs(20, 7, &template);
        let b = sample_training_configs(20, 7, &template);
        assert_eq!(a.len(), 20);
        assert_eq!(a, b);
        for c in &a {
            assert!((0.0..5.0).contains(&c.wind_speed10));
            assert!((0.0..360.0).contains(&c.wind_direction_deg));
            assert_eq!(c.ignition_points.len(), 1);
            assert_eq!(c.ignition_points[0].time_h, 0.0);
        }

        let many = sample_training_configs(10_000, 123, &template);
        let mean = many.iter().map(|c| c.wind_speed10).sum::<f64>() / many.len() as f64;
        assert!(
            (mean - 2.5).abs() <= 0.05,
            "wind speed Monte Carlo mean {mean}"
        );
    }
}
