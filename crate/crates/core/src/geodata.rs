//! Ingestion of real active-fire detection extracts and ground-truth
//! perimeter polygons.
//!
//! Detections arrive as a CSV extract with the fixed header
//! `lat,lon,time_utc,confidence` (UTF-8, comma-separated, RFC 3339
//! timestamps, confidence one of low/nominal/high in any case). Perimeters
//! arrive as geographic-JSON polygon files carrying an
//! `observed_time_hours` property; coordinates are `[lon, lat]` pairs and
//! every ring is closed.

use crate::error::{Error, Result};
use crate::raster::{latlon_to_pixel_f64, BurnMask, GridSpec, NormalizedField};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

/// Detection confidence tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Low,
    Nominal,
    High,
}

impl Confidence {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Some(Confidence::Low),
            "nominal" => Some(Confidence::Nominal),
            "high" => Some(Confidence::High),
            _ => None,
        }
    }
}

/// One satellite active-fire detection.
#[derive(Debug, Clone, PartialEq)]
pub struct AfDetection {
    pub lat: f64,
    pub lon: f64,
    pub time_utc: DateTime<Utc>,
    pub confidence: Confidence,
}

/// Parses an active-fire CSV extract. The header row must match the
/// documented schema; malformed rows are rejected with their line number.
/// An empty file (header only) yields an empty list.
pub fn parse_af_csv(path: &Path) -> Result<Vec<AfDetection>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["lat", "lon", "time_utc", "confidence"];
    for col in expected {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema(format!(
                "{}: missing column \"{col}\" (header must be lat,lon,time_utc,confidence)",
                path.display()
            )));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (c_lat, c_lon, c_time, c_conf) = (
        col("lat"),
        col("lon"),
        col("time_utc"),
        col("confidence"),
    );

    let mut out = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or(Error::Parse {
                line,
                message: "missing field".into(),
            })
        };
        let lat: f64 = field(c_lat)?.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad latitude \"{}\"", field(c_lat).unwrap_or("")),
        })?;
        let lon: f64 = field(c_lon)?.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad longitude \"{}\"", field(c_lon).unwrap_or("")),
        })?;
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::Parse {
                line,
                message: format!("coordinates ({lat}, {lon}) out of range"),
            });
        }
        let time_utc = DateTime::parse_from_rfc3339(field(c_time)?)
            .map_err(|e| Error::Parse {
                line,
                message: format!("bad time_utc: {e}"),
            })?
            .with_timezone(&Utc);
        let confidence = Confidence::parse(field(c_conf)?).ok_or_else(|| Error::Parse {
            line,
            message: format!("bad confidence \"{}\"", field(c_conf).unwrap_or("")),
        })?;
        out.push(AfDetection {
            lat,
            lon,
            time_utc,
            confidence,
        });
    }
    Ok(out)
}

/// Grids detections onto `spec` as a normalized measurement field.
///
/// Detections are filtered to the confidence `tiers` and to
/// `[0, window_h]` hours from `ignition_day_start`; each maps to the pixel
/// containing it with the value in hours since day start. Cells hit by
/// several detections keep the earliest time. Detections outside the domain
/// are skipped (counted, not an error). Values normalize by 72 h with the
/// remaining pixels at background 1.
pub fn grid_detections(
    detections: &[AfDetection],
    spec: &GridSpec,
    ignition_day_start: DateTime<Utc>,
    tiers: &HashSet<Confidence>,
    window_h: f64,
) -> Result<(NormalizedField, usize)> {
    if !(window_h > 0.0 && window_h <= 72.0) {
        return Err(Error::invalid(format!(
            "window must be in (0, 72] hours, got {window_h}"
        )));
    }
    let mut hours = vec![f64::INFINITY; spec.len()];
    let mut skipped = 0usize;
    for d in detections {
        if !tiers.contains(&d.confidence) {
            continue;
        }
        let h = (d.time_utc - ignition_day_start).num_seconds() as f64 / 3600.0;
        if h < 0.0 || h > window_h {
            continue;
        }
        let (rf, cf) = latlon_to_pixel_f64(spec, d.lat, d.lon);
        let (row, col) = (rf.round(), cf.round());
        if row < 0.0 || col < 0.0 || row >= spec.ny as f64 || col >= spec.nx as f64 {
            skipped += 1;
            continue;
        }
        let idx = spec.idx(row as usize, col as usize);
        if h < hours[idx] {
            hours[idx] = h;
        }
    }
    let values = hours
        .iter()
        .map(|&h| {
            if h.is_finite() {
                ((h / 72.0) as f32).min(1.0)
            } else {
                1.0
            }
        })
        .collect();
    Ok((NormalizedField::new(spec.clone(), values)?, skipped))
}

/// A ground-truth fire extent polygon in geographic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PerimeterPolygon {
    /// Closed rings of (lat, lon) vertices; the first is the outer
    /// boundary, the rest are holes. Containment uses the even-odd rule, so
    /// ring orientation does not matter.
    pub rings: Vec<Vec<(f64, f64)>>,
    /// Observation time, hours since the start of the ignition day.
    pub observed_time_h: f64,
}

#[derive(Deserialize)]
struct GeoJsonFeature {
    #[serde(rename = "type")]
    kind: String,
    properties: GeoJsonProperties,
    geometry: GeoJsonGeometry,
}

#[derive(Deserialize)]
struct GeoJsonProperties {
    observed_time_hours: f64,
}

#[derive(Deserialize)]
struct GeoJsonGeometry {
    #[serde(rename = "type")]
    kind: String,
    coordinates: Vec<Vec<[f64; 2]>>,
}

impl PerimeterPolygon {
    pub fn new(rings: Vec<Vec<(f64, f64)>>, observed_time_h: f64) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::invalid("perimeter must have at least one ring"));
        }
        for ring in &rings {
            if ring.len() < 4 || ring.first() != ring.last() {
                return Err(Error::invalid(
                    "each ring must be closed (first point = last) with >= 3 distinct vertices",
                ));
            }
            let distinct: HashSet<_> = ring[..ring.len() - 1]
                .iter()
                .map(|&(a, b)| (a.to_bits(), b.to_bits()))
                .collect();
            if distinct.len() < 3 {
                return Err(Error::invalid("degenerate ring with < 3 distinct vertices"));
            }
        }
        Ok(PerimeterPolygon {
            rings,
            observed_time_h,
        })
    }

    /// Loads a geographic-JSON polygon feature. Coordinates are
    /// `[lon, lat]`; the feature carries `observed_time_hours`.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let feature: GeoJsonFeature = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        if feature.kind != "Feature" || feature.geometry.kind != "Polygon" {
            return Err(Error::Schema(format!(
                "{}: expected a Feature with Polygon geometry",
                path.display()
            )));
        }
        let rings = feature
            .geometry
            .coordinates
            .into_iter()
            .map(|ring| ring.into_iter().map(|[lon, lat]| (lat, lon)).collect())
            .collect();
        Self::new(rings, feature.properties.observed_time_hours)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let coordinates: Vec<Vec<[f64; 2]>> = self
            .rings
            .iter()
            .map(|ring| ring.iter().map(|&(lat, lon)| [lon, lat]).collect())
            .collect();
        let json = serde_json::json!({
            "type": "Feature",
            "properties": {"observed_time_hours": self.observed_time_h},
            "geometry": {"type": "Polygon", "coordinates": coordinates},
        });
        std::fs::write(path, serde_json::to_string_pretty(&json).expect("serializes"))
            .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Vertex nudge applied before containment tests so pixel centers landing
/// exactly on an edge break ties deterministically.
const VERTEX_PERTURB_DEG: f64 = 1e-12;

/// Projects the perimeter's rings into fractional pixel coordinates.
fn rings_in_pixel_space(poly: &PerimeterPolygon, spec: &GridSpec) -> Vec<Vec<(f64, f64)>> {
    poly.rings
        .iter()
        .map(|ring| {
            ring.iter()
                .map(|&(lat, lon)| {
                    latlon_to_pixel_f64(
                        spec,
                        lat + VERTEX_PERTURB_DEG,
                        lon + VERTEX_PERTURB_DEG,
                    )
                })
                .collect()
        })
        .collect()
}

/// Even-odd containment of a point against a set of rings in the same
/// coordinate system (ray cast toward +x).
pub fn point_in_rings(rings: &[Vec<(f64, f64)>], y: f64, x: f64) -> bool {
    let mut inside = false;
    for ring in rings {
        for edge in ring.windows(2) {
            let (y1, x1) = edge[0];
            let (y2, x2) = edge[1];
            if (y1 > y) != (y2 > y) {
                let x_int = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
                if x < x_int {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Rasterizes a perimeter: a pixel is burned iff its center lies inside the
/// polygon under the even-odd rule. Uses a scanline fill; the brute-force
/// per-pixel oracle in the tests must agree exactly.
pub fn rasterize_perimeter(poly: &PerimeterPolygon, spec: &GridSpec) -> Result<BurnMask> {
    let rings = rings_in_pixel_space(poly, spec);
    // The polygon must overlap the domain.
    let (mut min_r, mut max_r) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_c, mut max_c) = (f64::INFINITY, f64::NEG_INFINITY);
    for ring in &rings {
        for &(r, c) in ring {
            min_r = min_r.min(r);
            max_r = max_r.max(r);
            min_c = min_c.min(c);
            max_c = max_c.max(c);
        }
    }
    if max_r < 0.0 || max_c < 0.0 || min_r > spec.ny as f64 - 1.0 || min_c > spec.nx as f64 - 1.0 {
        return Err(Error::invalid("perimeter polygon lies outside the domain"));
    }

    let mut values = vec![false; spec.len()];
    let row_lo = min_r.floor().max(0.0) as usize;
    let row_hi = (max_r.ceil() as i64).min(spec.ny as i64 - 1) as usize;
    let mut crossings: Vec<f64> = Vec::new();
    for row in row_lo..=row_hi {
        let y = row as f64;
        crossings.clear();
        for ring in &rings {
            for edge in ring.windows(2) {
                let (y1, x1) = edge[0];
                let (y2, x2) = edge[1];
                if (y1 > y) != (y2 > y) {
                    crossings.push(x1 + (y - y1) / (y2 - y1) * (x2 - x1));
                }
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks_exact(2) {
            // Pixel centers sit at integer coordinates. Intervals are
            // left-closed and right-open, matching the ray-cast rule, so a
            // center on the left crossing counts as inside.
            let to = pair[1];
            if to < 0.0 {
                continue;
            }
            let mut col = pair[0].ceil().max(0.0) as usize;
            while (col as f64) < to && col < spec.nx {
                values[spec.idx(row, col)] = true;
                col += 1;
            }
        }
    }
    BurnMask::new(spec.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::pixel_to_latlon;
    use rand::Rng;
    use std::io::Write;

    fn spec(n: usize) -> GridSpec {
        GridSpec::with_size_unchecked(n, n, 60.0, 34.26, -117.96).unwrap()
    }

    fn write_csv(rows: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "lat,lon,time_utc,confidence").unwrap();
        for r in rows {
            writeln!(f, "{r}").unwrap();
        }
        f
    }

    #[test]
    fn parses_documented_rows() {
        let f = write_csv(&[
            "34.26,-117.96,2020-09-07T03:15:00Z,high",
            "34.27,-117.95,2020-09-07T03:15:00Z,HIGH",
            "34.28,-117.94,2020-09-07T14:30:00Z,Nominal",
        ]);
        let rows = parse_af_csv(f.path()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].lat, 34.26);
        assert_eq!(rows[0].lon, -117.96);
        assert_eq!(rows[0].confidence, Confidence::High);
        assert_eq!(rows[1].confidence, Confidence::High);
        assert_eq!(rows[2].confidence, Confidence::Nominal);
    }

    #[test]
    fn empty_file_is_empty_list() {
        let f = write_csv(&[]);
        assert!(parse_af_csv(f.path()).unwrap().is_empty());
    }

    #[test]
    fn malformed_latitude_reports_line() {
        let f = write_csv(&[
            "34.26,-117.96,2020-09-07T03:15:00Z,high",
            "abc,-117.96,2020-09-07T03:15:00Z,high",
        ]);
        match parse_af_csv(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_schema_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "lat,lon,when,confidence").unwrap();
        assert!(matches!(parse_af_csv(f.path()), Err(Error::Schema(_))));
    }

    fn day_start() -> DateTime<Utc> {
        "2020-09-06T00:00:00Z".parse().unwrap()
    }

    fn detection(lat: f64, lon: f64, hours: f64, confidence: Confidence) -> AfDetection {
        AfDetection {
            lat,
            lon,
            time_utc: day_start() + chrono::Duration::seconds((hours * 3600.0) as i64),
            confidence,
        }
    }

    #[test]
    fn collisions_keep_the_earliest_time() {
        let s = spec(17);
        let (lat, lon) = pixel_to_latlon(&s, 8, 8);
        let tiers: HashSet<_> = [Confidence::High].into();
        for order in [[30.0, 35.0], [35.0, 30.0]] {
            let dets: Vec<_> = order
                .iter()
                .map(|&h| detection(lat, lon, h, Confidence::High))
                .collect();
            let (field, skipped) = grid_detections(&dets, &s, day_start(), &tiers, 48.0).unwrap();
            assert_eq!(skipped, 0);
            assert_eq!(field.get(8, 8), (30.0f64 / 72.0) as f32);
        }
    }

    #[test]
    fn zero_detections_is_all_background() {
        let s = spec(16);
        let tiers: HashSet<_> = [Confidence::High].into();
        let (field, _) = grid_detections(&[], &s, day_start(), &tiers, 48.0).unwrap();
        assert!(field.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn detection_600m_east_lands_ten_pixels_east() {
        let s = spec(65);
        let lon = s.origin_lon + 600.0 / crate::raster::m_per_deg_lon(s.origin_lat);
        let dets = [detection(s.origin_lat, lon, 30.0, Confidence::High)];
        let tiers: HashSet<_> = [Confidence::High].into();
        let (field, _) = grid_detections(&dets, &s, day_start(), &tiers, 48.0).unwrap();
        assert_eq!(field.get(32, 42), (30.0f64 / 72.0) as f32);
    }

    #[test]
    fn out_of_domain_detections_are_skipped() {
        let s = spec(16);
        let dets = [detection(s.origin_lat + 1.0, s.origin_lon, 10.0, Confidence::High)];
        let tiers: HashSet<_> = [Confidence::High].into();
        let (field, skipped) = grid_detections(&dets, &s, day_start(), &tiers, 48.0).unwrap();
        assert_eq!(skipped, 1);
        assert!(field.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn tier_monotonicity() {
        let s = spec(33);
        let mut rng = crate::rng::stream_from(11);
        let dets: Vec<_> = (0..200)
            .map(|_| {
                let (lat, lon) = pixel_to_latlon(
                    &s,
                    rng.gen_range(0..s.ny),
                    rng.gen_range(0..s.nx),
                );
                let conf = match rng.gen_range(0..3) {
                    0 => Confidence::Low,
                    1 => Confidence::Nominal,
                    _ => Confidence::High,
                };
                detection(lat, lon, rng.gen_range(0.0..48.0), conf)
            })
            .collect();
        let high: HashSet<_> = [Confidence::High].into();
        let both: HashSet<_> = [Confidence::High, Confidence::Nominal].into();
        let (fh, _) = grid_detections(&dets, &s, day_start(), &high, 48.0).unwrap();
        let (fb, _) = grid_detections(&dets, &s, day_start(), &both, 48.0).unwrap();
        for k in 0..fh.values().len() {
            if fh.values()[k] < 1.0 {
                assert!(fb.values()[k] < 1.0, "tier monotonicity broken at {k}");
                assert!(fb.values()[k] <= fh.values()[k], "earliest-wins across tiers");
            }
        }
    }

    /// Square covering exactly the central 4x4 pixel centers.
    #[test]
    fn square_polygon_covers_sixteen_pixels() {
        let s = spec(16);
        // Pixel centers (6..=9, 6..=9); ring slightly beyond those centers.
        let (lat_hi, lon_lo) = pixel_to_latlon(&s, 6, 6);
        let (lat_lo, lon_hi) = pixel_to_latlon(&s, 9, 9);
        let d_lat = 0.3 * 60.0 / crate::raster::M_PER_DEG_LAT;
        let d_lon = 0.3 * 60.0 / crate::raster::m_per_deg_lon(s.origin_lat);
        let ring = vec![
            (lat_lo - d_lat, lon_lo - d_lon),
            (lat_lo - d_lat, lon_hi + d_lon),
            (lat_hi + d_lat, lon_hi + d_lon),
            (lat_hi + d_lat, lon_lo - d_lon),
            (lat_lo - d_lat, lon_lo - d_lon),
        ];
        let poly = PerimeterPolygon::new(vec![ring], 35.0).unwrap();
        let mask = rasterize_perimeter(&poly, &s).unwrap();
        assert_eq!(mask.count_burned(), 16);
        for i in 6..=9 {
            for j in 6..=9 {
                assert!(mask.get(i, j));
            }
        }
    }

    #[test]
    fn polygon_outside_domain_is_invalid() {
        let s = spec(16);
        let ring = vec![
            (40.0, -100.0),
            (40.0, -99.9),
            (40.1, -99.9),
            (40.0, -100.0),
        ];
        let poly = PerimeterPolygon::new(vec![ring], 1.0).unwrap();
        assert!(rasterize_perimeter(&poly, &s).is_err());
    }

    #[test]
    fn degenerate_ring_is_invalid() {
        let ring = vec![(34.0, -118.0), (34.0, -118.0), (34.0, -118.0), (34.0, -118.0)];
        assert!(PerimeterPolygon::new(vec![ring], 1.0).is_err());
        let open = vec![(34.0, -118.0), (34.1, -118.0), (34.1, -117.9), (34.0, -117.9)];
        assert!(PerimeterPolygon::new(vec![open], 1.0).is_err());
    }

    fn random_ring(
        rng: &mut rand_chacha::ChaCha8Rng,
        s: &GridSpec,
        center: (f64, f64),
        radius_px: f64,
    ) -> Vec<(f64, f64)> {
        // Star-shaped random polygon around a center, in pixel space first.
        let n = rng.gen_range(5..12);
        let mut pts = Vec::with_capacity(n + 1);
        for k in 0..n {
            let ang = k as f64 / n as f64 * std::f64::consts::TAU;
            let r = radius_px * rng.gen_range(0.4..1.0);
            let row = center.0 + r * ang.sin() + rng.gen_range(-0.2..0.2);
            let col = center.1 + r * ang.cos() + rng.gen_range(-0.2..0.2);
            let i = row.clamp(0.0, s.ny as f64 - 1.0);
            let j = col.clamp(0.0, s.nx as f64 - 1.0);
            // Convert fractional pixel coords to lat/lon via the inverse of
            // the tangent-plane mapping.
            let cy = (s.ny as f64 - 1.0) / 2.0;
            let cx = (s.nx as f64 - 1.0) / 2.0;
            let lat = s.origin_lat + (cy - i) * s.resolution_m / crate::raster::M_PER_DEG_LAT;
            let lon = s.origin_lon
                + (j - cx) * s.resolution_m / crate::raster::m_per_deg_lon(s.origin_lat);
            pts.push((lat, lon));
        }
        pts.push(pts[0]);
        pts
    }

    #[test]
    fn scanline_matches_ray_casting_brute_force() {
        let s = spec(24);
        let mut rng = crate::rng::stream_from(777);
        for case in 0..100 {
            let outer = random_ring(&mut rng, &s, (11.5, 11.5), 9.0);
            let mut rings = vec![outer];
            if case % 3 == 0 {
                rings.push(random_ring(&mut rng, &s, (11.5, 11.5), 3.0));
            }
            let poly = PerimeterPolygon::new(rings, 10.0);
            let poly = match poly {
                Ok(p) => p,
                Err(_) => continue,
            };
            let mask = rasterize_perimeter(&poly, &s).unwrap();
            let px_rings = rings_in_pixel_space(&poly, &s);
            for i in 0..s.ny {
                for j in 0..s.nx {
                    let brute = point_in_rings(&px_rings, i as f64, j as f64);
                    assert_eq!(
                        mask.get(i, j),
                        brute,
                        "case {case}: mismatch at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn polygon_with_hole_is_an_annulus() {
        let s = spec(32);
        let center = pixel_to_latlon(&s, 15, 15);
        let mk_ring = |radius_px: f64| -> Vec<(f64, f64)> {
            let mut pts: Vec<(f64, f64)> = (0..32)
                .map(|k| {
                    let ang = k as f64 / 32.0 * std::f64::consts::TAU;
                    let dr = radius_px * 60.0;
                    (
                        center.0 + dr * ang.sin() / crate::raster::M_PER_DEG_LAT,
                        center.1
                            + dr * ang.cos() / crate::raster::m_per_deg_lon(s.origin_lat),
                    )
                })
                .collect();
            pts.push(pts[0]);
            pts
        };
        let outer_only =
            rasterize_perimeter(&PerimeterPolygon::new(vec![mk_ring(12.0)], 1.0).unwrap(), &s)
                .unwrap();
        let hole_only =
            rasterize_perimeter(&PerimeterPolygon::new(vec![mk_ring(5.0)], 1.0).unwrap(), &s)
                .unwrap();
        let annulus = rasterize_perimeter(
            &PerimeterPolygon::new(vec![mk_ring(12.0), mk_ring(5.0)], 1.0).unwrap(),
            &s,
        )
        .unwrap();
        assert_eq!(
            annulus.count_burned(),
            outer_only.count_burned() - hole_only.count_burned()
        );
    }

    #[test]
    fn perimeter_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("perim.json");
        let ring = vec![
            (34.0, -118.0),
            (34.1, -118.0),
            (34.1, -117.9),
            (34.0, -117.9),
            (34.0, -118.0),
        ];
        let poly = PerimeterPolygon::new(vec![ring], 35.08).unwrap();
        poly.save(&path).unwrap();
        let back = PerimeterPolygon::load(&path).unwrap();
        assert_eq!(back, poly);
    }
}
