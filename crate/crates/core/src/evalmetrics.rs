//! Scoring of predicted arrival-time fields against ground-truth fire
//! perimeters.
//!
//! The comparison classifies every pixel at the perimeter's observation
//! time: A = burnt in both prediction and truth, B = burnt in truth only,
//! C = burnt in prediction only. From these, SC = 2A/(2A+B+C),
//! POD = A/(A+B), and FAR = C/(A+C); ratios with a zero denominator are
//! reported as not-available rather than 0 or 1.

use crate::error::{Error, Result};
use crate::geodata::{rasterize_perimeter, PerimeterPolygon};
use crate::raster::{burn_mask, ArrivalField, BurnMask, GridSpec};
use serde::{Deserialize, Serialize};

/// Pixel counts of the prediction/truth confusion regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionRegions {
    /// True positives: burnt in both.
    pub a: u64,
    /// False negatives: burnt in truth only.
    pub b: u64,
    /// False positives: burnt in prediction only.
    pub c: u64,
    pub total_pixels: u64,
}

/// Per-pixel category codes for the comparison raster.
pub const CATEGORY_NONE: f32 = 0.0;
pub const CATEGORY_A: f32 = 1.0;
pub const CATEGORY_B: f32 = 2.0;
pub const CATEGORY_C: f32 = 3.0;

/// Classifies every pixel of the prediction (thresholded at time `t`)
/// against the truth mask, returning the counts and the category raster.
pub fn confusion_with_categories(
    pred: &ArrivalField,
    truth: &BurnMask,
    t: f64,
) -> Result<(ConfusionRegions, Vec<f32>)> {
    if pred.spec != truth.spec {
        return Err(Error::invalid("prediction and truth grids do not match"));
    }
    let pred_mask = burn_mask(pred, t);
    let mut counts = ConfusionRegions {
        a: 0,
        b: 0,
        c: 0,
        total_pixels: pred.spec.len() as u64,
    };
    let mut categories = vec![CATEGORY_NONE; pred.spec.len()];
    for (k, (&p, &q)) in pred_mask.values().iter().zip(truth.values()).enumerate() {
        match (p, q) {
            (true, true) => {
                counts.a += 1;
                categories[k] = CATEGORY_A;
            }
            (false, true) => {
                counts.b += 1;
                categories[k] = CATEGORY_B;
            }
            (true, false) => {
                counts.c += 1;
                categories[k] = CATEGORY_C;
            }
            (false, false) => {}
        }
    }
    Ok((counts, categories))
}

/// Confusion counts at evaluation time `t`.
pub fn confusion(pred: &ArrivalField, truth: &BurnMask, t: f64) -> Result<ConfusionRegions> {
    Ok(confusion_with_categories(pred, truth, t)?.0)
}

/// `(sc, pod, far)`; `None` encodes a zero-denominator ratio.
pub fn scores(regions: &ConfusionRegions) -> (Option<f64>, Option<f64>, Option<f64>) {
    let (a, b, c) = (regions.a as f64, regions.b as f64, regions.c as f64);
    let ratio = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };
    (
        ratio(2.0 * a, 2.0 * a + b + c),
        ratio(a, a + b),
        ratio(c, a + c),
    )
}

/// Parses "HH:MM" (hours may exceed 24 and may use more than two digits)
/// into minutes.
pub fn parse_hhmm(s: &str) -> Result<i64> {
    let mut parts = s.split(':');
    let (h, m) = match (parts.next(), parts.next(), parts.next()) {
        (Some(h), Some(m), None) => (h, m),
        _ => {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected HH:MM, got \"{s}\""),
            })
        }
    };
    let hours: i64 = h.parse().map_err(|_| Error::Parse {
        line: 0,
        message: format!("bad hours in \"{s}\""),
    })?;
    let minutes: i64 = m.parse().map_err(|_| Error::Parse {
        line: 0,
        message: format!("bad minutes in \"{s}\""),
    })?;
    if hours < 0 || !(0..60).contains(&minutes) {
        return Err(Error::Parse {
            line: 0,
            message: format!("time \"{s}\" out of range"),
        });
    }
    Ok(hours * 60 + minutes)
}

/// Signed difference (predicted minus reported) in minutes.
pub fn ignition_error(predicted: &str, reported: &str) -> Result<i64> {
    Ok(parse_hhmm(predicted)? - parse_hhmm(reported)?)
}

/// Full comparison of one prediction against one perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub case_id: String,
    /// Perimeter observation time used for the comparison, hours.
    pub evaluation_time_h: f64,
    pub counts: ConfusionRegions,
    pub sc: Option<f64>,
    pub pod: Option<f64>,
    pub far: Option<f64>,
    /// Predicted minus reported ignition time, minutes; absent when no
    /// reported time was supplied.
    pub ignition_error_minutes: Option<i64>,
}

impl ScoreReport {
    /// Two-decimal display used in result tables; N/A for undefined ratios.
    pub fn summary_line(&self) -> String {
        let fmt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.2}"),
            None => "N/A".to_string(),
        };
        format!(
            "{}: SC={} POD={} FAR={}",
            self.case_id,
            fmt(self.sc),
            fmt(self.pod),
            fmt(self.far)
        )
    }
}

/// Category raster produced alongside a [`ScoreReport`].
pub struct CategoryRaster {
    pub spec: GridSpec,
    /// Codes: 0 none, 1 A, 2 B, 3 C.
    pub values: Vec<f32>,
}

/// Rasterizes the perimeter, computes the confusion at its observation
/// time, and derives scores plus the A/B/C category raster. When a reported
/// ignition time is supplied the prediction's ignition estimate must be
/// given as well (HH:MM) to produce the error.
pub fn evaluate_case(
    case_id: &str,
    pred: &ArrivalField,
    perimeter: &PerimeterPolygon,
    predicted_ignition: Option<&str>,
    reported_ignition: Option<&str>,
) -> Result<(ScoreReport, CategoryRaster)> {
    let truth = rasterize_perimeter(perimeter, &pred.spec)?;
    let (counts, categories) = confusion_with_categories(pred, &truth, perimeter.observed_time_h)?;
    let (sc, pod, far) = scores(&counts);
    let ignition_error_minutes = match (predicted_ignition, reported_ignition) {
        (Some(p), Some(r)) => Some(ignition_error(p, r)?),
        _ => None,
    };
    Ok((
        ScoreReport {
            case_id: case_id.to_string(),
            evaluation_time_h: perimeter.observed_time_h,
            counts,
            sc,
            pod,
            far,
            ignition_error_minutes,
        },
        CategoryRaster {
            spec: pred.spec.clone(),
            values: categories,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BACKGROUND;

    fn spec(n: usize) -> GridSpec {
        GridSpec::with_size_unchecked(n, n, 60.0, 34.0, -118.0).unwrap()
    }

    fn mask_from(spec: &GridSpec, burned: &[(usize, usize)]) -> BurnMask {
        let mut v = vec![false; spec.len()];
        for &(i, j) in burned {
            v[spec.idx(i, j)] = true;
        }
        BurnMask::new(spec.clone(), v).unwrap()
    }

    fn field_from(spec: &GridSpec, burned: &[(usize, usize)]) -> ArrivalField {
        let mut v = vec![BACKGROUND; spec.len()];
        for &(i, j) in burned {
            v[spec.idx(i, j)] = 1.0;
        }
        ArrivalField::new(spec.clone(), v).unwrap()
    }

    #[test]
    fn perfect_prediction() {
        let s = spec(8);
        let burned: Vec<_> = (0..10).map(|k| (k / 4, k % 4)).collect();
        let pred = field_from(&s, &burned);
        let truth = mask_from(&s, &burned);
        let r = confusion(&pred, &truth, 10.0).unwrap();
        assert_eq!((r.a, r.b, r.c), (10, 0, 0));
        let (sc, pod, far) = scores(&r);
        assert_eq!(sc, Some(1.0));
        assert_eq!(pod, Some(1.0));
        assert_eq!(far, Some(0.0));
    }

    #[test]
    fn empty_prediction() {
        let s = spec(8);
        let truth = mask_from(&s, &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]);
        let pred = ArrivalField::background(s);
        let r = confusion(&pred, &truth, 10.0).unwrap();
        assert_eq!((r.a, r.b, r.c), (0, 5, 0));
        let (sc, pod, far) = scores(&r);
        assert_eq!(sc, Some(0.0));
        assert_eq!(pod, Some(0.0));
        assert_eq!(far, None, "0/0 is not-available, never 0");
    }

    #[test]
    fn hand_enumerated_four_by_four() {
        let s = spec(4);
        // Prediction burns 3 pixels, truth burns 3, overlap 2.
        let pred = field_from(&s, &[(0, 0), (0, 1), (2, 2)]);
        let truth = mask_from(&s, &[(0, 0), (0, 1), (3, 3)]);
        let r = confusion(&pred, &truth, 5.0).unwrap();
        assert_eq!((r.a, r.b, r.c), (2, 1, 1));
        let (sc, pod, far) = scores(&r);
        assert!((sc.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((pod.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((far.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_formats_to_two_decimals() {
        let report = ScoreReport {
            case_id: "bobcat".into(),
            evaluation_time_h: 56.25,
            counts: ConfusionRegions {
                a: 0,
                b: 0,
                c: 0,
                total_pixels: 0,
            },
            sc: Some(0.80),
            pod: Some(0.97),
            far: Some(0.32),
            ignition_error_minutes: None,
        };
        assert_eq!(report.summary_line(), "bobcat: SC=0.80 POD=0.97 FAR=0.32");
    }

    #[test]
    fn ignition_error_examples() {
        assert_eq!(ignition_error("23:48", "23:07").unwrap(), 41);
        assert_eq!(ignition_error("21:30", "21:30").unwrap(), 0);
        assert_eq!(ignition_error("27:53", "23:40").unwrap(), 253);
        assert_eq!(ignition_error("23:04", "23:40").unwrap(), -36);
        assert!(ignition_error("23:xx", "23:40").is_err());
        assert!(ignition_error("23", "23:40").is_err());
    }

    #[test]
    fn scores_invariant_under_supersampling() {
        let s = spec(4);
        let pred = field_from(&s, &[(0, 0), (0, 1), (2, 2)]);
        let truth = mask_from(&s, &[(0, 0), (0, 1), (3, 3)]);
        let r1 = confusion(&pred, &truth, 5.0).unwrap();

        // Split every pixel into 4.
        let s2 = spec(8);
        let up = |pts: &[(usize, usize)]| -> Vec<(usize, usize)> {
            pts.iter()
                .flat_map(|&(i, j)| {
                    [
                        (2 * i, 2 * j),
                        (2 * i + 1, 2 * j),
                        (2 * i, 2 * j + 1),
                        (2 * i + 1, 2 * j + 1),
                    ]
                })
                .collect()
        };
        let pred2 = field_from(&s2, &up(&[(0, 0), (0, 1), (2, 2)]));
        let truth2 = mask_from(&s2, &up(&[(0, 0), (0, 1), (3, 3)]));
        let r2 = confusion(&pred2, &truth2, 5.0).unwrap();
        assert_eq!((r2.a, r2.b, r2.c), (4 * r1.a, 4 * r1.b, 4 * r1.c));
        assert_eq!(scores(&r1), scores(&r2));
    }

    #[test]
    fn pod_one_iff_truth_subset_and_far_zero_iff_pred_subset() {
        let s = spec(6);
        let pred = field_from(&s, &[(1, 1), (1, 2), (2, 1)]);
        let truth_subset = mask_from(&s, &[(1, 1), (1, 2)]);
        let r = confusion(&pred, &truth_subset, 5.0).unwrap();
        let (_, pod, far) = scores(&r);
        assert_eq!(pod, Some(1.0));
        assert!(far.unwrap() > 0.0);

        let truth_superset = mask_from(&s, &[(1, 1), (1, 2), (2, 1), (2, 2)]);
        let r = confusion(&pred, &truth_superset, 5.0).unwrap();
        let (_, pod, far) = scores(&r);
        assert!(pod.unwrap() < 1.0);
        assert_eq!(far, Some(0.0));
    }

    #[test]
    fn sc_symmetric_in_b_and_c() {
        let r1 = ConfusionRegions {
            a: 10,
            b: 3,
            c: 7,
            total_pixels: 100,
        };
        let r2 = ConfusionRegions {
            a: 10,
            b: 7,
            c: 3,
            total_pixels: 100,
        };
        assert_eq!(scores(&r1).0, scores(&r2).0);
    }

    #[test]
    fn spec_mismatch_is_invalid() {
        let pred = ArrivalField::background(spec(4));
        let truth = mask_from(&spec(8), &[]);
        assert!(confusion(&pred, &truth, 1.0).is_err());
    }

    #[test]
    fn randomized_confusion_matches_brute_force() {
        use rand::Rng;
        let mut rng = crate::rng::stream_from(321);
        for case in 0..25 {
            let n = rng.gen_range(4..12);
            let s = spec(n);
            let t = rng.gen_range(1.0..10.0);
            let pred_vals: Vec<f32> = (0..n * n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        BACKGROUND
                    } else {
                        rng.gen_range(0.0..12.0)
                    }
                })
                .collect();
            let truth_vals: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(0.4)).collect();
            let pred = ArrivalField::new(s.clone(), pred_vals.clone()).unwrap();
            let truth = BurnMask::new(s.clone(), truth_vals.clone()).unwrap();
            let r = confusion(&pred, &truth, t).unwrap();

            // Scalar re-derivation, pixel by pixel.
            let (mut a, mut b, mut c) = (0u64, 0u64, 0u64);
            for k in 0..n * n {
                let p = pred_vals[k] != BACKGROUND && pred_vals[k] as f64 <= t;
                let q = truth_vals[k];
                if p && q {
                    a += 1;
                } else if !p && q {
                    b += 1;
                } else if p && !q {
                    c += 1;
                }
            }
            assert_eq!((r.a, r.b, r.c), (a, b, c), "case {case}");
        }
    }
}
