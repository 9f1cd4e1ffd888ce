//! Dominance relations and 2-D non-dominated set extraction.
//!
//! JQT works in the (J, bitrate) plane (max J, min b); JRQT works in the
//! (M, quality) plane (min M, max v). Extraction is the standard skyline
//! sweep: sort by the minimized coordinate, keep the running best of the
//! maximized one.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeasurementPoint, ParameterSpace, QualityMetricKey};
use crate::objective::{compute_j, compute_m, JqtParams, MParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", content = "params", rename_all = "lowercase")]
pub enum FrontStrategy {
    Jqt(JqtParams),
    Jrqt(MParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub point: MeasurementPoint,
    /// J for JQT fronts, M for JRQT fronts.
    pub objective: f64,
    /// v under the front's quality metric.
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    #[serde(flatten)]
    pub strategy: FrontStrategy,
    pub metric: QualityMetricKey,
    pub points: Vec<FrontPoint>,
}

/// JQT dominance on (J, b): at least as good in both, strictly better in one.
pub fn dominates_jqt(a: (f64, f64), c: (f64, f64)) -> bool {
    a.0 >= c.0 && a.1 <= c.1 && (a.0 > c.0 || a.1 < c.1)
}

/// JRQT dominance on (M, v): min M, max v, strict in at least one.
pub fn dominates_jrqt(a: (f64, f64), c: (f64, f64)) -> bool {
    a.0 <= c.0 && a.1 >= c.1 && (a.0 < c.0 || a.1 > c.1)
}

/// Deterministic preference among points with coincident objective pairs:
/// lower decode time, then lower bitrate, then lower resolution, then
/// higher QP. `Less` means preferred.
pub fn tie_break(a: &MeasurementPoint, b: &MeasurementPoint) -> Ordering {
    a.decode_time
        .total_cmp(&b.decode_time)
        .then_with(|| a.bitrate.total_cmp(&b.bitrate))
        .then_with(|| a.resolution.cmp(&b.resolution))
        .then_with(|| b.qp.cmp(&a.qp))
}

struct Scored {
    point: MeasurementPoint,
    quality: f64,
    objective: f64,
    /// Minimized coordinate (b for JQT, M for JRQT).
    min_coord: f64,
    /// Maximized coordinate (J for JQT, v for JRQT).
    max_coord: f64,
}

fn skyline(mut scored: Vec<Scored>) -> Vec<FrontPoint> {
    // Sort by minimized coordinate, best maximized coordinate first within
    // ties, preferred representative first among exact duplicates.
    scored.sort_by(|a, b| {
        a.min_coord
            .total_cmp(&b.min_coord)
            .then_with(|| b.max_coord.total_cmp(&a.max_coord))
            .then_with(|| tie_break(&a.point, &b.point))
    });

    let mut front = Vec::new();
    let mut best: Option<f64> = None;
    for s in scored {
        if best.is_none_or(|b| s.max_coord > b) {
            best = Some(s.max_coord);
            front.push(FrontPoint {
                point: s.point,
                objective: s.objective,
                quality: s.quality,
            });
        }
    }
    front
}

fn quality_of(
    point: &MeasurementPoint,
    metric: QualityMetricKey,
) -> Result<f64> {
    point.quality(metric).ok_or(Error::MissingQuality(match metric {
        QualityMetricKey::Psnr => "psnr",
        QualityMetricKey::Xpsnr => "xpsnr",
        QualityMetricKey::Vmaf => "vmaf",
    }))
}

/// Non-dominated subset under (max J, min bitrate).
pub fn front_jqt(
    space: &ParameterSpace,
    metric: QualityMetricKey,
    params: JqtParams,
) -> Result<ParetoFront> {
    if space.is_empty() {
        return Err(Error::EmptySpace(space.sequence_id.clone()));
    }
    let scored = space
        .points
        .iter()
        .map(|p| {
            let quality = quality_of(p, metric)?;
            let objective = compute_j(quality, p.decode_time, params)?;
            Ok(Scored {
                point: p.clone(),
                quality,
                objective,
                min_coord: p.bitrate,
                max_coord: objective,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParetoFront {
        strategy: FrontStrategy::Jqt(params),
        metric,
        points: skyline(scored),
    })
}

/// Non-dominated subset under (min M, max quality).
pub fn front_jrqt(
    space: &ParameterSpace,
    metric: QualityMetricKey,
    params: MParams,
) -> Result<ParetoFront> {
    if space.is_empty() {
        return Err(Error::EmptySpace(space.sequence_id.clone()));
    }
    let scored = space
        .points
        .iter()
        .map(|p| {
            let quality = quality_of(p, metric)?;
            let objective = compute_m(p.decode_time, p.bitrate, params)?;
            Ok(Scored {
                point: p.clone(),
                quality,
                objective,
                min_coord: objective,
                max_coord: quality,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParetoFront {
        strategy: FrontStrategy::Jrqt(params),
        metric,
        points: skyline(scored),
    })
}

/// Row layout of the front JSON export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontExportRow {
    pub resolution: u32,
    pub qp: u32,
    pub bitrate_kbps: f64,
    pub quality: f64,
    pub objective: f64,
    pub decode_time_s: f64,
}

impl ParetoFront {
    pub fn export_rows(&self) -> Vec<FrontExportRow> {
        self.points
            .iter()
            .map(|fp| FrontExportRow {
                resolution: fp.point.resolution,
                qp: fp.point.qp,
                bitrate_kbps: fp.point.bitrate,
                quality: fp.quality,
                objective: fp.objective,
                decode_time_s: fp.point.decode_time,
            })
            .collect()
    }

    /// (resolution, qp) membership, order-insensitive.
    pub fn membership(&self) -> std::collections::BTreeSet<(u32, u32)> {
        self.points
            .iter()
            .map(|fp| (fp.point.resolution, fp.point.qp))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn point(
        resolution: u32,
        qp: u32,
        bitrate: f64,
        quality: f64,
        decode_time: f64,
    ) -> MeasurementPoint {
        MeasurementPoint {
            sequence_id: "t".into(),
            resolution,
            qp,
            bitrate,
            psnr: Some(quality),
            xpsnr: Some(quality),
            vmaf: None,
            decode_time,
            decode_energy: None,
        }
    }

    fn space(points: Vec<MeasurementPoint>) -> ParameterSpace {
        ParameterSpace {
            sequence_id: "t".into(),
            points,
            resolutions: vec![],
            qps: vec![],
        }
    }

    /// Exhaustive pairwise-dominance oracle with the same duplicate rule.
    fn oracle_front(
        coords: &[(f64, f64)],
        points: &[MeasurementPoint],
        dominates: fn((f64, f64), (f64, f64)) -> bool,
    ) -> Vec<usize> {
        let mut kept = Vec::new();
        'outer: for i in 0..coords.len() {
            for j in 0..coords.len() {
                if i != j && dominates(coords[j], coords[i]) {
                    continue 'outer;
                }
                // coincident duplicates: keep only the tie-break minimum
                if i != j
                    && coords[i] == coords[j]
                    && tie_break(&points[j], &points[i]) == Ordering::Less
                {
                    continue 'outer;
                }
            }
            kept.push(i);
        }
        kept
    }

    #[test]
    fn dominance_truth_table() {
        assert!(dominates_jqt((5.0, 1.0), (4.0, 2.0)));
        assert!(!dominates_jqt((5.0, 1.0), (5.0, 1.0)));
        assert!(!dominates_jqt((5.0, 2.0), (4.0, 1.0)));
        assert!(dominates_jrqt((1.0, 40.0), (1.5, 38.0)));
        assert!(!dominates_jrqt((1.0, 40.0), (1.0, 40.0)));
        assert!(!dominates_jrqt((1.0, 38.0), (1.5, 40.0)));
    }

    #[test]
    fn jqt_front_excludes_dominated() {
        let s = space(vec![
            point(2160, 20, 1000.0, 40.0, 1.0),
            point(1080, 30, 500.0, 38.0, 1.0),
            point(720, 35, 400.0, 35.0, 10.0),
            point(540, 40, 600.0, 30.0, 10.0),
        ]);
        let front = front_jqt(&s, QualityMetricKey::Xpsnr, JqtParams::new(1.0).unwrap()).unwrap();
        let members = front.membership();
        assert_eq!(members.len(), 3);
        assert!(!members.contains(&(540, 40)));
    }

    #[test]
    fn single_point_is_the_front() {
        let s = space(vec![point(720, 30, 800.0, 36.0, 2.0)]);
        let front = front_jqt(&s, QualityMetricKey::Xpsnr, JqtParams::new(1.0).unwrap()).unwrap();
        assert_eq!(front.points.len(), 1);
    }

    #[test]
    fn coincident_points_keep_one_representative() {
        let s = space(vec![
            point(2160, 20, 500.0, 38.0, 2.0),
            point(1080, 30, 500.0, 38.0, 2.0),
            point(720, 40, 500.0, 38.0, 2.0),
        ]);
        let front = front_jqt(&s, QualityMetricKey::Xpsnr, JqtParams::new(1.0).unwrap()).unwrap();
        assert_eq!(front.points.len(), 1);
        // same time and bitrate everywhere: lowest resolution wins
        assert_eq!(front.points[0].point.resolution, 720);
    }

    #[test]
    fn empty_space_errors() {
        let s = space(vec![]);
        assert!(matches!(
            front_jqt(&s, QualityMetricKey::Xpsnr, JqtParams::new(1.0).unwrap()),
            Err(Error::EmptySpace(_))
        ));
    }

    #[test]
    fn missing_metric_errors() {
        let s = space(vec![point(720, 30, 800.0, 36.0, 2.0)]);
        assert!(matches!(
            front_jrqt(&s, QualityMetricKey::Vmaf, MParams::new(0.5).unwrap()),
            Err(Error::MissingQuality("vmaf"))
        ));
    }

    fn arb_space(max_points: usize) -> impl Strategy<Value = ParameterSpace> {
        proptest::collection::vec(
            (
                prop_oneof![Just(360u32), Just(720u32), Just(1080u32), Just(2160u32)],
                10u32..50,
                1.0f64..20000.0,
                20.0f64..50.0,
                0.05f64..60.0,
            ),
            1..max_points,
        )
        .prop_map(|rows| {
            space(
                rows.into_iter()
                    .map(|(r, q, b, v, t)| point(r, q, b, v, t))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn jqt_matches_oracle(s in arb_space(60), alpha in 0.0f64..4.0) {
            let params = JqtParams::new(alpha).unwrap();
            let front = front_jqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let coords: Vec<_> = s.points.iter()
                .map(|p| (compute_j(p.xpsnr.unwrap(), p.decode_time, params).unwrap(), p.bitrate))
                .collect();
            let expected: std::collections::BTreeSet<_> = oracle_front(&coords, &s.points, dominates_jqt)
                .into_iter().map(|i| (s.points[i].resolution, s.points[i].qp, s.points[i].bitrate.to_bits())).collect();
            let got: std::collections::BTreeSet<_> = front.points.iter()
                .map(|fp| (fp.point.resolution, fp.point.qp, fp.point.bitrate.to_bits())).collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn jrqt_matches_oracle(s in arb_space(60), alpha in 0.0f64..=1.0) {
            let params = MParams::new(alpha).unwrap();
            let front = front_jrqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let coords: Vec<_> = s.points.iter()
                .map(|p| (compute_m(p.decode_time, p.bitrate, params).unwrap(), -p.xpsnr.unwrap()))
                .collect();
            // oracle works in (min, min) form via negated quality
            let dominates = |a: (f64, f64), c: (f64, f64)| a.0 <= c.0 && a.1 <= c.1 && (a.0 < c.0 || a.1 < c.1);
            let expected: std::collections::BTreeSet<_> = oracle_front(&coords, &s.points, dominates)
                .into_iter().map(|i| (s.points[i].resolution, s.points[i].qp, s.points[i].bitrate.to_bits())).collect();
            let got: std::collections::BTreeSet<_> = front.points.iter()
                .map(|fp| (fp.point.resolution, fp.point.qp, fp.point.bitrate.to_bits())).collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn front_is_idempotent(s in arb_space(60)) {
            let params = MParams::new(0.5).unwrap();
            let front = front_jrqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let reduced = ParameterSpace {
                sequence_id: s.sequence_id.clone(),
                points: front.points.iter().map(|fp| fp.point.clone()).collect(),
                resolutions: vec![],
                qps: vec![],
            };
            if !reduced.is_empty() {
                let again = front_jrqt(&reduced, QualityMetricKey::Xpsnr, params).unwrap();
                prop_assert_eq!(again.membership(), front.membership());
            }
        }

        #[test]
        fn jqt_front_invariant_under_time_scaling(s in arb_space(40), c in prop_oneof![Just(0.1f64), Just(3.0), Just(10.0)]) {
            let params = JqtParams::new(2.0).unwrap();
            let base = front_jqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let scaled = ParameterSpace {
                sequence_id: s.sequence_id.clone(),
                points: s.points.iter().map(|p| MeasurementPoint { decode_time: p.decode_time * c, ..p.clone() }).collect(),
                resolutions: vec![],
                qps: vec![],
            };
            let front = front_jqt(&scaled, QualityMetricKey::Xpsnr, params).unwrap();
            prop_assert_eq!(front.membership(), base.membership());
        }

        #[test]
        fn jrqt_front_invariant_under_rate_scaling(s in arb_space(40), c in prop_oneof![Just(0.1f64), Just(3.0), Just(10.0)]) {
            let params = MParams::new(0.5).unwrap();
            let base = front_jrqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let scaled = ParameterSpace {
                sequence_id: s.sequence_id.clone(),
                points: s.points.iter().map(|p| MeasurementPoint { bitrate: p.bitrate * c, ..p.clone() }).collect(),
                resolutions: vec![],
                qps: vec![],
            };
            let front = front_jrqt(&scaled, QualityMetricKey::Xpsnr, params).unwrap();
            prop_assert_eq!(front.membership(), base.membership());
        }

        #[test]
        fn adding_a_point_only_removes_dominated_members(s in arb_space(40),
            r in prop_oneof![Just(360u32), Just(2160u32)], q in 10u32..50,
            b in 1.0f64..20000.0, v in 20.0f64..50.0, t in 0.05f64..60.0) {
            let params = JqtParams::new(1.0).unwrap();
            let base = front_jqt(&s, QualityMetricKey::Xpsnr, params).unwrap();
            let new_point = point(r, q, b, v, t);
            let new_j = compute_j(v, t, params).unwrap();
            let mut grown = s.clone();
            grown.points.push(new_point.clone());
            let front = front_jqt(&grown, QualityMetricKey::Xpsnr, params).unwrap();
            let members = front.membership();
            for fp in &base.points {
                let survived = members.contains(&(fp.point.resolution, fp.point.qp));
                let displaced = dominates_jqt((new_j, b), (fp.objective, fp.point.bitrate))
                    || ((new_j, b) == (fp.objective, fp.point.bitrate)
                        && tie_break(&new_point, &fp.point) == Ordering::Less);
                prop_assert!(survived || displaced);
            }
        }
    }
}
