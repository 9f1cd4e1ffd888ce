//! Bjontegaard-Delta family, decoding-runtime delta, Pearson correlation,
//! and cross-sequence comparison reports.
//!
//! BD values are computed from shape-preserving piecewise-cubic fits of
//! log10(rate) against quality (and the dual), integrated in closed form
//! over the overlapping interval.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Interpolant;
use crate::ladder::Ladder;
use crate::model::QualityMetricKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveAxis {
    Quality,
    Energy,
}

/// A rate-quality curve (or energy-quality for BDDE, with energy in the
/// rate slot).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RqCurve {
    /// (rate-like kbps or joules, quality) pairs.
    pub points: Vec<(f64, f64)>,
    pub axis: CurveAxis,
}

impl RqCurve {
    pub fn new(points: Vec<(f64, f64)>, axis: CurveAxis) -> Self {
        Self { points, axis }
    }

    /// Sort by rate and keep the 2-D skyline (min rate, max value), so both
    /// coordinates strictly increase. Equal-quality duplicates keep the
    /// cheaper rate.
    pub fn prepared(&self) -> Vec<(f64, f64)> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.total_cmp(&a.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            if out.last().is_none_or(|last| p.1 > last.1) {
                out.push(p);
            }
        }
        out
    }
}

/// A BD value plus a flag for curves that fell back to a low-order fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdValue {
    pub value: f64,
    pub degraded: bool,
}

fn fit_log_rate_of_quality(points: &[(f64, f64)]) -> Result<Interpolant> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    let x: Vec<f64> = points.iter().map(|p| p.1).collect();
    let y: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    Interpolant::fit(&x, &y)
}

fn fit_quality_of_log_rate(points: &[(f64, f64)]) -> Result<Interpolant> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    Interpolant::fit(&x, &y)
}

fn overlap(a: &Interpolant, b: &Interpolant) -> Result<(f64, f64)> {
    let (alo, ahi) = a.domain();
    let (blo, bhi) = b.domain();
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    if hi > lo {
        Ok((lo, hi))
    } else {
        Err(Error::NoOverlap)
    }
}

/// Average bitrate difference (%) of `test` vs `reference` at equal quality.
/// Negative means bitrate savings.
pub fn bd_rate(test: &RqCurve, reference: &RqCurve) -> Result<BdValue> {
    let t = fit_log_rate_of_quality(&test.prepared())?;
    let r = fit_log_rate_of_quality(&reference.prepared())?;
    let (lo, hi) = overlap(&t, &r)?;
    let delta = (t.integral(lo, hi) - r.integral(lo, hi)) / (hi - lo);
    Ok(BdValue {
        value: 100.0 * (10f64.powf(delta) - 1.0),
        degraded: t.degraded || r.degraded,
    })
}

/// Average quality difference of `test` vs `reference` at equal rate.
/// Positive means quality gain.
pub fn bd_quality(test: &RqCurve, reference: &RqCurve) -> Result<BdValue> {
    let t = fit_quality_of_log_rate(&test.prepared())?;
    let r = fit_quality_of_log_rate(&reference.prepared())?;
    let (lo, hi) = overlap(&t, &r)?;
    Ok(BdValue {
        value: (t.integral(lo, hi) - r.integral(lo, hi)) / (hi - lo),
        degraded: t.degraded || r.degraded,
    })
}

/// BD decoding energy: bd_rate mechanics with energy on the integrated axis.
/// Negative means energy savings at equal quality.
pub fn bdde(test: &RqCurve, reference: &RqCurve) -> Result<BdValue> {
    bd_rate(test, reference)
}

/// Relative difference of summed decoding times, in percent.
pub fn delta_decode_time(method_times: &[f64], reference_times: &[f64]) -> Result<f64> {
    let method: f64 = method_times.iter().sum();
    let reference: f64 = reference_times.iter().sum();
    if !(reference > 0.0) {
        return Err(Error::NonPositiveReference(reference));
    }
    Ok(100.0 * (method - reference) / reference)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Degenerate(format!(
            "pearson needs two equal-length samples of >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SequenceComparison {
    pub sequence_id: String,
    pub bdr_psnr: Option<f64>,
    pub bdr_xpsnr: Option<f64>,
    pub bdr_vmaf: Option<f64>,
    pub bd_psnr: Option<f64>,
    pub bd_xpsnr: Option<f64>,
    pub bd_vmaf: Option<f64>,
    pub bdde: Option<f64>,
    pub delta_t_d: Option<f64>,
    /// True when any BD value came from a low-order (< 4 point) fit.
    pub degraded: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AggregateReport {
    pub bdr_psnr: Option<Aggregate>,
    pub bdr_xpsnr: Option<Aggregate>,
    pub bdr_vmaf: Option<Aggregate>,
    pub bd_psnr: Option<Aggregate>,
    pub bd_xpsnr: Option<Aggregate>,
    pub bd_vmaf: Option<Aggregate>,
    pub bdde: Option<Aggregate>,
    pub delta_t_d: Option<Aggregate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub sequence_id: String,
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Metric used for the quality axis of BDDE.
    pub metric: QualityMetricKey,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    pub sequences: Vec<SequenceComparison>,
    pub aggregate: AggregateReport,
    pub failures: Vec<Failure>,
}

fn rung_curve(ladder: &Ladder, metric: QualityMetricKey) -> Option<RqCurve> {
    let points: Vec<(f64, f64)> = ladder
        .rungs
        .iter()
        .filter_map(|r| r.quality_for(metric).map(|v| (r.achieved_kbps, v)))
        .collect();
    if points.len() < 2 {
        None
    } else {
        Some(RqCurve::new(points, CurveAxis::Quality))
    }
}

fn energy_curve(ladder: &Ladder) -> Option<RqCurve> {
    let points: Vec<(f64, f64)> = ladder
        .rungs
        .iter()
        .filter_map(|r| r.decode_energy_j.map(|e| (e, r.quality)))
        .collect();
    if points.len() == ladder.rungs.len() && points.len() >= 2 {
        Some(RqCurve::new(points, CurveAxis::Energy))
    } else {
        None
    }
}

/// Compare per-sequence method ladders against reference ladders.
pub fn compare(method: &[Ladder], reference: &[Ladder]) -> Result<ComparisonReport> {
    let by_id = |ladders: &[Ladder]| -> BTreeMap<String, Ladder> {
        ladders
            .iter()
            .map(|l| (l.sequence_id.clone(), l.clone()))
            .collect()
    };
    let method_map = by_id(method);
    let reference_map = by_id(reference);

    let common: Vec<String> = method_map
        .keys()
        .filter(|id| reference_map.contains_key(*id))
        .cloned()
        .collect();
    if common.is_empty() {
        return Err(Error::NoCommonSequences);
    }

    let metric = method_map[&common[0]].metric;
    let mut sequences = Vec::new();
    let mut failures = Vec::new();

    for id in &common {
        let m = &method_map[id];
        let r = &reference_map[id];
        let mut row = SequenceComparison {
            sequence_id: id.clone(),
            ..Default::default()
        };

        let fail = |field: &str, e: Error, failures: &mut Vec<Failure>| {
            failures.push(Failure {
                sequence_id: id.clone(),
                field: field.into(),
                message: e.to_string(),
            });
        };

        for qm in QualityMetricKey::ALL {
            let (Some(mc), Some(rc)) = (rung_curve(m, qm), rung_curve(r, qm)) else {
                continue;
            };
            let (bdr_slot, bdq_slot) = match qm {
                QualityMetricKey::Psnr => (&mut row.bdr_psnr, &mut row.bd_psnr),
                QualityMetricKey::Xpsnr => (&mut row.bdr_xpsnr, &mut row.bd_xpsnr),
                QualityMetricKey::Vmaf => (&mut row.bdr_vmaf, &mut row.bd_vmaf),
            };
            match bd_rate(&mc, &rc) {
                Ok(v) => {
                    *bdr_slot = Some(v.value);
                    row.degraded |= v.degraded;
                }
                Err(e) => fail(&format!("bdr_{}", qm.name()), e, &mut failures),
            }
            match bd_quality(&mc, &rc) {
                Ok(v) => {
                    *bdq_slot = Some(v.value);
                    row.degraded |= v.degraded;
                }
                Err(e) => fail(&format!("bd_{}", qm.name()), e, &mut failures),
            }
        }

        if let (Some(me), Some(re)) = (energy_curve(m), energy_curve(r)) {
            match bdde(&me, &re) {
                Ok(v) => {
                    row.bdde = Some(v.value);
                    row.degraded |= v.degraded;
                }
                Err(e) => fail("bdde", e, &mut failures),
            }
        }

        let m_times: Vec<f64> = m.rungs.iter().map(|r| r.decode_time_s).collect();
        let r_times: Vec<f64> = r.rungs.iter().map(|r| r.decode_time_s).collect();
        match delta_decode_time(&m_times, &r_times) {
            Ok(v) => row.delta_t_d = Some(v),
            Err(e) => fail("delta_t_d", e, &mut failures),
        }

        sequences.push(row);
    }

    let aggregate_of = |get: fn(&SequenceComparison) -> Option<f64>| -> Option<Aggregate> {
        let values: Vec<f64> = sequences.iter().filter_map(get).collect();
        if values.is_empty() {
            None
        } else {
            Some(Aggregate {
                mean: values.iter().sum::<f64>() / values.len() as f64,
                count: values.len(),
            })
        }
    };

    let aggregate = AggregateReport {
        bdr_psnr: aggregate_of(|s| s.bdr_psnr),
        bdr_xpsnr: aggregate_of(|s| s.bdr_xpsnr),
        bdr_vmaf: aggregate_of(|s| s.bdr_vmaf),
        bd_psnr: aggregate_of(|s| s.bd_psnr),
        bd_xpsnr: aggregate_of(|s| s.bd_xpsnr),
        bd_vmaf: aggregate_of(|s| s.bd_vmaf),
        bdde: aggregate_of(|s| s.bdde),
        delta_t_d: aggregate_of(|s| s.delta_t_d),
    };

    Ok(ComparisonReport {
        metric,
        strategy: None,
        alpha: None,
        sequences,
        aggregate,
        failures,
    })
}

/// Flat CSV export: one row per (sequence, field).
pub fn write_report_csv<W: std::io::Write>(report: &ComparisonReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sequence_id", "field", "value"])?;
    for s in &report.sequences {
        let rows: [(&str, Option<f64>); 8] = [
            ("bdr_psnr_pct", s.bdr_psnr),
            ("bdr_xpsnr_pct", s.bdr_xpsnr),
            ("bdr_vmaf_pct", s.bdr_vmaf),
            ("bd_psnr_db", s.bd_psnr),
            ("bd_xpsnr_db", s.bd_xpsnr),
            ("bd_vmaf", s.bd_vmaf),
            ("bdde_pct", s.bdde),
            ("delta_t_d_pct", s.delta_t_d),
        ];
        for (field, value) in rows {
            if let Some(v) = value {
                w.write_record([s.sequence_id.as_str(), field, &format!("{v}")])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
