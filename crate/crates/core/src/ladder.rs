//! Bitrate ladder construction: sampling a Pareto front at target bitrates
//! under a quality-monotonicity constraint, plus the benchmark strategies
//! (fixed pairs, single-resolution, dynamic resolution, decode-time capped).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeasurementPoint, ParameterSpace, QualityMetricKey, TargetBitrateSet};
use crate::pareto::{tie_break, FrontPoint, FrontStrategy, ParetoFront};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderStrategy {
    Jqt,
    Jrqt,
    JrqtNonmono,
    Fixed,
    Default,
    Dynres,
    Timecap,
}

impl LadderStrategy {
    /// Strategies whose output is quality-monotonic by construction.
    pub fn is_monotonic(self) -> bool {
        !matches!(self, Self::JrqtNonmono | Self::Fixed)
    }
}

/// One rung of a ladder: a target bitrate and the representation serving it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub target_kbps: f64,
    pub achieved_kbps: f64,
    pub resolution: u32,
    pub qp: u32,
    /// v under the ladder's quality metric.
    pub quality: f64,
    pub decode_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decode_energy_j: Option<f64>,
    /// True when the rung reuses the previous rung's representation.
    pub carried: bool,
    /// True when no representation fit under the target (fixed-pairs fallback).
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub overshoot: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xpsnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vmaf: Option<f64>,
}

impl Rung {
    fn from_point(point: &MeasurementPoint, target: f64, quality: f64) -> Self {
        Rung {
            target_kbps: target,
            achieved_kbps: point.bitrate,
            resolution: point.resolution,
            qp: point.qp,
            quality,
            decode_time_s: point.decode_time,
            decode_energy_j: point.decode_energy,
            carried: false,
            overshoot: false,
            psnr_db: point.psnr,
            xpsnr_db: point.xpsnr,
            vmaf: point.vmaf,
        }
    }

    fn carry_of(prev: &Rung, target: f64) -> Self {
        Rung {
            target_kbps: target,
            carried: true,
            ..prev.clone()
        }
    }

    pub fn quality_for(&self, metric: QualityMetricKey) -> Option<f64> {
        match metric {
            QualityMetricKey::Psnr => self.psnr_db,
            QualityMetricKey::Xpsnr => self.xpsnr_db,
            QualityMetricKey::Vmaf => self.vmaf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub sequence_id: String,
    pub strategy: LadderStrategy,
    pub metric: QualityMetricKey,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau_limit_s: Option<f64>,
    /// Whether quality monotonicity was enforced/holds by construction.
    pub monotonic: bool,
    pub rungs: Vec<Rung>,
    pub omitted_targets: Vec<f64>,
}

impl Ladder {
    pub fn quality_is_monotone(&self) -> bool {
        self.rungs.windows(2).all(|w| w[1].quality >= w[0].quality)
    }

    pub fn targets_strictly_increase(&self) -> bool {
        self.rungs
            .windows(2)
            .all(|w| w[1].target_kbps > w[0].target_kbps)
    }

    pub fn total_decode_time(&self) -> f64 {
        self.rungs.iter().map(|r| r.decode_time_s).sum()
    }
}

/// Preference order for ladder candidates, strategy-dependent, total.
fn candidate_cmp(strategy: FrontStrategy, a: &FrontPoint, b: &FrontPoint) -> Ordering {
    let primary = match strategy {
        // max J
        FrontStrategy::Jqt(_) => b.objective.total_cmp(&a.objective),
        // max v, then min M
        FrontStrategy::Jrqt(_) => a
            .quality
            .total_cmp(&b.quality)
            .reverse()
            .then_with(|| a.objective.total_cmp(&b.objective)),
    };
    primary.then_with(|| tie_break(&a.point, &b.point))
}

/// Sample a front at the target bitrates (ascending), optionally enforcing
/// quality monotonicity with carried rungs.
pub fn build_ladder(
    front: &ParetoFront,
    targets: &TargetBitrateSet,
    monotonic: bool,
) -> Result<Ladder> {
    if front.points.is_empty() {
        return Err(Error::EmptyFront);
    }
    let sequence_id = front.points[0].point.sequence_id.clone();
    let (strategy, alpha) = match front.strategy {
        FrontStrategy::Jqt(p) => (LadderStrategy::Jqt, p.alpha_j),
        FrontStrategy::Jrqt(p) => (
            if monotonic {
                LadderStrategy::Jrqt
            } else {
                LadderStrategy::JrqtNonmono
            },
            p.alpha_m,
        ),
    };

    let mut rungs: Vec<Rung> = Vec::new();
    let mut omitted = Vec::new();
    for &target in targets.as_slice() {
        let floor = if monotonic {
            rungs.last().map(|r| r.quality)
        } else {
            None
        };
        let best = front
            .points
            .iter()
            .filter(|fp| fp.point.bitrate <= target)
            .filter(|fp| floor.is_none_or(|f| fp.quality >= f))
            .min_by(|a, b| candidate_cmp(front.strategy, a, b));
        match (best, rungs.last()) {
            (Some(fp), _) => rungs.push(Rung::from_point(&fp.point, target, fp.quality)),
            (None, Some(prev)) => {
                let carry = Rung::carry_of(prev, target);
                rungs.push(carry);
            }
            (None, None) => omitted.push(target),
        }
    }

    Ok(Ladder {
        sequence_id,
        strategy,
        metric: front.metric,
        alpha: Some(alpha),
        tau_limit_s: None,
        monotonic,
        rungs,
        omitted_targets: omitted,
    })
}

/// Replace any rung whose quality dips below its predecessor with a carry
/// of the predecessor. Idempotent.
pub fn enforce_quality_monotonicity(rungs: &[Rung]) -> Vec<Rung> {
    let mut out: Vec<Rung> = Vec::with_capacity(rungs.len());
    for rung in rungs {
        match out.last() {
            Some(prev) if rung.quality < prev.quality => {
                out.push(Rung::carry_of(prev, rung.target_kbps));
            }
            _ => out.push(rung.clone()),
        }
    }
    out
}

fn rung_quality(point: &MeasurementPoint, metric: QualityMetricKey) -> Result<f64> {
    point.quality(metric).ok_or(Error::MissingQuality(metric.name()))
}

/// Fixed bitrate-resolution pairs: per rung, best QP at the pinned resolution.
pub fn ladder_fixed(
    space: &ParameterSpace,
    targets: &TargetBitrateSet,
    pairs: &[(f64, u32)],
    metric: QualityMetricKey,
) -> Result<Ladder> {
    let mut rungs = Vec::new();
    for &target in targets.as_slice() {
        let &(_, resolution) = pairs
            .iter()
            .find(|(t, _)| *t == target)
            .ok_or(Error::UnmappedTarget(target))?;
        let at_resolution: Vec<&MeasurementPoint> = space
            .points
            .iter()
            .filter(|p| p.resolution == resolution)
            .collect();
        if at_resolution.is_empty() {
            return Err(Error::ResolutionAbsent(resolution));
        }
        let fitting = at_resolution
            .iter()
            .filter(|p| p.bitrate <= target)
            .max_by(|a, b| {
                a.bitrate
                    .total_cmp(&b.bitrate)
                    .then_with(|| tie_break(b, a))
            });
        let (point, overshoot) = match fitting {
            Some(p) => (*p, false),
            None => (
                *at_resolution
                    .iter()
                    .min_by(|a, b| a.bitrate.total_cmp(&b.bitrate).then_with(|| tie_break(a, b)))
                    .unwrap(),
                true,
            ),
        };
        let mut rung = Rung::from_point(point, target, rung_quality(point, metric)?);
        rung.overshoot = overshoot;
        rungs.push(rung);
    }
    Ok(Ladder {
        sequence_id: space.sequence_id.clone(),
        strategy: LadderStrategy::Fixed,
        metric,
        alpha: None,
        tau_limit_s: None,
        monotonic: false,
        rungs,
        omitted_targets: Vec::new(),
    })
}

/// Single-resolution ladder: the default targets served at the maximal resolution.
/// Rungs with no fitting representation are omitted.
pub fn ladder_default(
    space: &ParameterSpace,
    targets: &TargetBitrateSet,
    metric: QualityMetricKey,
) -> Result<Ladder> {
    let max_resolution = space
        .resolutions
        .iter()
        .copied()
        .chain(space.points.iter().map(|p| p.resolution))
        .max()
        .ok_or_else(|| Error::EmptySpace(space.sequence_id.clone()))?;
    if !space.points.iter().any(|p| p.resolution == max_resolution) {
        return Err(Error::ResolutionAbsent(max_resolution));
    }

    let mut rungs = Vec::new();
    let mut omitted = Vec::new();
    for &target in targets.as_slice() {
        let fitting = space
            .points
            .iter()
            .filter(|p| p.resolution == max_resolution && p.bitrate <= target)
            .max_by(|a, b| {
                a.bitrate
                    .total_cmp(&b.bitrate)
                    .then_with(|| tie_break(b, a))
            });
        match fitting {
            Some(p) => rungs.push(Rung::from_point(p, target, rung_quality(p, metric)?)),
            None => omitted.push(target),
        }
    }
    Ok(Ladder {
        sequence_id: space.sequence_id.clone(),
        strategy: LadderStrategy::Default,
        metric,
        alpha: None,
        tau_limit_s: None,
        monotonic: true,
        rungs,
        omitted_targets: omitted,
    })
}

/// Preference used by the dynamic-resolution strategies: max quality, then
/// lower bitrate, lower decode time, lower resolution, higher QP.
fn dynres_cmp(metric: QualityMetricKey, a: &MeasurementPoint, b: &MeasurementPoint) -> Ordering {
    let (va, vb) = (a.quality(metric).unwrap(), b.quality(metric).unwrap());
    vb.total_cmp(&va)
        .then_with(|| a.bitrate.total_cmp(&b.bitrate))
        .then_with(|| tie_break(a, b))
}

fn dynres_like(
    space: &ParameterSpace,
    targets: &TargetBitrateSet,
    metric: QualityMetricKey,
    tau_limit: Option<f64>,
) -> Result<Ladder> {
    space.require_quality(metric)?;
    let mut rungs = Vec::new();
    let mut omitted = Vec::new();
    for &target in targets.as_slice() {
        let best = space
            .points
            .iter()
            .filter(|p| p.bitrate <= target)
            .filter(|p| tau_limit.is_none_or(|cap| p.decode_time <= cap))
            .min_by(|a, b| dynres_cmp(metric, a, b));
        match best {
            Some(p) => rungs.push(Rung::from_point(p, target, rung_quality(p, metric)?)),
            None => omitted.push(target),
        }
    }
    Ok(Ladder {
        sequence_id: space.sequence_id.clone(),
        strategy: if tau_limit.is_some() {
            LadderStrategy::Timecap
        } else {
            LadderStrategy::Dynres
        },
        metric,
        alpha: None,
        tau_limit_s: tau_limit,
        monotonic: true,
        rungs,
        omitted_targets: omitted,
    })
}

/// Per rung, the (resolution, QP) maximizing the quality metric under the
/// bitrate budget. Candidate sets nest as targets grow, so quality is
/// non-decreasing without a repair pass.
pub fn ladder_dynres(
    space: &ParameterSpace,
    targets: &TargetBitrateSet,
    metric: QualityMetricKey,
) -> Result<Ladder> {
    dynres_like(space, targets, metric, None)
}

/// Dynamic-resolution selection with a maximum decoding time threshold.
/// Rungs with no candidate under the cap are omitted.
pub fn ladder_time_capped(
    space: &ParameterSpace,
    targets: &TargetBitrateSet,
    metric: QualityMetricKey,
    tau_limit: f64,
) -> Result<Ladder> {
    if !(tau_limit > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau_limit must be positive, got {tau_limit}"
        )));
    }
    dynres_like(space, targets, metric, Some(tau_limit))
}

/// HLS-style default mapping of the standard targets onto resolutions.
/// Configuration, not ground truth; override with a pairs CSV.
pub fn default_fixed_pairs() -> Vec<(f64, u32)> {
    vec![
        (145.0, 360),
        (300.0, 360),
        (600.0, 540),
        (900.0, 540),
        (1600.0, 720),
        (2400.0, 720),
        (3400.0, 1080),
        (4500.0, 1080),
        (5800.0, 1440),
        (8100.0, 1440),
        (11600.0, 2160),
        (16800.0, 2160),
    ]
}
