//! Domain types and measurement-table ingestion for the
//! rate-quality-decoding-time (RQT) parameter space.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default resolution set (vertical line counts).
pub const DEFAULT_RESOLUTIONS: [u32; 6] = [360, 540, 720, 1080, 1440, 2160];

/// Default QP set: 10, 12, ..., 50.
pub fn default_qps() -> Vec<u32> {
    (10..=50).step_by(2).collect()
}

/// Default ladder target bitrates in kbps.
pub const DEFAULT_TARGETS_KBPS: [f64; 12] = [
    145.0, 300.0, 600.0, 900.0, 1600.0, 2400.0, 3400.0, 4500.0, 5800.0, 8100.0, 11600.0, 16800.0,
];

/// Which quality field plays the role of `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityMetricKey {
    Psnr,
    Xpsnr,
    Vmaf,
}

impl QualityMetricKey {
    pub const ALL: [QualityMetricKey; 3] = [Self::Psnr, Self::Xpsnr, Self::Vmaf];

    pub fn name(self) -> &'static str {
        match self {
            Self::Psnr => "psnr",
            Self::Xpsnr => "xpsnr",
            Self::Vmaf => "vmaf",
        }
    }
}

impl fmt::Display for QualityMetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for QualityMetricKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psnr" => Ok(Self::Psnr),
            "xpsnr" => Ok(Self::Xpsnr),
            "vmaf" => Ok(Self::Vmaf),
            other => Err(Error::InvalidParameter(format!(
                "unknown quality metric '{other}' (expected psnr|xpsnr|vmaf)"
            ))),
        }
    }
}

/// One encoded representation: a (resolution, QP) cell of the measurement grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPoint {
    pub sequence_id: String,
    /// Vertical line count, e.g. 2160.
    pub resolution: u32,
    pub qp: u32,
    /// Kilobits per second.
    pub bitrate: f64,
    pub psnr: Option<f64>,
    pub xpsnr: Option<f64>,
    pub vmaf: Option<f64>,
    /// Seconds (per-clip total).
    pub decode_time: f64,
    /// Joules.
    pub decode_energy: Option<f64>,
}

impl MeasurementPoint {
    pub fn quality(&self, metric: QualityMetricKey) -> Option<f64> {
        match metric {
            QualityMetricKey::Psnr => self.psnr,
            QualityMetricKey::Xpsnr => self.xpsnr,
            QualityMetricKey::Vmaf => self.vmaf,
        }
    }

    fn check(&self, row: usize) -> Result<()> {
        let bad = |message: String| Err(Error::MalformedRow { row, message });
        if !(self.bitrate > 0.0) {
            return bad(format!("bitrate must be positive, got {}", self.bitrate));
        }
        if !(self.decode_time > 0.0) {
            return bad(format!(
                "decode_time must be positive, got {}",
                self.decode_time
            ));
        }
        if let Some(e) = self.decode_energy {
            if !(e > 0.0) {
                return bad(format!("decode_energy must be positive, got {e}"));
            }
        }
        if let Some(v) = self.vmaf {
            if !(0.0..=100.0).contains(&v) {
                return bad(format!("vmaf must lie in [0, 100], got {v}"));
            }
        }
        if self.psnr.is_none() && self.xpsnr.is_none() && self.vmaf.is_none() {
            return bad("at least one quality field must be present".into());
        }
        Ok(())
    }
}

/// All measurement points for one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub sequence_id: String,
    pub points: Vec<MeasurementPoint>,
    /// The configured resolution set R.
    pub resolutions: Vec<u32>,
    /// The configured QP set Q.
    pub qps: Vec<u32>,
}

impl ParameterSpace {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fails unless every point carries the selected quality field.
    pub fn require_quality(&self, metric: QualityMetricKey) -> Result<()> {
        if self.points.iter().all(|p| p.quality(metric).is_some()) {
            Ok(())
        } else {
            Err(Error::MissingQuality(match metric {
                QualityMetricKey::Psnr => "psnr",
                QualityMetricKey::Xpsnr => "xpsnr",
                QualityMetricKey::Vmaf => "vmaf",
            }))
        }
    }
}

/// Strictly increasing ladder target bitrates in kbps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetBitrateSet {
    targets: Vec<f64>,
}

impl TargetBitrateSet {
    pub fn new(targets: Vec<f64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidParameter("target set is empty".into()));
        }
        for (i, w) in targets.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "targets must be strictly increasing: {} then {} at index {}",
                    w[0],
                    w[1],
                    i + 1
                )));
            }
        }
        if targets[0] <= 0.0 {
            return Err(Error::InvalidParameter("targets must be positive".into()));
        }
        Ok(Self { targets })
    }

    pub fn default_targets() -> Self {
        Self {
            targets: DEFAULT_TARGETS_KBPS.to_vec(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.targets
    }

    /// Same targets scaled by a positive constant (for scale-invariance checks).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.targets.iter().map(|t| t * c).collect())
    }
}

/// Options controlling CSV ingestion.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Reject (resolution, qp) pairs outside the configured grid.
    pub strict: bool,
    /// Grid the rows are validated against; defaults to the standard grid.
    pub resolutions: Option<Vec<u32>>,
    pub qps: Option<Vec<u32>>,
}

const REQUIRED_COLUMNS: [&str; 4] = ["sequence_id", "resolution", "qp", "decode_time_s"];

/// Parse the measurement CSV into one `ParameterSpace` per sequence.
///
/// Header is order-insensitive and extra columns are ignored. `bitrate_mbps`
/// is accepted in place of `bitrate_kbps` and converted on read.
pub fn parse_measurements(csv_text: &str, options: &ParseOptions) -> Result<Vec<ParameterSpace>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(csv_text.as_bytes());

    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    for required in REQUIRED_COLUMNS {
        if col(required).is_none() {
            return Err(Error::MalformedRow {
                row: 1,
                message: format!("missing required column '{required}'"),
            });
        }
    }
    let (rate_col, rate_scale) = match (col("bitrate_kbps"), col("bitrate_mbps")) {
        (Some(i), _) => (i, 1.0),
        (None, Some(i)) => (i, 1000.0),
        (None, None) => {
            return Err(Error::MalformedRow {
                row: 1,
                message: "missing bitrate column (bitrate_kbps or bitrate_mbps)".into(),
            })
        }
    };
    let seq_col = col("sequence_id").unwrap();
    let res_col = col("resolution").unwrap();
    let qp_col = col("qp").unwrap();
    let time_col = col("decode_time_s").unwrap();
    let psnr_col = col("psnr_db");
    let xpsnr_col = col("xpsnr_db");
    let vmaf_col = col("vmaf");
    let energy_col = col("decode_energy_j");

    let resolutions = options
        .resolutions
        .clone()
        .unwrap_or_else(|| DEFAULT_RESOLUTIONS.to_vec());
    let qps = options.qps.clone().unwrap_or_else(default_qps);

    // BTreeMap keeps sequence order stable across runs.
    let mut spaces: BTreeMap<String, ParameterSpace> = BTreeMap::new();

    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header line
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");

        let parse_u32 = |i: usize, name: &str| -> Result<u32> {
            field(i).parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("cannot parse {name} '{}'", field(i)),
            })
        };
        let parse_f64 = |i: usize, name: &str| -> Result<f64> {
            field(i).parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("cannot parse {name} '{}'", field(i)),
            })
        };
        let parse_opt = |i: Option<usize>, name: &str| -> Result<Option<f64>> {
            match i {
                Some(i) if !field(i).is_empty() => parse_f64(i, name).map(Some),
                _ => Ok(None),
            }
        };

        let point = MeasurementPoint {
            sequence_id: field(seq_col).to_string(),
            resolution: parse_u32(res_col, "resolution")?,
            qp: parse_u32(qp_col, "qp")?,
            bitrate: parse_f64(rate_col, "bitrate")? * rate_scale,
            psnr: parse_opt(psnr_col, "psnr_db")?,
            xpsnr: parse_opt(xpsnr_col, "xpsnr_db")?,
            vmaf: parse_opt(vmaf_col, "vmaf")?,
            decode_time: parse_f64(time_col, "decode_time_s")?,
            decode_energy: parse_opt(energy_col, "decode_energy_j")?,
        };
        point.check(row)?;

        if options.strict
            && (!resolutions.contains(&point.resolution) || !qps.contains(&point.qp))
        {
            return Err(Error::OutOfGrid {
                row,
                resolution: point.resolution,
                qp: point.qp,
            });
        }

        let space = spaces
            .entry(point.sequence_id.clone())
            .or_insert_with(|| ParameterSpace {
                sequence_id: point.sequence_id.clone(),
                points: Vec::new(),
                resolutions: resolutions.clone(),
                qps: qps.clone(),
            });
        if space
            .points
            .iter()
            .any(|p| p.resolution == point.resolution && p.qp == point.qp)
        {
            return Err(Error::DuplicatePoint {
                row,
                sequence_id: point.sequence_id,
                resolution: point.resolution,
                qp: point.qp,
            });
        }
        space.points.push(point);
    }

    Ok(spaces.into_values().collect())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v}")).unwrap_or_default()
}

/// Serialize spaces back to the canonical CSV layout.
pub fn write_measurements<W: std::io::Write>(spaces: &[ParameterSpace], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "sequence_id",
        "resolution",
        "qp",
        "bitrate_kbps",
        "psnr_db",
        "xpsnr_db",
        "vmaf",
        "decode_time_s",
        "decode_energy_j",
    ])?;
    for space in spaces {
        for p in &space.points {
            writer.write_record([
                p.sequence_id.clone(),
                p.resolution.to_string(),
                p.qp.to_string(),
                format!("{}", p.bitrate),
                fmt_opt(p.psnr),
                fmt_opt(p.xpsnr),
                fmt_opt(p.vmaf),
                format!("{}", p.decode_time),
                fmt_opt(p.decode_energy),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Anomaly,
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub sequence_id: String,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Inspect a space for missing quality fields, empty resolution coverage,
/// and rate-vs-QP anomalies. Reports only; never mutates.
pub fn validate_space(space: &ParameterSpace) -> ValidationReport {
    let mut findings = Vec::new();

    for metric in QualityMetricKey::ALL {
        if space.points.iter().all(|p| p.quality(metric).is_none()) {
            findings.push(Finding {
                severity: Severity::Warning,
                message: format!("{} unavailable", metric.name().to_uppercase()),
            });
        }
    }

    for &r in &space.resolutions {
        if !space.points.iter().any(|p| p.resolution == r) {
            findings.push(Finding {
                severity: Severity::Warning,
                message: format!("no points at resolution {r}"),
            });
        }
    }

    // Within a resolution, bitrate should fall as QP rises.
    let mut by_resolution: BTreeMap<u32, Vec<&MeasurementPoint>> = BTreeMap::new();
    for p in &space.points {
        by_resolution.entry(p.resolution).or_default().push(p);
    }
    for (r, mut points) in by_resolution {
        points.sort_by_key(|p| p.qp);
        for w in points.windows(2) {
            if w[1].bitrate >= w[0].bitrate {
                findings.push(Finding {
                    severity: Severity::Anomaly,
                    message: format!(
                        "bitrate not decreasing with QP at resolution {r}: qp {} -> {} gives {} -> {} kbps",
                        w[0].qp, w[1].qp, w[0].bitrate, w[1].bitrate
                    ),
                });
            }
        }
    }

    ValidationReport {
        sequence_id: space.sequence_id.clone(),
        findings,
    }
}
