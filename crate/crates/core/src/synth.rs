//! Deterministic generator of plausible rate-quality-decoding-time spaces.
//!
//! The functional forms are not calibrated to any codec; the contract is the
//! shape: bitrate falls with QP and rises with resolution and content
//! complexity, per-resolution RQ curves are valid, curves cross between
//! resolutions, decoding time grows with resolution and bitrate, and energy
//! is near-linear in decoding time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{default_qps, MeasurementPoint, ParameterSpace, DEFAULT_RESOLUTIONS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub seed: u64,
    pub resolutions: Vec<u32>,
    pub qps: Vec<u32>,
    /// Content knobs in [0, 1].
    pub spatial_complexity: f64,
    pub temporal_complexity: f64,
    pub luminance: f64,
    /// Joules per second of decoding.
    pub time_energy_slope: f64,
    /// Relative standard deviation of the energy noise.
    pub noise_level: f64,
}

impl Default for SynthProfile {
    fn default() -> Self {
        Self {
            seed: 0,
            resolutions: DEFAULT_RESOLUTIONS.to_vec(),
            qps: default_qps(),
            spatial_complexity: 0.6,
            temporal_complexity: 0.5,
            luminance: 0.5,
            time_energy_slope: 25.0,
            noise_level: 0.05,
        }
    }
}

impl SynthProfile {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("spatial_complexity", self.spatial_complexity),
            ("temporal_complexity", self.temporal_complexity),
            ("luminance", self.luminance),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if !(self.time_energy_slope > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time_energy_slope must be positive, got {}",
                self.time_energy_slope
            )));
        }
        if self.noise_level < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise_level must be nonnegative, got {}",
                self.noise_level
            )));
        }
        if self.resolutions.is_empty() || self.qps.is_empty() {
            return Err(Error::InvalidParameter(
                "resolutions and qps must be non-empty".into(),
            ));
        }
        Ok(())
    }

    /// Profile for the `index`-th sequence of a corpus: content knobs drawn
    /// deterministically from (seed, index).
    pub fn for_sequence(base_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index + 1)));
        Self {
            seed: base_seed.wrapping_add(index),
            spatial_complexity: rng.random_range(0.5..1.0),
            temporal_complexity: rng.random_range(0.0..1.0),
            luminance: rng.random_range(0.0..1.0),
            ..Default::default()
        }
    }

    pub fn sequence_id(&self) -> String {
        format!("synth-{:05}", self.seed)
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Rate-vs-QP decay constant (shared by all resolutions and knobs so that
/// bitrate stays monotone in every profile knob).
const QP_DECAY: f64 = 0.075;

fn bitrate_kbps(profile: &SynthProfile, rn: f64, qp: u32) -> f64 {
    let peak = 24_000.0
        * (0.35 + 0.9 * profile.spatial_complexity + 0.55 * profile.temporal_complexity);
    peak * rn.powf(1.35) * (-QP_DECAY * (qp as f64 - 10.0)).exp()
}

fn base_quality_db(profile: &SynthProfile, rn: f64, bitrate: f64) -> f64 {
    let floor = 28.0;
    // upscale loss caps low resolutions below the native ceiling
    let cap = 50.0 + 1.5 * profile.luminance
        - (5.0 + 7.0 * profile.spatial_complexity) * (1.0 - rn.powf(0.7));
    // logistic in log-rate, centred on each resolution's mid-QP rate;
    // shallower slope at low resolutions flips the ordering at high QPs
    let x0 = bitrate_kbps(profile, rn, 30).log10();
    let s = 0.45 + 0.5 * (1.0 - rn);
    floor + (cap - floor) * logistic((bitrate.log10() - x0) / s)
}

fn decode_time_s(profile: &SynthProfile, rn: f64, bitrate: f64) -> f64 {
    let base = 30.0 * (0.7 + 0.6 * profile.temporal_complexity);
    // bits are relatively costlier to decode at low resolutions, pixels at
    // high ones; this spreads the time-vs-rate tradeoff across resolutions
    let bit_cost = 0.85 - 0.6 * rn;
    base * (0.15 + rn.powf(1.15)) * (1.0 + bit_cost * (1.0 + bitrate / 400.0).log10())
}

/// Generate the full (resolution, QP) grid for one sequence.
/// Fully deterministic for a fixed profile.
pub fn generate_space(profile: &SynthProfile) -> Result<ParameterSpace> {
    profile.validate()?;
    let sequence_id = profile.sequence_id();
    let mut rng = ChaCha12Rng::seed_from_u64(profile.seed);

    let mut resolutions = profile.resolutions.clone();
    resolutions.sort_unstable();
    let max_resolution = *resolutions.last().unwrap() as f64;
    let mut qps = profile.qps.clone();
    qps.sort_unstable();

    let mut points = Vec::with_capacity(resolutions.len() * qps.len());
    for &r in &resolutions {
        let rn = r as f64 / max_resolution;
        for &q in &qps {
            let bitrate = bitrate_kbps(profile, rn, q);
            let v = base_quality_db(profile, rn, bitrate);
            let decode_time = decode_time_s(profile, rn, bitrate);
            // noise only on energy; rate/quality/time stay deterministic shapes
            let noise = if profile.noise_level > 0.0 {
                rng.random_range(-profile.noise_level..=profile.noise_level)
            } else {
                0.0
            };
            let energy = profile.time_energy_slope * decode_time * (1.0 + noise).max(0.05);
            points.push(MeasurementPoint {
                sequence_id: sequence_id.clone(),
                resolution: r,
                qp: q,
                bitrate,
                psnr: Some(v),
                xpsnr: Some(v + 0.8 - 0.3 * profile.temporal_complexity),
                vmaf: Some(100.0 * logistic((v - 36.0) / 3.2)),
                decode_time,
                decode_energy: Some(energy),
            });
        }
    }

    Ok(ParameterSpace {
        sequence_id,
        points,
        resolutions,
        qps,
    })
}

/// Generate a corpus of `count` sequences via seed offsets.
pub fn generate_corpus(base_seed: u64, count: u64) -> Result<Vec<ParameterSpace>> {
    (0..count)
        .map(|i| generate_space(&SynthProfile::for_sequence(base_seed, i)))
        .collect()
}
