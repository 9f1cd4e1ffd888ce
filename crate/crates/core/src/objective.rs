//! Composite objective scores for a measurement point.
//!
//! `J = v - alpha_j * log10(decode_time)` trades quality against decoding
//! time; `M = alpha_m * log10(decode_time) + (1 - alpha_m) * log10(bitrate)`
//! folds decoding time and bitrate into one minimized coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JqtParams {
    pub alpha_j: f64,
}

impl JqtParams {
    /// alpha_j = 0 is admitted; it degenerates J to the plain quality score.
    pub fn new(alpha_j: f64) -> Result<Self> {
        if alpha_j >= 0.0 {
            Ok(Self { alpha_j })
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha_j must be nonnegative, got {alpha_j}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MParams {
    pub alpha_m: f64,
}

impl MParams {
    pub fn new(alpha_m: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha_m) {
            Ok(Self { alpha_m })
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha_m must lie in [0, 1], got {alpha_m}"
            )))
        }
    }
}

pub fn compute_j(quality: f64, decode_time: f64, params: JqtParams) -> Result<f64> {
    if !(decode_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decode_time must be positive, got {decode_time}"
        )));
    }
    Ok(quality - params.alpha_j * decode_time.log10())
}

pub fn compute_m(decode_time: f64, bitrate: f64, params: MParams) -> Result<f64> {
    if !(decode_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decode_time must be positive, got {decode_time}"
        )));
    }
    if !(bitrate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bitrate must be positive, got {bitrate}"
        )));
    }
    Ok(params.alpha_m * decode_time.log10() + (1.0 - params.alpha_m) * bitrate.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn j_known_values() {
        let j = |v, t, a| compute_j(v, t, JqtParams::new(a).unwrap()).unwrap();
        assert_eq!(j(40.0, 10.0, 2.0), 38.0);
        assert_eq!(j(35.0, 7.3, 0.0), 35.0);
        assert_eq!(j(40.0, 1.0, 5.0), 40.0);
    }

    #[test]
    fn m_known_values() {
        let m = |t, b, a| compute_m(t, b, MParams::new(a).unwrap()).unwrap();
        assert!((m(10.0, 100.0, 0.5) - 1.5).abs() < 1e-12);
        assert!((m(10.0, 100.0, 0.0) - 2.0).abs() < 1e-12);
        assert!((m(10.0, 100.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(JqtParams::new(-0.1).is_err());
        assert!(MParams::new(1.1).is_err());
        assert!(MParams::new(-0.1).is_err());
        assert!(compute_j(40.0, 0.0, JqtParams::new(1.0).unwrap()).is_err());
        assert!(compute_m(1.0, -5.0, MParams::new(0.5).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn j_monotone(v in 20.0f64..50.0, t in 0.01f64..1e3, dt in 0.01f64..10.0, dv in 0.01f64..5.0) {
            let p = JqtParams::new(1.5).unwrap();
            prop_assert!(compute_j(v, t + dt, p).unwrap() < compute_j(v, t, p).unwrap());
            prop_assert!(compute_j(v + dv, t, p).unwrap() > compute_j(v, t, p).unwrap());
        }

        #[test]
        fn m_monotone(t in 0.01f64..1e3, b in 1.0f64..1e5, dt in 0.01f64..10.0, db in 0.01f64..100.0) {
            for alpha in [0.0, 0.3, 1.0] {
                let p = MParams::new(alpha).unwrap();
                let base = compute_m(t, b, p).unwrap();
                prop_assert!(compute_m(t + dt, b, p).unwrap() >= base);
                prop_assert!(compute_m(t, b + db, p).unwrap() >= base);
                if alpha > 0.0 {
                    prop_assert!(compute_m(t + dt, b, p).unwrap() > base);
                }
                if alpha < 1.0 {
                    prop_assert!(compute_m(t, b + db, p).unwrap() > base);
                }
            }
        }

        #[test]
        fn j_time_scaling_is_additive_shift(v in 20.0f64..50.0, t in 0.01f64..1e3, c in 0.01f64..100.0) {
            let p = JqtParams::new(2.0).unwrap();
            let shifted = compute_j(v, c * t, p).unwrap();
            let expected = compute_j(v, t, p).unwrap() - 2.0 * c.log10();
            prop_assert!((shifted - expected).abs() < 1e-9);
        }
    }
}
