//! Shape-preserving interpolation used by the Bjontegaard-Delta metrics:
//! Fritsch-Carlson monotone piecewise cubic Hermite (PCHIP) for 4+ points,
//! degrading to an exact quadratic for 3 points and linear for 2.

use crate::error::{Error, Result};

/// Piecewise polynomial y(x) over strictly increasing knots. Each piece is
/// c0 + c1*t + c2*t^2 + c3*t^3 in the local coordinate t = x - knot[i].
#[derive(Debug, Clone)]
pub struct Interpolant {
    knots: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
    /// True when fewer than 4 points forced a lower-order fit.
    pub degraded: bool,
}

/// Fritsch-Carlson slopes for monotone cubic interpolation.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }

    let endpoint = |h0: f64, h1: f64, del0: f64, del1: f64| -> f64 {
        let mut s = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if s.signum() != del0.signum() {
            s = 0.0;
        } else if del0.signum() != del1.signum() && s.abs() > 3.0 * del0.abs() {
            s = 3.0 * del0;
        }
        s
    };
    d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            // weighted harmonic mean of adjacent secants
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d
}

impl Interpolant {
    /// Fit y(x). `x` must be strictly increasing with at least 2 entries.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InsufficientPoints(n.min(y.len())));
        }
        for w in x.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Degenerate(format!(
                    "interpolation abscissae must strictly increase: {} then {}",
                    w[0], w[1]
                )));
            }
        }

        match n {
            2 => {
                let slope = (y[1] - y[0]) / (x[1] - x[0]);
                Ok(Self {
                    knots: x.to_vec(),
                    coeffs: vec![[y[0], slope, 0.0, 0.0]],
                    degraded: true,
                })
            }
            3 => {
                // exact quadratic through the three points, in t = x - x0
                let (t1, t2) = (x[1] - x[0], x[2] - x[0]);
                let (y0, y1, y2) = (y[0], y[1], y[2]);
                let c2 = ((y1 - y0) / t1 - (y2 - y0) / t2) / (t1 - t2);
                let c1 = (y1 - y0) / t1 - c2 * t1;
                Ok(Self {
                    knots: vec![x[0], x[2]],
                    coeffs: vec![[y0, c1, c2, 0.0]],
                    degraded: true,
                })
            }
            _ => {
                let d = pchip_slopes(x, y);
                let mut coeffs = Vec::with_capacity(n - 1);
                for i in 0..n - 1 {
                    let h = x[i + 1] - x[i];
                    let delta = (y[i + 1] - y[i]) / h;
                    let c2 = (3.0 * delta - 2.0 * d[i] - d[i + 1]) / h;
                    let c3 = (d[i] + d[i + 1] - 2.0 * delta) / (h * h);
                    coeffs.push([y[i], d[i], c2, c3]);
                }
                Ok(Self {
                    knots: x.to_vec(),
                    coeffs,
                    degraded: false,
                })
            }
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    fn piece_index(&self, x: f64) -> usize {
        match self.knots.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(self.coeffs.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.coeffs.len() - 1),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.piece_index(x);
        let t = x - self.knots[i];
        let [c0, c1, c2, c3] = self.coeffs[i];
        c0 + t * (c1 + t * (c2 + t * c3))
    }

    /// Exact integral of the fitted piecewise polynomial over [a, b],
    /// which must lie within the fit domain.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        let anti = |i: usize, t: f64| -> f64 {
            let [c0, c1, c2, c3] = self.coeffs[i];
            t * (c0 + t * (c1 / 2.0 + t * (c2 / 3.0 + t * c3 / 4.0)))
        };
        let mut total = 0.0;
        for i in 0..self.coeffs.len() {
            let lo = self.knots[i].max(a);
            let hi = if i + 1 < self.knots.len() {
                self.knots[i + 1].min(b)
            } else {
                b
            };
            if hi > lo {
                total += anti(i, hi - self.knots[i]) - anti(i, lo - self.knots[i]);
            }
        }
        total
    }
}
