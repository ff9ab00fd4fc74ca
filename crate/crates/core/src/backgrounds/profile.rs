//! One-variable profiles used by the background families: plane-wave
//! profiles `m^2(x+)`, time-dependent shifts `E(t)` and the function `f(u)`
//! of the special-conformal masses.

use std::fmt::Debug;
use std::sync::Arc;

use libm::erf;

use crate::error::{Error, Result};
use crate::quad;

/// A smooth real function of one variable with its derivative and the
/// antiderivative anchored at zero, `F(s) = int_0^s value`.
pub trait Profile: Send + Sync + Debug {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    fn antiderivative(&self, s: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfile(pub f64);

impl Profile for ConstantProfile {
    fn value(&self, _s: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _s: f64) -> f64 {
        0.0
    }
    fn antiderivative(&self, s: f64) -> f64 {
        self.0 * s
    }
}

/// `offset + slope * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfile {
    pub offset: f64,
    pub slope: f64,
}

impl Profile for LinearProfile {
    fn value(&self, s: f64) -> f64 {
        self.offset + self.slope * s
    }
    fn derivative(&self, _s: f64) -> f64 {
        self.slope
    }
    fn antiderivative(&self, s: f64) -> f64 {
        self.offset * s + 0.5 * self.slope * s * s
    }
}

/// `amplitude * exp(-k^2 (s - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub amplitude: f64,
    pub k: f64,
    pub center: f64,
}

impl Profile for GaussianProfile {
    fn value(&self, s: f64) -> f64 {
        let d = self.k * (s - self.center);
        self.amplitude * (-d * d).exp()
    }
    fn derivative(&self, s: f64) -> f64 {
        -2.0 * self.k * self.k * (s - self.center) * self.value(s)
    }
    fn antiderivative(&self, s: f64) -> f64 {
        let norm = self.amplitude * std::f64::consts::PI.sqrt() / (2.0 * self.k);
        norm * (erf(self.k * (s - self.center)) - erf(-self.k * self.center))
    }
}

/// `scale * (1 + sin^2 s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinSquaredProfile {
    pub scale: f64,
}

impl Profile for SinSquaredProfile {
    fn value(&self, s: f64) -> f64 {
        let sn = s.sin();
        self.scale * (1.0 + sn * sn)
    }
    fn derivative(&self, s: f64) -> f64 {
        self.scale * (2.0 * s).sin()
    }
    fn antiderivative(&self, s: f64) -> f64 {
        self.scale * (1.5 * s - 0.25 * (2.0 * s).sin())
    }
}

/// Natural cubic spline through tabulated samples; constant beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
    // cumulative integral from knots[0] to knots[i]
    cumulative: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("tabulated profile needs at least two samples".into()));
        }
        let knots: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("tabulated knots must be strictly increasing".into()));
        }
        let n = knots.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let h0 = knots[i] - knots[i - 1];
                let w = h0 / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
        }
        let mut p = Self {
            knots,
            values,
            m,
            cumulative: vec![0.0; n],
        };
        for i in 1..n {
            let seg = p.segment_integral(i - 1, p.knots[i]);
            p.cumulative[i] = p.cumulative[i - 1] + seg;
        }
        Ok(p)
    }

    fn locate(&self, s: f64) -> usize {
        let n = self.knots.len();
        match self.knots.partition_point(|&k| k <= s) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    // integral of segment i from knots[i] to s (s inside the segment)
    fn segment_integral(&self, i: usize, s: f64) -> f64 {
        let h = self.knots[i + 1] - self.knots[i];
        let (y0, y1, m0, m1) = (self.values[i], self.values[i + 1], self.m[i], self.m[i + 1]);
        let t = s - self.knots[i];
        // S(x) = y0 A + y1 B + (A^3-A) m0 h^2/6 + (B^3-B) m1 h^2/6,
        // A = 1 - t/h, B = t/h.
        let b = t / h;
        let int_b = h * b * b / 2.0;
        let int_a = t - int_b;
        let int_b3 = h * b.powi(4) / 4.0;
        let int_a3 = h * (1.0 - (1.0 - b).powi(4)) / 4.0;
        y0 * int_a + y1 * int_b + (int_a3 - int_a) * m0 * h * h / 6.0 + (int_b3 - int_b) * m1 * h * h / 6.0
    }

    fn integral_from_start(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if s <= self.knots[0] {
            return self.values[0] * (s - self.knots[0]);
        }
        if s >= self.knots[n - 1] {
            return self.cumulative[n - 1] + self.values[n - 1] * (s - self.knots[n - 1]);
        }
        let i = self.locate(s);
        self.cumulative[i] + self.segment_integral(i, s)
    }
}

impl Profile for TabulatedProfile {
    fn value(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if s <= self.knots[0] {
            return self.values[0];
        }
        if s >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = self.locate(s);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - s) / h;
        let b = 1.0 - a;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn derivative(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if s < self.knots[0] || s > self.knots[n - 1] {
            return 0.0;
        }
        let i = self.locate(s);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - s) / h;
        let b = 1.0 - a;
        (self.values[i + 1] - self.values[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    fn antiderivative(&self, s: f64) -> f64 {
        self.integral_from_start(s) - self.integral_from_start(0.0)
    }
}

/// User-supplied closure. The derivative is a five-point O(h^4) difference
/// with `h = 1e-5 * max(1, |s|)`; the antiderivative is computed by quadrature.
#[derive(Clone)]
pub struct FnProfile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Debug for FnProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("FnProfile")
    }
}

impl FnProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }
}

/// Five-point central difference, O(h^4).
pub fn five_point_derivative(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h)
}

impl Profile for FnProfile {
    fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }
    fn derivative(&self, s: f64) -> f64 {
        five_point_derivative(&*self.f, s, 1e-5 * s.abs().max(1.0))
    }
    fn antiderivative(&self, s: f64) -> f64 {
        quad::integrate(&*self.f, 0.0, s, 1e-12)
    }
}
