//! Minkowski four-vectors and light-front coordinates.
//!
//! Conventions used across the crate:
//!
//! * metric signature `(+,-,-,-)`, natural units `c = 1`;
//! * a [`FourVector`] holds contravariant components `x^mu = (t, x, y, z)`
//!   unless a function says it returns a gradient or momentum, in which case
//!   the same storage holds lower-index components `(d_0, d_1, d_2, d_3)`;
//! * light-front coordinates are `x+ = t + z`, `x- = t - z`, with transverse
//!   `x^perp = (x, y)`; the light-front metric is
//!   `a.b = (a+ b- + a- b+)/2 - a^perp b^perp`;
//! * light-front momenta are lower-index, `p_+ = (p_0 + p_3)/2` and
//!   `p_- = (p_0 - p_3)/2`, so that `p.p = 4 p_+ p_- - p_perp p_perp`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Diagonal of the Minkowski metric.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Four components in Cartesian order `(0, 1, 2, 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector<T = f64>(pub [T; 4]);

impl<T: Real> FourVector<T> {
    pub const fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Self([x0, x1, x2, x3])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 4])
    }

    /// Unit vector along Cartesian axis `mu`.
    pub fn basis(mu: usize) -> Self {
        let mut v = Self::zero();
        v.0[mu] = T::one();
        v
    }

    pub fn t(&self) -> T {
        self.0[0]
    }

    pub fn x(&self) -> T {
        self.0[1]
    }

    pub fn y(&self) -> T {
        self.0[2]
    }

    pub fn z(&self) -> T {
        self.0[3]
    }

    /// Flips the spatial components: raises a lower index or lowers an upper one.
    pub fn flip_index(&self) -> Self {
        let [a, b, c, d] = self.0;
        Self([a, -b, -c, -d])
    }

    /// Plain index contraction `sum_mu a^mu b_mu` of an upper-index vector with
    /// a lower-index one (no metric inserted).
    pub fn contract(&self, lower: &Self) -> T {
        self.0.iter().zip(lower.0.iter()).map(|(&a, &b)| a * b).sum()
    }

    /// `x.x` with the Minkowski metric.
    pub fn square(&self) -> T {
        minkowski_dot(self, self)
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, &c| m.max(c.abs()))
    }

    pub fn to_lightfront(&self) -> LightFrontCoords<T> {
        to_lightfront(self)
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> FourVector<U> {
        FourVector(self.0.map(f))
    }
}

/// Minkowski inner product `a^0 b^0 - a^1 b^1 - a^2 b^2 - a^3 b^3`.
pub fn minkowski_dot<T: Real>(a: &FourVector<T>, b: &FourVector<T>) -> T {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Light-front coordinates `(x+, x-, x^1, x^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LightFrontCoords<T = f64> {
    pub xplus: T,
    pub xminus: T,
    pub x1: T,
    pub x2: T,
}

impl<T: Real> LightFrontCoords<T> {
    pub fn new(xplus: T, xminus: T, x1: T, x2: T) -> Self {
        Self {
            xplus,
            xminus,
            x1,
            x2,
        }
    }

    pub fn to_cartesian(&self) -> FourVector<T> {
        from_lightfront(self)
    }

    /// `x+ x- - x^perp x^perp`, equal to the Minkowski square of the point.
    pub fn square(&self) -> T {
        self.xplus * self.xminus - self.x1 * self.x1 - self.x2 * self.x2
    }

    pub fn transverse_sq(&self) -> T {
        self.x1 * self.x1 + self.x2 * self.x2
    }
}

pub fn to_lightfront<T: Real>(x: &FourVector<T>) -> LightFrontCoords<T> {
    LightFrontCoords {
        xplus: x.0[0] + x.0[3],
        xminus: x.0[0] - x.0[3],
        x1: x.0[1],
        x2: x.0[2],
    }
}

pub fn from_lightfront<T: Real>(lf: &LightFrontCoords<T>) -> FourVector<T> {
    let half = T::lit(0.5);
    FourVector([
        (lf.xplus + lf.xminus) * half,
        lf.x1,
        lf.x2,
        (lf.xplus - lf.xminus) * half,
    ])
}

/// Converts light-front lower-index momenta `(p_+, p_-, p_1, p_2)` to Cartesian
/// lower-index `(p_0, p_1, p_2, p_3)`.
pub fn momentum_from_lightfront<T: Real>(pplus: T, pminus: T, p1: T, p2: T) -> FourVector<T> {
    FourVector([pplus + pminus, p1, p2, pplus - pminus])
}

/// Inverse of [`momentum_from_lightfront`]: returns `(p_+, p_-)`.
pub fn lightfront_momenta<T: Real>(p: &FourVector<T>) -> (T, T) {
    let half = T::lit(0.5);
    ((p.0[0] + p.0[3]) * half, (p.0[0] - p.0[3]) * half)
}

impl<T: Real> Index<usize> for FourVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Real> IndexMut<usize> for FourVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for FourVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl<T: Real> Sub for FourVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl<T: Real> Neg for FourVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl<T: Real> Mul<T> for FourVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}
