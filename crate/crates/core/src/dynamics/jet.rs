//! First-order forward-mode differentiation over phase space.
//!
//! A [`Jet`] carries a value and its gradient with respect to the phase-space
//! variables of a state. Coordinates occupy slots `0..4`, momenta slots
//! `4..8`, whatever the form (unused slots stay zero).

use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub const SLOTS: usize = 8;
/// Slot offset of the momenta.
pub const P_OFFSET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; SLOTS],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, d: [0.0; SLOTS] }
    }

    pub fn variable(v: f64, slot: usize) -> Self {
        let mut d = [0.0; SLOTS];
        d[slot] = 1.0;
        Self { v, d }
    }

    /// Applies a scalar function with value `fv` and derivative `dfdv`.
    pub fn chain(&self, fv: f64, dfdv: f64) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= dfdv;
        }
        Self { v: fv, d }
    }

    /// Builds `F(x)` from its value and gradient at `x.v`, for `x` a list of jets.
    pub fn compose(fv: f64, grad: &[f64], xs: &[Jet]) -> Self {
        let mut d = [0.0; SLOTS];
        for (g, x) in grad.iter().zip(xs) {
            for (o, xd) in d.iter_mut().zip(x.d.iter()) {
                *o += g * xd;
            }
        }
        Self { v: fv, d }
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r)
    }

    pub fn recip(self) -> Self {
        self.chain(1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn powi(self, n: i32) -> Self {
        self.chain(self.v.powi(n), n as f64 * self.v.powi(n - 1))
    }

    pub fn dq(&self, a: usize) -> f64 {
        self.d[a]
    }

    pub fn dp(&self, a: usize) -> f64 {
        self.d[P_OFFSET + a]
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for (a, b) in self.d.iter_mut().zip(o.d.iter()) {
            *a += b;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        *self = *self + o;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.v = -self.v;
        for a in self.d.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut d = [0.0; SLOTS];
        for i in 0..SLOTS {
            d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        Jet { v: self.v * o.v, d }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.chain(self.v * s, s)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, s: f64) -> Jet {
        self * (1.0 / s)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}
