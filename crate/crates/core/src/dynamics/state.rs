use serde::{Deserialize, Serialize};

use super::jet::{Jet, P_OFFSET};
use crate::backgrounds::ScalarBackground;
use crate::error::{Error, Result};
use crate::geometry::{to_lightfront, FourVector, LightFrontCoords};

/// Choice of time and the matching phase-space layout.
///
/// | form       | time  | q                  | p                   |
/// |------------|-------|--------------------|---------------------|
/// | instant    | t     | x, y, z            | p_1, p_2, p_3       |
/// | front      | x+    | x-, x^1, x^2       | p_-, p_1, p_2       |
/// | extended   | x+    | x+, x-, x^1, x^2   | p_+, p_-, p_1, p_2  |
/// | covariant  | tau   | x^0..x^3           | velocity x-dot^mu   |
///
/// Momenta are lower-index. Light-front components are `x+- = t +- z` and
/// `p_+- = (p_0 +- p_3)/2`, so `p.p = 4 p_+ p_- - p_perp^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Instant,
    Front,
    ExtendedFront,
    Covariant,
}

impl Form {
    pub fn dof(&self) -> usize {
        match self {
            Form::Instant | Form::Front => 3,
            Form::ExtendedFront | Form::Covariant => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Form::Instant => "instant",
            Form::Front => "front",
            Form::ExtendedFront => "extended-front",
            Form::Covariant => "covariant",
        }
    }

    pub fn coordinate_labels(&self) -> &'static [&'static str] {
        match self {
            Form::Instant => &["x", "y", "z"],
            Form::Front => &["x-", "x1", "x2"],
            Form::ExtendedFront => &["x+", "x-", "x1", "x2"],
            Form::Covariant => &["x0", "x1", "x2", "x3"],
        }
    }

    pub fn momentum_labels(&self) -> &'static [&'static str] {
        match self {
            Form::Instant => &["p1", "p2", "p3"],
            Form::Front => &["p-", "p1", "p2"],
            Form::ExtendedFront => &["p+", "p-", "p1", "p2"],
            Form::Covariant => &["u0", "u1", "u2", "u3"],
        }
    }

    pub fn time_label(&self) -> &'static str {
        match self {
            Form::Instant => "t",
            Form::Front | Form::ExtendedFront => "x+",
            Form::Covariant => "tau",
        }
    }
}

impl std::str::FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "instant" => Ok(Form::Instant),
            "front" => Ok(Form::Front),
            "extended" | "extended-front" | "extended_front" => Ok(Form::ExtendedFront),
            "covariant" => Ok(Form::Covariant),
            other => Err(Error::InvalidParameter(format!("unknown form '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceState {
    pub form: Form,
    pub time: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseSpaceState {
    pub fn instant(t: f64, x: [f64; 3], p: [f64; 3]) -> Self {
        Self {
            form: Form::Instant,
            time: t,
            q: x.to_vec(),
            p: p.to_vec(),
        }
    }

    /// Front form; `q = (x-, x1, x2)`, `p = (p_-, p_1, p_2)`.
    pub fn front(xplus: f64, q: [f64; 3], p: [f64; 3]) -> Self {
        Self {
            form: Form::Front,
            time: xplus,
            q: q.to_vec(),
            p: p.to_vec(),
        }
    }

    /// Extended front form; `q = (x+, x-, x1, x2)`, `p = (p_+, p_-, p_1, p_2)`.
    /// The time value mirrors `x+`.
    pub fn extended(q: [f64; 4], p: [f64; 4]) -> Self {
        Self {
            form: Form::ExtendedFront,
            time: q[0],
            q: q.to_vec(),
            p: p.to_vec(),
        }
    }

    /// Covariant form: position `x^mu` and velocity `u^mu` at parameter `tau`.
    pub fn covariant(tau: f64, x: FourVector, u: FourVector) -> Self {
        Self {
            form: Form::Covariant,
            time: tau,
            q: x.0.to_vec(),
            p: u.0.to_vec(),
        }
    }

    /// Builds a state of the requested form from a spacetime point and a
    /// lower-index four-momentum. Components fixed by the form's Hamiltonian
    /// (`p_0` or `p_+`) are dropped; the covariant form stores `p^mu / m`.
    pub fn from_point(form: Form, x: &FourVector, p: &FourVector, bg: &ScalarBackground) -> Result<Self> {
        let lf = to_lightfront(x);
        let (pplus, pminus) = crate::geometry::lightfront_momenta(p);
        Ok(match form {
            Form::Instant => Self::instant(x.t(), [x.x(), x.y(), x.z()], [p[1], p[2], p[3]]),
            Form::Front => Self::front(lf.xplus, [lf.xminus, lf.x1, lf.x2], [pminus, p[1], p[2]]),
            Form::ExtendedFront => Self::extended([lf.xplus, lf.xminus, lf.x1, lf.x2], [pplus, pminus, p[1], p[2]]),
            Form::Covariant => {
                let m = bg.mass(x)?;
                if m == 0.0 {
                    return Err(Error::Domain("covariant form needs m > 0".into()));
                }
                Self::covariant(0.0, *x, p.flip_index().scale(1.0 / m))
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Spacetime point of the state.
    pub fn position(&self) -> FourVector {
        match self.form {
            Form::Instant => FourVector::new(self.time, self.q[0], self.q[1], self.q[2]),
            Form::Front => LightFrontCoords::new(self.time, self.q[0], self.q[1], self.q[2]).to_cartesian(),
            Form::ExtendedFront => LightFrontCoords::new(self.q[0], self.q[1], self.q[2], self.q[3]).to_cartesian(),
            Form::Covariant => FourVector::new(self.q[0], self.q[1], self.q[2], self.q[3]),
        }
    }

    /// Lower-index four-momentum, reconstructing `p_0` (instant) or `p_+`
    /// (front) from the Hamiltonian.
    pub fn four_momentum(&self, bg: &ScalarBackground) -> Result<FourVector> {
        let j = self.four_momentum_jet(bg)?;
        Ok(FourVector::new(j[0].v, j[1].v, j[2].v, j[3].v))
    }

    pub(crate) fn q_jets(&self) -> Vec<Jet> {
        self.q.iter().enumerate().map(|(a, &v)| Jet::variable(v, a)).collect()
    }

    pub(crate) fn p_jets(&self) -> Vec<Jet> {
        self.p.iter().enumerate().map(|(a, &v)| Jet::variable(v, P_OFFSET + a)).collect()
    }

    /// Cartesian position as jets over this state's phase space.
    pub fn position_jet(&self) -> [Jet; 4] {
        let q = self.q_jets();
        match self.form {
            Form::Instant => [Jet::constant(self.time), q[0], q[1], q[2]],
            Form::Front => {
                let xp = Jet::constant(self.time);
                [(xp + q[0]) * 0.5, q[1], q[2], (xp - q[0]) * 0.5]
            }
            Form::ExtendedFront => [(q[0] + q[1]) * 0.5, q[2], q[3], (q[0] - q[1]) * 0.5],
            Form::Covariant => [q[0], q[1], q[2], q[3]],
        }
    }

    /// `m^2(x)` as a jet.
    pub fn m2_jet(&self, bg: &ScalarBackground) -> Result<Jet> {
        let xs = self.position_jet();
        let x = FourVector::new(xs[0].v, xs[1].v, xs[2].v, xs[3].v);
        let m2 = bg.m2(&x)?;
        let g = bg.grad_m2(&x)?;
        Ok(Jet::compose(m2, &g.0, &xs))
    }

    /// Lower-index four-momentum as jets.
    pub fn four_momentum_jet(&self, bg: &ScalarBackground) -> Result<[Jet; 4]> {
        let p = self.p_jets();
        Ok(match self.form {
            Form::Instant => {
                let h = super::hamiltonian::instant_jet(self, bg)?;
                [h, p[0], p[1], p[2]]
            }
            Form::Front => {
                let pplus = super::hamiltonian::front_jet(self, bg)?;
                [pplus + p[0], p[1], p[2], pplus - p[0]]
            }
            Form::ExtendedFront => [p[0] + p[1], p[2], p[3], p[0] - p[1]],
            Form::Covariant => {
                let m = self.m2_jet(bg)?.sqrt();
                [m * p[0], -(m * p[1]), -(m * p[2]), -(m * p[3])]
            }
        })
    }

    /// Light-front momenta `(p_+, p_-)` reconstructed for any form.
    pub fn lightfront_momenta(&self, bg: &ScalarBackground) -> Result<(f64, f64)> {
        let p = self.four_momentum(bg)?;
        Ok(crate::geometry::lightfront_momenta(&p))
    }

    /// Re-expresses the state in another form (same spacetime point and
    /// four-momentum).
    pub fn convert(&self, form: Form, bg: &ScalarBackground) -> Result<Self> {
        if form == self.form {
            return Ok(self.clone());
        }
        let x = self.position();
        let p = self.four_momentum(bg)?;
        Self::from_point(form, &x, &p, bg)
    }

    /// Checks the form's invariants: real Hamiltonian, `p_- != 0`, unit velocity.
    pub fn validate(&self, bg: &ScalarBackground) -> Result<()> {
        let n = match self.form {
            Form::Instant | Form::Front => 3,
            _ => 4,
        };
        if self.q.len() != n || self.p.len() != n {
            return Err(Error::FormMismatch(format!(
                "{} state needs {n} coordinates and momenta, got {} and {}",
                self.form.name(),
                self.q.len(),
                self.p.len()
            )));
        }
        if !self.time.is_finite() || self.q.iter().chain(self.p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("state has non-finite entries".into()));
        }
        match self.form {
            Form::Front if self.p[0] == 0.0 => return Err(Error::ZeroLongitudinalMomentum(0.0)),
            Form::ExtendedFront if self.p[1] == 0.0 => return Err(Error::ZeroLongitudinalMomentum(0.0)),
            Form::Covariant => {
                let u = FourVector::new(self.p[0], self.p[1], self.p[2], self.p[3]);
                if (u.square() - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidParameter(format!("covariant velocity must satisfy u.u = 1, got {}", u.square())));
                }
            }
            _ => {}
        }
        bg.m2(&self.position())?;
        Ok(())
    }

    pub(crate) fn to_vec(&self) -> Vec<f64> {
        let mut y = self.q.clone();
        y.extend_from_slice(&self.p);
        y
    }

    pub(crate) fn from_vec(form: Form, time: f64, y: &[f64]) -> Self {
        let n = y.len() / 2;
        let mut s = Self {
            form,
            time,
            q: y[..n].to_vec(),
            p: y[n..].to_vec(),
        };
        if form == Form::ExtendedFront {
            // ignore the evolution parameter, x+ is the clock
            s.time = s.q[0];
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        let bg = ScalarBackground::linear_z(1.0, 0.5, false).unwrap();
        let s = PhaseSpaceState::instant(0.3, [0.1, -0.2, 0.4], [0.2, 0.1, -0.5]);
        let p = s.four_momentum(&bg).unwrap();
        // on shell
        let m2 = bg.m2(&s.position()).unwrap();
        assert!((p.flip_index().contract(&p) - m2).abs() < 1e-14);
        for form in [Form::Front, Form::ExtendedFront, Form::Covariant] {
            let t = s.convert(form, &bg).unwrap();
            t.validate(&bg).unwrap();
            assert!((t.position() - s.position()).max_abs() < 1e-14, "{form:?}");
            assert!((t.four_momentum(&bg).unwrap() - p).max_abs() < 1e-14, "{form:?}");
            let back = t.convert(Form::Instant, &bg).unwrap();
            for i in 0..3 {
                assert!((back.q[i] - s.q[i]).abs() < 1e-14);
                assert!((back.p[i] - s.p[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn front_rest_particle() {
        // p_perp = 0, p_- = m0/2 gives p_+ = m0/2, so p_0 = m0 and p_3 = 0
        let bg = ScalarBackground::constant(4.0).unwrap();
        let s = PhaseSpaceState::front(0.0, [0.0; 3], [1.0, 0.0, 0.0]);
        let p = s.four_momentum(&bg).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-15 && p[3].abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let bg = ScalarBackground::constant(1.0).unwrap();
        assert!(matches!(
            PhaseSpaceState::front(0.0, [0.0; 3], [0.0, 1.0, 0.0]).validate(&bg),
            Err(Error::ZeroLongitudinalMomentum(_))
        ));
        let bad = PhaseSpaceState::covariant(0.0, FourVector::zero(), FourVector::new(1.0, 0.5, 0.0, 0.0));
        assert!(bad.validate(&bg).is_err());
    }
}
