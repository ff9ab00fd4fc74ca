//! Closed-form and quadrature orbits of the solvable families, used as
//! oracles for the numerical evolution.

use std::sync::Arc;

use libm::erf;

use crate::backgrounds::{Family, NullArgument, Profile, ScalarBackground};
use crate::conformal::ConformalGenerator;
use crate::dynamics::quantities::{charge_jet, planewave_set};
use crate::dynamics::{hamiltonian_instant, Form, PhaseSpaceState};
use crate::error::{Error, Result};
use crate::quad;

/// Common interface of the closed-form orbits: the state at a given time
/// (`t` for instant-form orbits, `x+` for light-front ones).
pub trait ClosedFormOrbit {
    fn family(&self) -> &'static str;
    fn form(&self) -> Form;
    fn state_at(&self, time: f64) -> Result<PhaseSpaceState>;
    /// Interval on which the closed form describes the motion.
    fn window(&self) -> (f64, f64);
}

fn nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        Err(Error::InvalidParameter(format!("{name} must be finite and non-zero")))
    } else {
        Ok(())
    }
}

/// Motion in `m^2 = m0^2 + B z`:
///
/// ```text
/// p3(t) = p3(t0) + B (t - t0)/(2 Q5)
/// x = (Q3 - 2 Q1 p3)/B,  y = (Q4 - 2 Q2 p3)/B,  z = (Q5^2 - Q_perp^2 - m0^2 - p3^2)/B
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SpacelikeOrbit {
    pub b: f64,
    pub m0sq: f64,
    /// `Q1..Q5`
    pub q: [f64; 5],
    pub t0: f64,
    pub p3_0: f64,
    /// Set for the switched background: the orbit leaves the field at `z = 0`.
    pub switched: bool,
}

impl SpacelikeOrbit {
    pub fn new(b: f64, m0sq: f64, init: &PhaseSpaceState, switched: bool) -> Result<Self> {
        nonzero("B", b)?;
        if init.form != Form::Instant {
            return Err(Error::FormMismatch("spacelike orbit needs an instant-form state".into()));
        }
        let bg = ScalarBackground::linear_z(m0sq, b, false)?;
        let (x, y) = (init.q[0], init.q[1]);
        let (p1, p2, p3) = (init.p[0], init.p[1], init.p[2]);
        let h = hamiltonian_instant(init, &bg)?;
        Ok(Self {
            b,
            m0sq,
            q: [p1, p2, 2.0 * p1 * p3 + b * x, 2.0 * p2 * p3 + b * y, h],
            t0: init.time,
            p3_0: p3,
            switched,
        })
    }

    pub fn p3(&self, t: f64) -> f64 {
        self.p3_0 + self.b * (t - self.t0) / (2.0 * self.q[4])
    }

    fn qperp_sq(&self) -> f64 {
        self.q[0] * self.q[0] + self.q[1] * self.q[1]
    }

    /// First time after `t0` at which `z` returns to zero.
    pub fn exit_time(&self) -> Option<f64> {
        let pz2 = self.q[4] * self.q[4] - self.qperp_sq() - self.m0sq;
        if pz2 < 0.0 {
            return None;
        }
        let pz = pz2.sqrt();
        let dt = |target: f64| 2.0 * self.q[4] * (target - self.p3_0) / self.b;
        [dt(pz), dt(-pz)]
            .into_iter()
            .filter(|&d| d > 1e-14 * (1.0 + d.abs()))
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
            .map(|d| self.t0 + d)
    }
}

impl ClosedFormOrbit for SpacelikeOrbit {
    fn family(&self) -> &'static str {
        "spacelike"
    }

    fn form(&self) -> Form {
        Form::Instant
    }

    fn state_at(&self, t: f64) -> Result<PhaseSpaceState> {
        let p3 = self.p3(t);
        let [q1, q2, q3, q4, q5] = self.q;
        let x = (q3 - 2.0 * q1 * p3) / self.b;
        let y = (q4 - 2.0 * q2 * p3) / self.b;
        let z = (q5 * q5 - self.qperp_sq() - self.m0sq - p3 * p3) / self.b;
        Ok(PhaseSpaceState::instant(t, [x, y, z], [q1, q2, p3]))
    }

    fn window(&self) -> (f64, f64) {
        let end = if self.switched {
            self.exit_time().unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        (self.t0, end)
    }
}

/// Motion in `m^2 = m0^2 + E(t)` from `t = 0`: constant momenta and
/// `x(t) = x(0) - p int_0^t ds / sqrt(p^2 + m0^2 + E(s))`.
#[derive(Debug, Clone)]
pub struct TimelikeOrbit {
    pub m0sq: f64,
    pub e: Arc<dyn Profile>,
    pub x0: [f64; 3],
    pub p: [f64; 3],
}

impl TimelikeOrbit {
    pub fn new(m0sq: f64, e: Arc<dyn Profile>, init: &PhaseSpaceState) -> Result<Self> {
        if init.form != Form::Instant || init.time != 0.0 {
            return Err(Error::FormMismatch("timelike orbit needs an instant-form state at t = 0".into()));
        }
        Ok(Self {
            m0sq,
            e,
            x0: [init.q[0], init.q[1], init.q[2]],
            p: [init.p[0], init.p[1], init.p[2]],
        })
    }

    /// `int_0^t ds / H(s)`.
    pub fn time_integral(&self, t: f64) -> Result<f64> {
        let p2: f64 = self.p.iter().map(|v| v * v).sum();
        // reality along the whole interval, checked on a fine grid first
        let n = 256;
        for i in 0..=n {
            let s = t * i as f64 / n as f64;
            let m2 = self.m0sq + self.e.value(s);
            if m2 < 0.0 {
                return Err(Error::Reality {
                    m2,
                    at: crate::geometry::FourVector::new(s, 0.0, 0.0, 0.0),
                });
            }
        }
        Ok(quad::integrate(|s| 1.0 / (p2 + self.m0sq + self.e.value(s)).sqrt(), 0.0, t, 1e-13))
    }

    /// `L_j = eps_jkl x^k p_l` at time `t`.
    pub fn angular_momenta(&self, t: f64) -> Result<[f64; 3]> {
        let s = self.state_at(t)?;
        let (x, p) = (&s.q, &s.p);
        Ok([
            x[1] * p[2] - x[2] * p[1],
            x[2] * p[0] - x[0] * p[2],
            x[0] * p[1] - x[1] * p[0],
        ])
    }
}

impl ClosedFormOrbit for TimelikeOrbit {
    fn family(&self) -> &'static str {
        "timelike"
    }

    fn form(&self) -> Form {
        Form::Instant
    }

    fn state_at(&self, t: f64) -> Result<PhaseSpaceState> {
        let i = self.time_integral(t)?;
        let x = [
            self.x0[0] - self.p[0] * i,
            self.x0[1] - self.p[1] * i,
            self.x0[2] - self.p[2] * i,
        ];
        Ok(PhaseSpaceState::instant(t, x, self.p))
    }

    fn window(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

fn plane_wave_profile(bg: &ScalarBackground) -> Result<Arc<dyn Profile>> {
    match bg.family() {
        Family::PlaneWave {
            profile,
            argument: NullArgument::Plus,
        } => Ok(profile.clone()),
        _ => Err(Error::InvalidParameter("expected a plane wave depending on x+".into())),
    }
}

/// `Q1..Q7` of the extended plane-wave system at `s`.
pub fn planewave_quantities(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<[f64; 7]> {
    let qs = planewave_set(bg)?;
    let mut out = [0.0; 7];
    for (o, q) in out.iter_mut().zip(qs.iter()) {
        *o = q.eval(s)?;
    }
    Ok(out)
}

/// Plane-wave orbit in the extended front form: momenta `p_-, p_perp` are
/// constant, `x^perp` follows from `Q4, Q5` and `x-` from `Q7`.
#[derive(Debug, Clone)]
pub struct PlaneWaveOrbit {
    profile: Arc<dyn Profile>,
    pub q: [f64; 7],
    pub xplus0: f64,
}

impl PlaneWaveOrbit {
    pub fn new(init: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Self> {
        let profile = plane_wave_profile(bg)?;
        let s = init.convert(Form::ExtendedFront, bg)?;
        nonzero("p_-", s.p[1])?;
        Ok(Self {
            profile,
            q: planewave_quantities(&s, bg)?,
            xplus0: s.q[0],
        })
    }

    /// `x-(x+) = (Q7 + p_perp^2 x+ + int_0^{x+} m^2) / (4 p_-^2)`.
    pub fn xminus(&self, xplus: f64) -> f64 {
        let [p1, p2, pm, _, _, _, q7] = self.q;
        (q7 + (p1 * p1 + p2 * p2) * xplus + self.profile.antiderivative(xplus)) / (4.0 * pm * pm)
    }
}

impl ClosedFormOrbit for PlaneWaveOrbit {
    fn family(&self) -> &'static str {
        "plane-wave"
    }

    fn form(&self) -> Form {
        Form::ExtendedFront
    }

    fn state_at(&self, xplus: f64) -> Result<PhaseSpaceState> {
        let [p1, p2, pm, q4, q5, q6, _] = self.q;
        let x1 = (q4 - xplus * p1) / (2.0 * pm);
        let x2 = (q5 - xplus * p2) / (2.0 * pm);
        let m2 = self.profile.value(xplus);
        let pplus = (q6 + p1 * p1 + p2 * p2 + m2) / (4.0 * pm);
        Ok(PhaseSpaceState::extended([xplus, self.xminus(xplus), x1, x2], [pplus, pm, p1, p2]))
    }

    fn window(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Orbit in a special-conformal mass `f(u)/x+^2`, `u = x- - x_perp^2/x+`.
///
/// With `Q_perp` the null-rotation charges and `Q3 = xi_c.p`:
///
/// ```text
/// int_{u0}^{u} (Q_perp^2 + f(s)) ds / (4 Q3^2) = 1/x+_0 - 1/x+
/// p_- = -(Q_perp^2 + f(u)) / (4 Q3)
/// x_perp / x+ = x_perp0 / x+_0 + Q_perp (u - u0) / (2 Q3)
/// ```
///
/// The last line integrates the transverse equation exactly, using
/// `d(x_perp/x+)/du = Q_perp/(2 Q3)` along the orbit.
#[derive(Debug, Clone)]
pub struct ConformalOrbit {
    f: Arc<dyn Profile>,
    pub qperp: [f64; 2],
    pub q3: f64,
    pub xplus0: f64,
    pub u0: f64,
    pub xperp0: [f64; 2],
    /// Lower end of the smooth region (`L` for the switched mass, else 0).
    pub switch_on: f64,
}

/// Tolerance of the `u(x+)` inversion.
pub const INVERSION_TOL: f64 = 1e-12;

impl ConformalOrbit {
    pub fn new(init: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Self> {
        let (f, switch_on) = match bg.family() {
            Family::SpecialConformal { f, switch } => (f.clone(), switch.map_or(0.0, |s| s.l)),
            _ => return Err(Error::InvalidParameter("expected a special-conformal background".into())),
        };
        let s = init.convert(Form::Front, bg)?;
        let xp = s.time;
        if !(xp > 0.0) || xp < switch_on {
            return Err(Error::Domain(format!(
                "conformal orbit must start in the smooth region x+ >= {switch_on}, x+ > 0 (got {xp})"
            )));
        }
        let q3 = charge_jet(&ConformalGenerator::special_conformal_null(), &s, bg)?.v;
        nonzero("Q3", q3)?;
        let pm = s.p[0];
        let (x1, x2) = (s.q[1], s.q[2]);
        let qperp = [2.0 * pm * x1 + xp * s.p[1], 2.0 * pm * x2 + xp * s.p[2]];
        let u0 = s.q[0] - (x1 * x1 + x2 * x2) / xp;
        Ok(Self {
            f,
            qperp,
            q3,
            xplus0: xp,
            u0,
            xperp0: [x1, x2],
            switch_on,
        })
    }

    fn qperp_sq(&self) -> f64 {
        self.qperp[0] * self.qperp[0] + self.qperp[1] * self.qperp[1]
    }

    // int_{u0}^{u} (Q_perp^2 + f)
    fn g(&self, u: f64) -> f64 {
        self.qperp_sq() * (u - self.u0) + self.f.antiderivative(u) - self.f.antiderivative(self.u0)
    }

    /// `u(x+)` by bracketed bisection of the monotone relation.
    pub fn u_at(&self, xplus: f64) -> Result<f64> {
        let target = 4.0 * self.q3 * self.q3 * (1.0 / self.xplus0 - 1.0 / xplus);
        if target == 0.0 {
            return Ok(self.u0);
        }
        let dir = target.signum();
        let mut step = 1e-3 * (1.0 + self.u0.abs());
        let mut lo = self.u0;
        let mut hi = self.u0 + dir * step;
        let mut guard = 0;
        while (self.g(hi) - target) * dir < 0.0 {
            if self.qperp_sq() + self.f.value(hi) < 0.0 {
                return Err(Error::Bracketing(format!(
                    "Q_perp^2 + f(u) < 0 at u = {hi}: the relation is not monotone"
                )));
            }
            lo = hi;
            step *= 2.0;
            hi = lo + dir * step;
            guard += 1;
            if guard > 200 || !hi.is_finite() {
                return Err(Error::Bracketing(format!(
                    "x+ = {xplus} lies beyond the orbit's asymptote"
                )));
            }
        }
        // g is increasing in u; keep (lo, hi) with g(lo) < target <= g(hi) in direction dir
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo).abs() <= INVERSION_TOL * (1.0 + mid.abs()) {
                break;
            }
            if (self.g(mid) - target) * dir < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn pminus_at_u(&self, u: f64) -> f64 {
        -(self.qperp_sq() + self.f.value(u)) / (4.0 * self.q3)
    }
}

impl ClosedFormOrbit for ConformalOrbit {
    fn family(&self) -> &'static str {
        "special-conformal"
    }

    fn form(&self) -> Form {
        Form::Front
    }

    fn state_at(&self, xplus: f64) -> Result<PhaseSpaceState> {
        if !(xplus > 0.0) {
            return Err(Error::Domain("conformal orbit is defined for x+ > 0".into()));
        }
        let u = self.u_at(xplus)?;
        let pm = self.pminus_at_u(u);
        let mut xperp = [0.0; 2];
        let mut pperp = [0.0; 2];
        for i in 0..2 {
            xperp[i] = xplus * (self.xperp0[i] / self.xplus0 + self.qperp[i] * (u - self.u0) / (2.0 * self.q3));
            pperp[i] = (self.qperp[i] - 2.0 * pm * xperp[i]) / xplus;
        }
        let xminus = u + (xperp[0] * xperp[0] + xperp[1] * xperp[1]) / xplus;
        Ok(PhaseSpaceState::front(xplus, [xminus, xperp[0], xperp[1]], [pm, pperp[0], pperp[1]]))
    }

    fn window(&self) -> (f64, f64) {
        (self.switch_on.max(f64::MIN_POSITIVE), f64::INFINITY)
    }
}

/// Units of the switched Gaussian conformal mass
/// `m^2 = m0^2 L^2/x+^2 exp(-k^2 u^2)` for `x+ > L`: `x+` in units of `L`,
/// `x-` in units of `1/k`. For `x_perp = p_perp = 0` and an orbit reaching
/// `x- = 0` at `x+ = L` the orbit is
///
/// ```text
/// 1/X+ = 1 - kappa erf(X-),   kappa = 2 sqrt(pi) p_-^2 / (k m0^2 L)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianConformalUnits {
    pub m0: f64,
    pub l: f64,
    pub k: f64,
}

impl GaussianConformalUnits {
    pub fn new(m0: f64, l: f64, k: f64) -> Result<Self> {
        for (n, v) in [("m0", m0), ("L", l), ("k", k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{n} must be positive")));
            }
        }
        Ok(Self { m0, l, k })
    }

    pub fn background(&self) -> Result<ScalarBackground> {
        ScalarBackground::conformal_gaussian_switched(self.m0 * self.m0, self.l, self.k)
    }

    pub fn kappa(&self, pminus: f64) -> f64 {
        2.0 * std::f64::consts::PI.sqrt() * pminus * pminus / (self.k * self.m0 * self.m0 * self.l)
    }

    pub fn pminus_for_kappa(&self, kappa: f64) -> f64 {
        self.m0 * (kappa * self.k * self.l / (2.0 * std::f64::consts::PI.sqrt())).sqrt()
    }

    pub fn to_dimensionless(&self, xplus: f64, xminus: f64) -> (f64, f64) {
        (xplus / self.l, self.k * xminus)
    }

    /// `1/X+ - (1 - kappa erf(X-))`.
    pub fn relation_residual(kappa: f64, xp: f64, xm: f64) -> f64 {
        1.0 / xp - (1.0 - kappa * erf(xm))
    }

    /// `X+` on the curve at a given `X-`.
    pub fn xplus_on_curve(kappa: f64, xm: f64) -> f64 {
        1.0 / (1.0 - kappa * erf(xm))
    }

    /// Limit of `X+` as `X- -> infinity`.
    pub fn asymptote(kappa: f64) -> f64 {
        1.0 / (1.0 - kappa)
    }

    /// Front-form state at `x+ = xplus_start <= L` in the free region, on the
    /// straight line that reaches `x- = 0` at `x+ = L`.
    pub fn initial_state(&self, kappa: f64, xplus_start: f64) -> Result<PhaseSpaceState> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (0, 1), got {kappa}")));
        }
        if xplus_start > self.l {
            return Err(Error::InvalidParameter("start must lie in the free region x+ <= L".into()));
        }
        let pm = self.pminus_for_kappa(kappa);
        let slope = self.m0 * self.m0 / (4.0 * pm * pm);
        Ok(PhaseSpaceState::front(xplus_start, [(xplus_start - self.l) * slope, 0.0, 0.0], [pm, 0.0, 0.0]))
    }
}
