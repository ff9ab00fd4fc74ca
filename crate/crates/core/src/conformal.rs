//! The 15-parameter conformal algebra of Minkowski space.
//!
//! A [`ConformalGenerator`] stores lower-index parameters and evaluates
//!
//! ```text
//! xi_mu(x) = a_mu + omega_{mu nu} x^nu + lambda x_mu + c_mu x^2 - 2 (c.x) x_mu
//! ```
//!
//! Every derivative used here is closed form; nothing in this module
//! differentiates numerically.
//!
//! Bracket orientation: `lie_bracket(g1, g2)` is the field
//! `xi2.d xi1 - xi1.d xi2` (the commutator `[xi2, xi1]` of the two Lie
//! derivatives). With the sign of the Poisson bracket used in
//! [`crate::dynamics`], this makes `{Q_g1, Q_g2} = Q_{lie_bracket(g1, g2)}`
//! for the charges `Q = xi.p`.

use serde::{Deserialize, Serialize};

use crate::backgrounds::ScalarBackground;
use crate::dynamics::PhaseSpaceState;
use crate::error::{Error, Result};
use crate::geometry::{FourVector, METRIC};
use crate::real::Real;

type Mat4<T> = [[T; 4]; 4];

fn eta<T: Real>(mu: usize) -> T {
    T::lit(METRIC[mu])
}

fn zeros4<T: Real>() -> Mat4<T> {
    [[T::zero(); 4]; 4]
}

/// Infinitesimal conformal transformation with lower-index parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "GeneratorRepr<T>",
    into = "GeneratorRepr<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct ConformalGenerator<T: Real = f64> {
    a: FourVector<T>,
    omega: Mat4<T>,
    lambda: T,
    c: FourVector<T>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRepr<T> {
    a: [T; 4],
    omega: [[T; 4]; 4],
    lambda: T,
    c: [T; 4],
}

impl<T: Real> TryFrom<GeneratorRepr<T>> for ConformalGenerator<T> {
    type Error = Error;
    fn try_from(r: GeneratorRepr<T>) -> Result<Self> {
        Self::new(FourVector(r.a), r.omega, r.lambda, FourVector(r.c))
    }
}

impl<T: Real> From<ConformalGenerator<T>> for GeneratorRepr<T> {
    fn from(g: ConformalGenerator<T>) -> Self {
        Self {
            a: g.a.0,
            omega: g.omega,
            lambda: g.lambda,
            c: g.c.0,
        }
    }
}

impl<T: Real> Default for ConformalGenerator<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> ConformalGenerator<T> {
    /// Builds a generator from lower-index parameters. `omega` must be exactly
    /// antisymmetric.
    pub fn new(a: FourVector<T>, omega: Mat4<T>, lambda: T, c: FourVector<T>) -> Result<Self> {
        for mu in 0..4 {
            for nu in 0..4 {
                if omega[mu][nu] != -omega[nu][mu] {
                    return Err(Error::InvalidGenerator(format!(
                        "omega not antisymmetric at ({mu},{nu}): {} vs {}",
                        omega[mu][nu], omega[nu][mu]
                    )));
                }
            }
        }
        let finite = a.0.iter().chain(c.0.iter()).all(|v| v.is_finite())
            && lambda.is_finite()
            && omega.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGenerator("non-finite parameter".into()));
        }
        Ok(Self {
            a,
            omega,
            lambda,
            c,
        })
    }

    pub fn zero() -> Self {
        Self {
            a: FourVector::zero(),
            omega: zeros4(),
            lambda: T::zero(),
            c: FourVector::zero(),
        }
    }

    /// Translation along the contravariant direction `dir`, i.e. `xi^mu = dir^mu`.
    pub fn translation(dir: FourVector<T>) -> Self {
        Self {
            a: dir.flip_index(),
            ..Self::zero()
        }
    }

    /// Translation along `x+` (`xi.p = p_+`).
    pub fn translation_plus() -> Self {
        let h = T::lit(0.5);
        Self::translation(FourVector::new(h, T::zero(), T::zero(), h))
    }

    /// Translation along `x-` (`xi.p = p_-`).
    pub fn translation_minus() -> Self {
        let h = T::lit(0.5);
        Self::translation(FourVector::new(h, T::zero(), T::zero(), -h))
    }

    /// Lorentz transformation from an arbitrary lower-index `omega`; only the
    /// antisymmetric part is kept.
    pub fn lorentz(omega: Mat4<T>) -> Self {
        let half = T::lit(0.5);
        let mut w = zeros4();
        for mu in 0..4 {
            for nu in 0..4 {
                w[mu][nu] = (omega[mu][nu] - omega[nu][mu]) * half;
            }
        }
        Self {
            omega: w,
            ..Self::zero()
        }
    }

    fn with_pairs(pairs: &[(usize, usize, f64)]) -> Self {
        let mut w = zeros4();
        for &(mu, nu, v) in pairs {
            w[mu][nu] = T::lit(v);
            w[nu][mu] = T::lit(-v);
        }
        Self {
            omega: w,
            ..Self::zero()
        }
    }

    /// Rotation about z: `xi.p = x p_2 - y p_1`.
    pub fn rotation_z() -> Self {
        Self::with_pairs(&[(1, 2, 1.0)])
    }

    /// Boost along z: `xi^0 = z`, `xi^3 = t`; in front-form variables
    /// `xi.p = x+ p_+ - x- p_-`.
    pub fn boost_z() -> Self {
        Self::with_pairs(&[(0, 3, 1.0)])
    }

    /// Null rotation `T_i` (`i` = 1 or 2): `xi.p = 2 x^i p_- + x+ p_i`.
    pub fn null_rotation_t(i: usize) -> Self {
        assert!(i == 1 || i == 2, "transverse index must be 1 or 2");
        Self::with_pairs(&[(0, i, 1.0), (3, i, 1.0)])
    }

    /// Null rotation `U_i` (`i` = 1 or 2): `xi.p = 2 x^i p_+ + x- p_i`.
    pub fn null_rotation_u(i: usize) -> Self {
        assert!(i == 1 || i == 2, "transverse index must be 1 or 2");
        Self::with_pairs(&[(0, i, 1.0), (3, i, -1.0)])
    }

    pub fn dilation(lambda: T) -> Self {
        Self {
            lambda,
            ..Self::zero()
        }
    }

    /// Special conformal transformation with lower-index `c_mu`.
    pub fn special_conformal(c: FourVector<T>) -> Self {
        Self {
            c,
            ..Self::zero()
        }
    }

    /// Special conformal transformation with light-front component `c^- = 1`
    /// and all others zero, i.e. lower `c_mu = (1/2, 0, 0, 1/2)` and
    /// `c.x = x+/2`. Masses `f(x- - x^perp x^perp / x+)/x+^2` are symmetric
    /// under it.
    pub fn special_conformal_null() -> Self {
        let h = T::lit(0.5);
        Self::special_conformal(FourVector::new(h, T::zero(), T::zero(), h))
    }

    pub fn a(&self) -> FourVector<T> {
        self.a
    }

    pub fn omega(&self) -> Mat4<T> {
        self.omega
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn c(&self) -> FourVector<T> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut w = self.omega;
        for (row, orow) in w.iter_mut().zip(o.omega.iter()) {
            for (v, ov) in row.iter_mut().zip(orow.iter()) {
                *v = *v + *ov;
            }
        }
        Self {
            a: self.a + o.a,
            omega: w,
            lambda: self.lambda + o.lambda,
            c: self.c + o.c,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            a: self.a * s,
            omega: self.omega.map(|r| r.map(|v| v * s)),
            lambda: self.lambda * s,
            c: self.c * s,
        }
    }

    /// Largest absolute parameter.
    pub fn max_abs(&self) -> T {
        self.omega
            .iter()
            .flatten()
            .fold(self.a.max_abs().max(self.c.max_abs()), |m, v| m.max(v.abs()))
            .max(self.lambda.abs())
    }

    /// Lower-index field `xi_mu(x)`.
    pub fn field_lower(&self, x: &FourVector<T>) -> FourVector<T> {
        let xl = x.flip_index();
        let x2 = x.square();
        let cx = self.c.contract(x);
        let two = T::lit(2.0);
        let mut out = FourVector::zero();
        for mu in 0..4 {
            let rot: T = (0..4).map(|nu| self.omega[mu][nu] * x[nu]).sum();
            out[mu] = self.a[mu] + rot + self.lambda * xl[mu] + self.c[mu] * x2 - two * cx * xl[mu];
        }
        out
    }

    /// Jacobian `J[mu][nu] = d_nu xi^mu` (upper field index, derivative index last).
    pub fn jacobian(&self, x: &FourVector<T>) -> Mat4<T> {
        let xl = x.flip_index();
        let cx = self.c.contract(x);
        let two = T::lit(2.0);
        let mut j = zeros4();
        for mu in 0..4 {
            for nu in 0..4 {
                let diag = if mu == nu { eta::<T>(mu) } else { T::zero() };
                // d_nu xi_mu, then raise mu
                let lower = self.omega[mu][nu] + self.lambda * diag + two * self.c[mu] * xl[nu]
                    - two * self.c[nu] * xl[mu]
                    - two * cx * diag;
                j[mu][nu] = eta::<T>(mu) * lower;
            }
        }
        j
    }

    /// Exact polynomial representation of the contravariant field.
    pub fn to_field(&self) -> VectorFieldPoly<T> {
        let mut f = VectorFieldPoly::zero();
        for mu in 0..4 {
            f.k0[mu] = eta::<T>(mu) * self.a[mu];
            for nu in 0..4 {
                let diag = if mu == nu { eta::<T>(mu) } else { T::zero() };
                f.k1[mu][nu] = eta::<T>(mu) * (self.omega[mu][nu] + self.lambda * diag);
                for rho in 0..4 {
                    let mut v = T::zero();
                    if nu == rho {
                        v = v + eta::<T>(mu) * self.c[mu] * eta::<T>(nu);
                    }
                    if rho == mu {
                        v = v - self.c[nu];
                    }
                    if nu == mu {
                        v = v - self.c[rho];
                    }
                    f.k2[mu][nu][rho] = v;
                }
            }
        }
        f
    }
}

/// Contravariant field `xi^mu(x)` of the generator.
pub fn killing_vector<T: Real>(g: &ConformalGenerator<T>, x: &FourVector<T>) -> FourVector<T> {
    g.field_lower(x).flip_index()
}

/// `d.xi = 4 lambda - 8 c.x`.
pub fn divergence<T: Real>(g: &ConformalGenerator<T>, x: &FourVector<T>) -> T {
    T::lit(4.0) * g.lambda - T::lit(8.0) * g.c.contract(x)
}

/// `d_mu xi_nu + d_nu xi_mu - 1/2 eta_{mu nu} d.xi`, identically zero for a
/// conformal generator.
pub fn conformal_killing_residual<T: Real>(g: &ConformalGenerator<T>, x: &FourVector<T>) -> Mat4<T> {
    residual_from_jacobian(&g.jacobian(x))
}

fn residual_from_jacobian<T: Real>(j: &Mat4<T>) -> Mat4<T> {
    let div: T = (0..4).map(|mu| j[mu][mu]).sum();
    let half = T::lit(0.5);
    let mut r = zeros4();
    for mu in 0..4 {
        for nu in 0..4 {
            // d_nu xi_mu = eta_mu * J[mu][nu]
            let dn_xm = eta::<T>(mu) * j[mu][nu];
            let dm_xn = eta::<T>(nu) * j[nu][mu];
            let trace = if mu == nu { eta::<T>(mu) * div * half } else { T::zero() };
            r[mu][nu] = dn_xm + dm_xn - trace;
        }
    }
    r
}

/// Bracket of two generators, the field `xi2.d xi1 - xi1.d xi2`.
pub fn lie_bracket<T: Real>(g1: &ConformalGenerator<T>, g2: &ConformalGenerator<T>) -> ConformalGenerator<T> {
    let field = VectorFieldPoly::commutator(&g2.to_field(), &g1.to_field());
    // The conformal algebra is closed, so the fit is exact up to rounding.
    field.fit_generator().0
}

/// Polynomial vector field (degree <= 3) with contravariant components
///
/// ```text
/// v^mu(x) = k0[mu] + k1[mu][nu] x^nu + k2[mu][nu][rho] x^nu x^rho
///         + k3[mu][nu][rho][sigma] x^nu x^rho x^sigma
/// ```
///
/// Used for exact brackets and, through [`VectorFieldPoly::killing_residual`],
/// for feeding non-conformal fields into the Killing residual.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldPoly<T: Real = f64> {
    pub k0: [T; 4],
    pub k1: Mat4<T>,
    pub k2: [Mat4<T>; 4],
    pub k3: [[Mat4<T>; 4]; 4],
}

impl<T: Real> VectorFieldPoly<T> {
    pub fn zero() -> Self {
        Self {
            k0: [T::zero(); 4],
            k1: zeros4(),
            k2: [zeros4(); 4],
            k3: [[zeros4(); 4]; 4],
        }
    }

    /// Linear field `v^mu = m[mu][nu] x^nu`.
    pub fn linear(m: Mat4<T>) -> Self {
        Self {
            k1: m,
            ..Self::zero()
        }
    }

    pub fn eval(&self, x: &FourVector<T>) -> FourVector<T> {
        let mut out = FourVector::zero();
        for mu in 0..4 {
            let mut v = self.k0[mu];
            for nu in 0..4 {
                v = v + self.k1[mu][nu] * x[nu];
                for rho in 0..4 {
                    let xx = x[nu] * x[rho];
                    v = v + self.k2[mu][nu][rho] * xx;
                    for sg in 0..4 {
                        v = v + self.k3[mu][nu][rho][sg] * xx * x[sg];
                    }
                }
            }
            out[mu] = v;
        }
        out
    }

    /// `J[mu][nu] = d_nu v^mu`.
    pub fn jacobian(&self, x: &FourVector<T>) -> Mat4<T> {
        let mut j = zeros4();
        for mu in 0..4 {
            for nu in 0..4 {
                let mut v = self.k1[mu][nu];
                for rho in 0..4 {
                    v = v + (self.k2[mu][nu][rho] + self.k2[mu][rho][nu]) * x[rho];
                    for sg in 0..4 {
                        let k = &self.k3[mu];
                        let c = k[nu][rho][sg] + k[rho][nu][sg] + k[rho][sg][nu];
                        v = v + c * x[rho] * x[sg];
                    }
                }
                j[mu][nu] = v;
            }
        }
        j
    }

    pub fn divergence(&self, x: &FourVector<T>) -> T {
        let j = self.jacobian(x);
        (0..4).map(|mu| j[mu][mu]).sum()
    }

    /// Conformal Killing residual of an arbitrary polynomial field.
    pub fn killing_residual(&self, x: &FourVector<T>) -> Mat4<T> {
        residual_from_jacobian(&self.jacobian(x))
    }

    /// Exact `u.d v - v.d u` for fields of degree <= 2.
    pub fn commutator(u: &Self, v: &Self) -> Self {
        debug_assert!(u.k3 == [[zeros4(); 4]; 4] && v.k3 == [[zeros4(); 4]; 4]);
        let mut out = Self::zero();
        out.accumulate_directional(u, v, T::one());
        out.accumulate_directional(v, u, -T::one());
        out
    }

    /// Adds `s * (u.d) w`.
    fn accumulate_directional(&mut self, u: &Self, w: &Self, s: T) {
        // d_sigma w^mu = B0[mu][sigma] + B1[mu][sigma][rho] x^rho
        let mut b1 = [zeros4(); 4];
        for mu in 0..4 {
            for sg in 0..4 {
                for rho in 0..4 {
                    b1[mu][sg][rho] = w.k2[mu][sg][rho] + w.k2[mu][rho][sg];
                }
            }
        }
        let b0 = &w.k1;
        for mu in 0..4 {
            for sg in 0..4 {
                self.k0[mu] = self.k0[mu] + s * u.k0[sg] * b0[mu][sg];
                for nu in 0..4 {
                    self.k1[mu][nu] =
                        self.k1[mu][nu] + s * (u.k1[sg][nu] * b0[mu][sg] + u.k0[sg] * b1[mu][sg][nu]);
                    for rho in 0..4 {
                        self.k2[mu][nu][rho] = self.k2[mu][nu][rho]
                            + s * (u.k2[sg][nu][rho] * b0[mu][sg] + u.k1[sg][nu] * b1[mu][sg][rho]);
                        for tau in 0..4 {
                            self.k3[mu][nu][rho][tau] = self.k3[mu][nu][rho][tau]
                                + s * u.k2[sg][nu][rho] * b1[mu][sg][tau];
                        }
                    }
                }
            }
        }
    }

    /// Reads off the conformal parameters from the Taylor coefficients at the
    /// origin. Returns the generator and the largest coefficient mismatch
    /// between the field and the generator's field (zero when the field is
    /// conformal).
    pub fn fit_generator(&self) -> (ConformalGenerator<T>, T) {
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        let mut a = FourVector::zero();
        let mut lower1 = zeros4::<T>();
        for mu in 0..4 {
            a[mu] = eta::<T>(mu) * self.k0[mu];
            for nu in 0..4 {
                lower1[mu][nu] = eta::<T>(mu) * self.k1[mu][nu];
            }
        }
        let lambda = quarter * (0..4).map(|mu| self.k1[mu][mu]).sum::<T>();
        let mut omega = zeros4();
        for mu in 0..4 {
            for nu in 0..4 {
                omega[mu][nu] = half * (lower1[mu][nu] - lower1[nu][mu]);
            }
        }
        let mut c = FourVector::zero();
        for mu in 0..4 {
            // box xi_mu = 4 c_mu; d_nu d_nu of the quadratic term is 2 k2[mu][nu][nu]
            let lap: T = (0..4).map(|nu| eta::<T>(nu) * self.k2[mu][nu][nu]).sum();
            c[mu] = half * eta::<T>(mu) * lap;
        }
        let g = ConformalGenerator {
            a,
            omega,
            lambda,
            c,
        };
        let refit = g.to_field();
        let mut defect = T::zero();
        for mu in 0..4 {
            defect = defect.max((refit.k0[mu] - self.k0[mu]).abs());
            for nu in 0..4 {
                defect = defect.max((refit.k1[mu][nu] - self.k1[mu][nu]).abs());
                for rho in 0..4 {
                    let sym_self = self.k2[mu][nu][rho] + self.k2[mu][rho][nu];
                    let sym_fit = refit.k2[mu][nu][rho] + refit.k2[mu][rho][nu];
                    defect = defect.max((sym_self - sym_fit).abs());
                    for tau in 0..4 {
                        defect = defect.max(self.k3[mu][nu][rho][tau].abs());
                    }
                }
            }
        }
        (g, defect)
    }
}

/// `L_xi m^2 + 1/2 m^2 d.xi`; when it vanishes identically the charge
/// `xi.p` is conserved.
pub fn symmetry_defect(g: &ConformalGenerator, bg: &ScalarBackground, x: &FourVector) -> Result<f64> {
    let m2 = bg.m2(x)?;
    let grad = bg.grad_m2(x)?;
    let xi = killing_vector(g, x);
    Ok(xi.contract(&grad) + 0.5 * m2 * divergence(g, x))
}

/// Charge `Q = xi(x).p` with `p_mu` the canonical four-momentum reconstructed
/// from the state (on-shell closure through the form's Hamiltonian).
pub fn conserved_from_generator(g: &ConformalGenerator, s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<f64> {
    let x = s.position();
    let p = s.four_momentum(bg)?;
    Ok(killing_vector(g, &x).contract(&p))
}
