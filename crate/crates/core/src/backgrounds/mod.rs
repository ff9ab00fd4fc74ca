//! Dynamical-mass backgrounds `m^2(x)` with analytic four-gradients.
//!
//! Gradients are lower-index, `grad[mu] = d m^2 / d x^mu`. Evaluating a
//! background where `m^2 < 0` is a hard [`Error::Reality`]; evaluating on a
//! singular surface (`x+ = 0` for the special-conformal family, the light
//! cone for the dilation family) is [`Error::Singular`].
//!
//! Switched families are continuous but have a kink in `m^2` across their
//! switch surface. [`ScalarBackground::switch_surfaces`] exposes the signed
//! distance to each surface so integrators can stop and restart there.

pub mod profile;

use std::fmt;
use std::sync::Arc;

pub use profile::{
    five_point_derivative, ConstantProfile, FnProfile, GaussianProfile, LinearProfile, Profile,
    SinSquaredProfile, TabulatedProfile,
};

use crate::error::{Error, Result};
use crate::geometry::FourVector;

/// Light-front argument of a plane-wave profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullArgument {
    /// `m^2 = profile(x+)`, time-dependent in the front form.
    Plus,
    /// `m^2 = profile(x-)`, autonomous in the front form.
    Minus,
}

/// Where the switched special-conformal mass turns on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalSwitch {
    pub m0sq: f64,
    /// Switch-on time `L` in `x+`.
    pub l: f64,
}

/// A surface across which a switched background changes branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchSurface {
    /// `z = 0`
    Z,
    /// `t = 0`
    T,
    /// `x+ = L`
    XPlus(f64),
}

impl SwitchSurface {
    /// Signed distance; the field branch is on the non-negative side.
    pub fn signed_distance(&self, x: &FourVector) -> f64 {
        match *self {
            SwitchSurface::Z => x.z(),
            SwitchSurface::T => x.t(),
            SwitchSurface::XPlus(l) => x.t() + x.z() - l,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SwitchSurface::Z => "z=0",
            SwitchSurface::T => "t=0",
            SwitchSurface::XPlus(_) => "x+=L",
        }
    }
}

type MassFn = Arc<dyn Fn(&FourVector) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&FourVector) -> FourVector + Send + Sync>;

#[derive(Clone)]
pub enum Family {
    Constant {
        m0sq: f64,
    },
    /// `m0^2 + B z`, optionally only for `z >= 0`.
    LinearZ {
        m0sq: f64,
        b: f64,
        switched: bool,
    },
    /// `m0^2 + E(t)`, optionally only for `t >= 0`.
    Timelike {
        m0sq: f64,
        e: Arc<dyn Profile>,
        switched: bool,
    },
    PlaneWave {
        profile: Arc<dyn Profile>,
        argument: NullArgument,
    },
    /// `f(u)/x+^2` with `u = x- - x^perp x^perp / x+`; with a switch the mass
    /// is `m0^2` for `x+ < L`.
    SpecialConformal {
        f: Arc<dyn Profile>,
        switch: Option<ConformalSwitch>,
    },
    /// `c^2 / x.x`
    Dilation {
        c2: f64,
    },
    Custom {
        m2: MassFn,
        grad: Option<GradFn>,
        fd_step: f64,
    },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant { m0sq } => write!(f, "Constant {{ m0sq: {m0sq} }}"),
            Family::LinearZ { m0sq, b, switched } => {
                write!(f, "LinearZ {{ m0sq: {m0sq}, b: {b}, switched: {switched} }}")
            }
            Family::Timelike { m0sq, e, switched } => {
                write!(f, "Timelike {{ m0sq: {m0sq}, e: {e:?}, switched: {switched} }}")
            }
            Family::PlaneWave { profile, argument } => {
                write!(f, "PlaneWave {{ profile: {profile:?}, argument: {argument:?} }}")
            }
            Family::SpecialConformal { f: prof, switch } => {
                write!(f, "SpecialConformal {{ f: {prof:?}, switch: {switch:?} }}")
            }
            Family::Dilation { c2 } => write!(f, "Dilation {{ c2: {c2} }}"),
            Family::Custom { fd_step, grad, .. } => {
                write!(f, "Custom {{ analytic_grad: {}, fd_step: {fd_step} }}", grad.is_some())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalarBackground {
    family: Family,
    label: String,
}

impl ScalarBackground {
    pub fn constant(m0sq: f64) -> Result<Self> {
        positive("m0^2", m0sq)?;
        Ok(Self::from_family(Family::Constant { m0sq }, format!("constant(m0^2={m0sq})")))
    }

    /// `m^2 = m0^2 + B z`; with `switched` the field is only present for `z >= 0`.
    pub fn linear_z(m0sq: f64, b: f64, switched: bool) -> Result<Self> {
        positive("m0^2", m0sq)?;
        Ok(Self::from_family(
            Family::LinearZ { m0sq, b, switched },
            format!("linear_z(m0^2={m0sq}, B={b}, switched={switched})"),
        ))
    }

    /// `m^2 = m0^2 + E(t)`; with `switched` the shift is only present for `t >= 0`.
    pub fn timelike(m0sq: f64, e: Arc<dyn Profile>, switched: bool) -> Result<Self> {
        positive("m0^2", m0sq)?;
        Ok(Self::from_family(
            Family::Timelike { m0sq, e, switched },
            format!("timelike(m0^2={m0sq}, switched={switched})"),
        ))
    }

    pub fn plane_wave(profile: Arc<dyn Profile>, argument: NullArgument) -> Self {
        let label = format!("plane_wave({argument:?})");
        Self::from_family(Family::PlaneWave { profile, argument }, label)
    }

    /// `m^2 = f(u)/x+^2`, singular on `x+ = 0`.
    pub fn special_conformal(f: Arc<dyn Profile>) -> Self {
        Self::from_family(Family::SpecialConformal { f, switch: None }, "special_conformal".into())
    }

    /// `m^2 = m0^2` for `x+ < L`, `f(u)/x+^2` for `x+ >= L`.
    pub fn special_conformal_switched(f: Arc<dyn Profile>, m0sq: f64, l: f64) -> Result<Self> {
        positive("m0^2", m0sq)?;
        positive("L", l)?;
        Ok(Self::from_family(
            Family::SpecialConformal {
                f,
                switch: Some(ConformalSwitch { m0sq, l }),
            },
            format!("special_conformal_switched(m0^2={m0sq}, L={l})"),
        ))
    }

    /// The switched Gaussian mass `m0^2 L^2/x+^2 exp(-k^2 u^2)` for `x+ > L`.
    pub fn conformal_gaussian_switched(m0sq: f64, l: f64, k: f64) -> Result<Self> {
        positive("k", k)?;
        let f = Arc::new(GaussianProfile {
            amplitude: m0sq * l * l,
            k,
            center: 0.0,
        });
        let mut bg = Self::special_conformal_switched(f, m0sq, l)?;
        bg.label = format!("conformal_gaussian(m0^2={m0sq}, L={l}, k={k})");
        Ok(bg)
    }

    /// `m^2 = c^2 / x.x`, defined inside the light cone.
    pub fn dilation(c2: f64) -> Result<Self> {
        positive("c^2", c2)?;
        Ok(Self::from_family(Family::Dilation { c2 }, format!("dilation(c^2={c2})")))
    }

    /// User-defined mass with an analytic gradient.
    pub fn custom(
        m2: impl Fn(&FourVector) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&FourVector) -> FourVector + Send + Sync + 'static,
    ) -> Self {
        Self::from_family(
            Family::Custom {
                m2: Arc::new(m2),
                grad: Some(Arc::new(grad)),
                fd_step: 0.0,
            },
            "custom".into(),
        )
    }

    /// User-defined mass whose gradient is taken by five-point O(h^4)
    /// differences with `h = 1e-5 * scale`.
    pub fn custom_fd(m2: impl Fn(&FourVector) -> f64 + Send + Sync + 'static, scale: f64) -> Self {
        Self::from_family(
            Family::Custom {
                m2: Arc::new(m2),
                grad: None,
                fd_step: 1e-5 * scale,
            },
            "custom_fd".into(),
        )
    }

    pub fn from_family(family: Family, label: String) -> Self {
        Self { family, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Rest mass squared far from the field, when the family has one.
    pub fn m0sq(&self) -> Option<f64> {
        match &self.family {
            Family::Constant { m0sq } | Family::LinearZ { m0sq, .. } | Family::Timelike { m0sq, .. } => {
                Some(*m0sq)
            }
            Family::SpecialConformal { switch: Some(s), .. } => Some(s.m0sq),
            _ => None,
        }
    }

    pub fn switch_surfaces(&self) -> Vec<SwitchSurface> {
        match &self.family {
            Family::LinearZ { switched: true, .. } => vec![SwitchSurface::Z],
            Family::Timelike { switched: true, .. } => vec![SwitchSurface::T],
            Family::SpecialConformal { switch: Some(s), .. } => vec![SwitchSurface::XPlus(s.l)],
            _ => Vec::new(),
        }
    }

    /// True where `m^2` is smooth, finite and non-negative.
    pub fn in_domain(&self, x: &FourVector) -> bool {
        if self.switch_surfaces().iter().any(|s| s.signed_distance(x) == 0.0) {
            return false;
        }
        matches!(self.m2(x), Ok(v) if v.is_finite())
    }

    /// `m^2(x)`.
    pub fn m2(&self, x: &FourVector) -> Result<f64> {
        let v = self.m2_raw(x)?;
        if v < 0.0 {
            return Err(Error::Reality { m2: v, at: *x });
        }
        if !v.is_finite() {
            return Err(Error::Singular {
                surface: "non-finite mass",
                at: *x,
            });
        }
        Ok(v)
    }

    /// `m(x) = sqrt(m^2)`.
    pub fn mass(&self, x: &FourVector) -> Result<f64> {
        self.m2(x).map(f64::sqrt)
    }

    fn m2_raw(&self, x: &FourVector) -> Result<f64> {
        Ok(match &self.family {
            Family::Constant { m0sq } => *m0sq,
            Family::LinearZ { m0sq, b, switched } => {
                if *switched && x.z() < 0.0 {
                    *m0sq
                } else {
                    m0sq + b * x.z()
                }
            }
            Family::Timelike { m0sq, e, switched } => {
                if *switched && x.t() < 0.0 {
                    *m0sq
                } else {
                    m0sq + e.value(x.t())
                }
            }
            Family::PlaneWave { profile, argument } => {
                let lf = x.to_lightfront();
                match argument {
                    NullArgument::Plus => profile.value(lf.xplus),
                    NullArgument::Minus => profile.value(lf.xminus),
                }
            }
            Family::SpecialConformal { f, switch } => {
                let lf = x.to_lightfront();
                if let Some(s) = switch {
                    if lf.xplus < s.l {
                        return Ok(s.m0sq);
                    }
                }
                if lf.xplus == 0.0 {
                    return Err(Error::Singular {
                        surface: "x+ = 0",
                        at: *x,
                    });
                }
                let u = lf.xminus - lf.transverse_sq() / lf.xplus;
                f.value(u) / (lf.xplus * lf.xplus)
            }
            Family::Dilation { c2 } => {
                let s = x.square();
                if s == 0.0 {
                    return Err(Error::Singular {
                        surface: "light cone x.x = 0",
                        at: *x,
                    });
                }
                c2 / s
            }
            Family::Custom { m2, .. } => m2(x),
        })
    }

    /// Lower-index gradient `d_mu m^2`.
    pub fn grad_m2(&self, x: &FourVector) -> Result<FourVector> {
        // validates domain and reality
        self.m2(x)?;
        Ok(match &self.family {
            Family::Constant { .. } => FourVector::zero(),
            Family::LinearZ { b, switched, .. } => {
                if *switched && x.z() < 0.0 {
                    FourVector::zero()
                } else {
                    FourVector::new(0.0, 0.0, 0.0, *b)
                }
            }
            Family::Timelike { e, switched, .. } => {
                if *switched && x.t() < 0.0 {
                    FourVector::zero()
                } else {
                    FourVector::new(e.derivative(x.t()), 0.0, 0.0, 0.0)
                }
            }
            Family::PlaneWave { profile, argument } => {
                let lf = x.to_lightfront();
                match argument {
                    // x+ = t + z
                    NullArgument::Plus => {
                        let d = profile.derivative(lf.xplus);
                        FourVector::new(d, 0.0, 0.0, d)
                    }
                    // x- = t - z
                    NullArgument::Minus => {
                        let d = profile.derivative(lf.xminus);
                        FourVector::new(d, 0.0, 0.0, -d)
                    }
                }
            }
            Family::SpecialConformal { f, switch } => {
                let lf = x.to_lightfront();
                if let Some(s) = switch {
                    if lf.xplus < s.l {
                        return Ok(FourVector::zero());
                    }
                }
                let xp = lf.xplus;
                let r2 = lf.transverse_sq();
                let u = lf.xminus - r2 / xp;
                let (fv, fd) = (f.value(u), f.derivative(u));
                let xp2 = xp * xp;
                let d_plus = -2.0 * fv / (xp2 * xp) + fd * r2 / (xp2 * xp2);
                let d_minus = fd / xp2;
                let d1 = -2.0 * fd * lf.x1 / (xp2 * xp);
                let d2 = -2.0 * fd * lf.x2 / (xp2 * xp);
                // d/dt = d/dx+ + d/dx-, d/dz = d/dx+ - d/dx-
                FourVector::new(d_plus + d_minus, d1, d2, d_plus - d_minus)
            }
            Family::Dilation { c2 } => {
                let s = x.square();
                let xl = x.flip_index();
                xl.scale(-2.0 * c2 / (s * s))
            }
            Family::Custom { m2, grad, fd_step } => match grad {
                Some(g) => g(x),
                None => {
                    let mut out = FourVector::zero();
                    for mu in 0..4 {
                        out[mu] = five_point_derivative(
                            |s| {
                                let mut y = *x;
                                y[mu] = s;
                                m2(&y)
                            },
                            x[mu],
                            *fd_step,
                        );
                    }
                    out
                }
            },
        })
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}
