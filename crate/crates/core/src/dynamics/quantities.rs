//! Phase-space functions monitored along orbits, with exact gradients.

use std::fmt;
use std::sync::Arc;

use super::hamiltonian::{bracket_jets, hamiltonian_jet, nonrel_jet};
use super::jet::{Jet, P_OFFSET};
use super::state::{Form, PhaseSpaceState};
use crate::backgrounds::{Family, NullArgument, ScalarBackground};
use crate::conformal::{divergence, killing_vector, ConformalGenerator};
use crate::error::{Error, Result};
use crate::geometry::FourVector;

type JetFn = Arc<dyn Fn(&PhaseSpaceState) -> Result<Jet> + Send + Sync>;

/// A named function on phase space. Evaluation returns a [`Jet`], so the
/// gradient used by brackets and Jacobians comes with the value.
#[derive(Clone)]
pub struct ConservedQuantity {
    pub label: String,
    /// Forms the quantity is defined on; empty means any form.
    pub forms: Vec<Form>,
    f: JetFn,
}

impl fmt::Debug for ConservedQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConservedQuantity")
            .field("label", &self.label)
            .field("forms", &self.forms)
            .finish()
    }
}

/// Step used by [`ConservedQuantity::from_fn`] for the central-difference
/// gradient: `h = 1e-6 * max(1, |v|)` per variable.
pub const FD_REL_STEP: f64 = 1e-6;

impl ConservedQuantity {
    pub fn from_jet(
        label: impl Into<String>,
        forms: &[Form],
        f: impl Fn(&PhaseSpaceState) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            forms: forms.to_vec(),
            f: Arc::new(f),
        }
    }

    /// Black-box quantity; its gradient is an O(h^2) central difference.
    pub fn from_fn(
        label: impl Into<String>,
        forms: &[Form],
        f: impl Fn(&PhaseSpaceState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        Self::from_jet(label, forms, move |s| {
            let v = f(s)?;
            let mut j = Jet::constant(v);
            let n = s.dim();
            for slot in 0..2 * n {
                let (idx, off) = if slot < n { (slot, 0) } else { (slot - n, P_OFFSET) };
                let base = if slot < n { s.q[idx] } else { s.p[idx] };
                let h = FD_REL_STEP * base.abs().max(1.0);
                let mut a = s.clone();
                let mut b = s.clone();
                if slot < n {
                    a.q[idx] += h;
                    b.q[idx] -= h;
                } else {
                    a.p[idx] += h;
                    b.p[idx] -= h;
                }
                j.d[off + idx] = (f(&a)? - f(&b)?) / (2.0 * h);
            }
            Ok(j)
        })
    }

    /// Charge `xi(x).p` of a conformal generator, valid in every form.
    pub fn from_generator(label: impl Into<String>, g: ConformalGenerator, bg: &ScalarBackground) -> Self {
        let bg = bg.clone();
        Self::from_jet(label, &[], move |s| charge_jet(&g, s, &bg))
    }

    pub fn jet(&self, s: &PhaseSpaceState) -> Result<Jet> {
        if !self.forms.is_empty() && !self.forms.contains(&s.form) {
            return Err(Error::FormMismatch(format!(
                "quantity '{}' is not defined for the {} form",
                self.label,
                s.form.name()
            )));
        }
        (self.f)(s)
    }

    pub fn eval(&self, s: &PhaseSpaceState) -> Result<f64> {
        self.jet(s).map(|j| j.v)
    }

    /// `(dQ/dq, dQ/dp)`.
    pub fn gradient(&self, s: &PhaseSpaceState) -> Result<(Vec<f64>, Vec<f64>)> {
        let j = self.jet(s)?;
        let n = s.dim();
        Ok(((0..n).map(|a| j.dq(a)).collect(), (0..n).map(|a| j.dp(a)).collect()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// `xi(x).p` as a jet.
pub fn charge_jet(g: &ConformalGenerator, s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    let xs = s.position_jet();
    let x = FourVector::new(xs[0].v, xs[1].v, xs[2].v, xs[3].v);
    let xi = killing_vector(g, &x);
    let jac = g.jacobian(&x);
    let p = s.four_momentum_jet(bg)?;
    let mut out = Jet::constant(0.0);
    for mu in 0..4 {
        let xi_mu = Jet::compose(xi[mu], &jac[mu], &xs);
        out += xi_mu * p[mu];
    }
    Ok(out)
}

/// Poisson bracket `{f, g}` at `s`, in the orientation of
/// [`crate::dynamics::hamiltonian`]. On the extended phase space this is the
/// starred bracket over `(+, -, perp)`.
pub fn poisson_bracket(f: &ConservedQuantity, g: &ConservedQuantity, s: &PhaseSpaceState) -> Result<f64> {
    if s.form == Form::Covariant {
        return Err(Error::FormMismatch(
            "brackets need canonical momenta; convert the covariant state first".into(),
        ));
    }
    Ok(bracket_jets(&f.jet(s)?, &g.jet(s)?, s.dim()))
}

fn p_jet(s: &PhaseSpaceState, i: usize) -> Jet {
    Jet::variable(s.p[i], P_OFFSET + i)
}

fn q_jet(s: &PhaseSpaceState, i: usize) -> Jet {
    Jet::variable(s.q[i], i)
}

/// The form's Hamiltonian (`H`, `p_+` or `K`).
pub fn hamiltonian_quantity(bg: &ScalarBackground) -> ConservedQuantity {
    let bg = bg.clone();
    ConservedQuantity::from_jet("H", &[Form::Instant, Form::Front, Form::ExtendedFront], move |s| {
        hamiltonian_jet(s, &bg)
    })
}

pub fn nonrel_hamiltonian_quantity(bg: &ScalarBackground) -> ConservedQuantity {
    let bg = bg.clone();
    ConservedQuantity::from_jet("H_nr", &[Form::Instant], move |s| nonrel_jet(s, &bg))
}

/// The ten Poincare charges: `P0..P3` (translations), `Lx, Ly, Lz`
/// (rotations) and `Kx, Ky, Kz` (boosts), each as `xi.p`.
pub fn poincare_set(bg: &ScalarBackground) -> Vec<ConservedQuantity> {
    let mut out = Vec::with_capacity(10);
    for mu in 0..4 {
        out.push(ConservedQuantity::from_generator(
            format!("P{mu}"),
            ConformalGenerator::translation(FourVector::basis(mu)),
            bg,
        ));
    }
    let pairs = [("Lx", 2, 3), ("Ly", 3, 1), ("Lz", 1, 2), ("Kx", 0, 1), ("Ky", 0, 2), ("Kz", 0, 3)];
    for (name, a, b) in pairs {
        let mut w = [[0.0; 4]; 4];
        w[a][b] = 1.0;
        w[b][a] = -1.0;
        out.push(ConservedQuantity::from_generator(name, ConformalGenerator::lorentz(w), bg));
    }
    out
}

/// Instant-form quantities of the linear mass `m0^2 + B z`:
/// `Q1 = p1, Q2 = p2, Q3 = 2 p1 p3 + B x, Q4 = 2 p2 p3 + B y, Q5 = H`.
pub fn spacelike_set(b: f64, bg: &ScalarBackground) -> Vec<ConservedQuantity> {
    let f = [Form::Instant];
    vec![
        ConservedQuantity::from_jet("Q1", &f, |s| Ok(p_jet(s, 0))),
        ConservedQuantity::from_jet("Q2", &f, |s| Ok(p_jet(s, 1))),
        ConservedQuantity::from_jet("Q3", &f, move |s| Ok(p_jet(s, 0) * p_jet(s, 2) * 2.0 + q_jet(s, 0) * b)),
        ConservedQuantity::from_jet("Q4", &f, move |s| Ok(p_jet(s, 1) * p_jet(s, 2) * 2.0 + q_jet(s, 1) * b)),
        hamiltonian_quantity(bg).with_label("Q5"),
    ]
}

pub fn momentum_component(i: usize) -> ConservedQuantity {
    ConservedQuantity::from_jet(format!("p{}", i + 1), &[Form::Instant], move |s| Ok(p_jet(s, i)))
}

/// `L_z = x p2 - y p1` (instant form).
pub fn angular_momentum_z() -> ConservedQuantity {
    ConservedQuantity::from_jet("Lz", &[Form::Instant], |s| {
        Ok(q_jet(s, 0) * p_jet(s, 1) - q_jet(s, 1) * p_jet(s, 0))
    })
}

/// `Q3 Q2 - Q4 Q1` of the spacelike set.
pub fn q3_tilde(b: f64) -> ConservedQuantity {
    ConservedQuantity::from_jet("Q3~", &[Form::Instant], move |s| {
        let (p1, p2, p3) = (p_jet(s, 0), p_jet(s, 1), p_jet(s, 2));
        let q3 = p1 * p3 * 2.0 + q_jet(s, 0) * b;
        let q4 = p2 * p3 * 2.0 + q_jet(s, 1) * b;
        Ok(q3 * p2 - q4 * p1)
    })
}

/// Angular momenta `L_j = eps_jkl x^k p_l` (instant form).
pub fn angular_momenta() -> Vec<ConservedQuantity> {
    (0..3)
        .map(|j| {
            let (k, l) = ((j + 1) % 3, (j + 2) % 3);
            ConservedQuantity::from_jet(format!("L{}", ["x", "y", "z"][j]), &[Form::Instant], move |s| {
                Ok(q_jet(s, k) * p_jet(s, l) - q_jet(s, l) * p_jet(s, k))
            })
        })
        .collect()
}

/// Extended front-form quantities of a plane wave `m^2(x+)`:
/// `Q1 = p1, Q2 = p2, Q3 = p_-, Q4 = 2 x p_- + x+ p1, Q5 = 2 y p_- + x+ p2,
/// Q6 = 4 p_+ p_- - p_perp^2 - m^2, Q7 = 4 p_-^2 x- - p_perp^2 x+ - int_0^{x+} m^2`.
pub fn planewave_set(bg: &ScalarBackground) -> Result<Vec<ConservedQuantity>> {
    let profile = match bg.family() {
        Family::PlaneWave {
            profile,
            argument: NullArgument::Plus,
        } => profile.clone(),
        _ => {
            return Err(Error::InvalidParameter(
                "the extended plane-wave set needs a plane wave in x+".into(),
            ))
        }
    };
    let f = [Form::ExtendedFront];
    // q = (x+, x-, x1, x2), p = (p+, p-, p1, p2)
    let bg6 = bg.clone();
    let prof7 = profile.clone();
    Ok(vec![
        ConservedQuantity::from_jet("Q1", &f, |s| Ok(p_jet(s, 2))),
        ConservedQuantity::from_jet("Q2", &f, |s| Ok(p_jet(s, 3))),
        ConservedQuantity::from_jet("Q3", &f, |s| Ok(p_jet(s, 1))),
        ConservedQuantity::from_jet("Q4", &f, |s| Ok(q_jet(s, 2) * p_jet(s, 1) * 2.0 + q_jet(s, 0) * p_jet(s, 2))),
        ConservedQuantity::from_jet("Q5", &f, |s| Ok(q_jet(s, 3) * p_jet(s, 1) * 2.0 + q_jet(s, 0) * p_jet(s, 3))),
        ConservedQuantity::from_jet("Q6", &f, move |s| {
            let (pp, pm, p1, p2) = (p_jet(s, 0), p_jet(s, 1), p_jet(s, 2), p_jet(s, 3));
            Ok(pp * pm * 4.0 - p1 * p1 - p2 * p2 - s.m2_jet(&bg6)?)
        }),
        ConservedQuantity::from_jet("Q7", &f, move |s| {
            let (pm, p1, p2) = (p_jet(s, 1), p_jet(s, 2), p_jet(s, 3));
            let xp = q_jet(s, 0);
            let int_m2 = xp.chain(prof7.antiderivative(xp.v), prof7.value(xp.v));
            Ok(pm * pm * q_jet(s, 1) * 4.0 - (p1 * p1 + p2 * p2) * xp - int_m2)
        }),
    ])
}

/// Extended front-form quantities of a special-conformal mass:
/// `Q1, Q2` the null-rotation charges `2 p_- x^i + x+ p_i`, `Q3 = xi_c.p`
/// for `c^- = 1`, `Q4 = x p2 - y p1` and `Q5 = K`.
pub fn conformal_set(bg: &ScalarBackground) -> Vec<ConservedQuantity> {
    let f = [Form::ExtendedFront];
    let bgk = bg.clone();
    vec![
        ConservedQuantity::from_jet("Q1", &f, |s| Ok(p_jet(s, 1) * q_jet(s, 2) * 2.0 + q_jet(s, 0) * p_jet(s, 2))),
        ConservedQuantity::from_jet("Q2", &f, |s| Ok(p_jet(s, 1) * q_jet(s, 3) * 2.0 + q_jet(s, 0) * p_jet(s, 3))),
        ConservedQuantity::from_generator("Q3", ConformalGenerator::special_conformal_null(), bg)
            .with_forms(&f),
        ConservedQuantity::from_jet("Q4", &f, |s| Ok(q_jet(s, 2) * p_jet(s, 3) - q_jet(s, 3) * p_jet(s, 2))),
        ConservedQuantity::from_jet("Q5", &f, move |s| hamiltonian_jet(s, &bgk)),
    ]
}

impl ConservedQuantity {
    pub fn with_forms(mut self, forms: &[Form]) -> Self {
        self.forms = forms.to_vec();
        self
    }
}

/// The charges `xi.p` of every generator whose symmetry defect vanishes at
/// all `points` to `tol`. Useful for discovering which symmetries a custom
/// background keeps.
pub fn surviving_charges(
    candidates: &[(String, ConformalGenerator)],
    bg: &ScalarBackground,
    points: &[FourVector],
    tol: f64,
) -> Result<Vec<ConservedQuantity>> {
    let mut out = Vec::new();
    for (name, g) in candidates {
        let mut ok = true;
        for x in points {
            let m2 = bg.m2(x)?;
            let grad = bg.grad_m2(x)?;
            let d = killing_vector(g, x).contract(&grad) + 0.5 * m2 * divergence(g, x);
            if d.abs() > tol {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(ConservedQuantity::from_generator(name.clone(), *g, bg));
        }
    }
    Ok(out)
}
