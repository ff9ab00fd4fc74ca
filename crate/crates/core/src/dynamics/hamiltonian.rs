//! Hamiltonians of the three canonical forms and the Poisson bracket.
//!
//! The bracket is taken with the orientation
//! `{A, B} = dA/dq dB/dp - dA/dp dB/dq`, opposite to the textbook one, and
//! the flow is `dQ/dt = dQ/dt|explicit - {Q, H}`, i.e. `q' = -dH/dp`,
//! `p' = +dH/dq`. With lower-index momenta this gives the familiar
//! `dx^j/dt = p^j / p^0`.

use super::jet::{Jet, P_OFFSET};
use super::state::{Form, PhaseSpaceState};
use crate::backgrounds::ScalarBackground;
use crate::error::{Error, Result};

fn expect_form(s: &PhaseSpaceState, forms: &[Form], what: &str) -> Result<()> {
    if forms.contains(&s.form) {
        Ok(())
    } else {
        Err(Error::FormMismatch(format!("{what} is not defined for the {} form", s.form.name())))
    }
}

/// `H = sqrt(p^2 + m^2)` as a jet.
pub(crate) fn instant_jet(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    expect_form(s, &[Form::Instant], "the instant-form Hamiltonian")?;
    let p = s.p_jets();
    let m2 = s.m2_jet(bg)?;
    Ok((p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m2).sqrt())
}

/// `p_+ = (p_perp^2 + m^2) / (4 p_-)` as a jet, for front and extended states.
pub(crate) fn front_jet(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    expect_form(s, &[Form::Front, Form::ExtendedFront], "the front-form Hamiltonian")?;
    let p = s.p_jets();
    let (pm, p1, p2) = match s.form {
        Form::Front => (p[0], p[1], p[2]),
        _ => (p[1], p[2], p[3]),
    };
    if pm.v == 0.0 || !pm.v.is_finite() {
        return Err(Error::ZeroLongitudinalMomentum(pm.v));
    }
    let m2 = s.m2_jet(bg)?;
    Ok((p1 * p1 + p2 * p2 + m2) / (pm * 4.0))
}

/// `K = H - p_+` on the extended phase space.
pub(crate) fn extended_jet(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    expect_form(s, &[Form::ExtendedFront], "the extended Hamiltonian")?;
    let h = front_jet(s, bg)?;
    Ok(h - Jet::variable(s.p[0], P_OFFSET))
}

/// `p^2/(2m) + m`.
pub(crate) fn nonrel_jet(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    expect_form(s, &[Form::Instant], "the non-relativistic Hamiltonian")?;
    let p = s.p_jets();
    let m = s.m2_jet(bg)?.sqrt();
    if m.v == 0.0 {
        return Err(Error::Domain("non-relativistic Hamiltonian needs m > 0".into()));
    }
    Ok((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (m * 2.0) + m)
}

/// Generator of the flow for the state's form: `H` (instant), `p_+` (front)
/// or `K` (extended).
pub fn hamiltonian_jet(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<Jet> {
    match s.form {
        Form::Instant => instant_jet(s, bg),
        Form::Front => front_jet(s, bg),
        Form::ExtendedFront => extended_jet(s, bg),
        Form::Covariant => Err(Error::FormMismatch(
            "the covariant form is not evolved by a Hamiltonian".into(),
        )),
    }
}

pub fn hamiltonian_instant(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<f64> {
    instant_jet(s, bg).map(|j| j.v)
}

pub fn hamiltonian_front(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<f64> {
    front_jet(s, bg).map(|j| j.v)
}

pub fn hamiltonian_extended(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<f64> {
    extended_jet(s, bg).map(|j| j.v)
}

pub fn hamiltonian_nonrel(s: &PhaseSpaceState, bg: &ScalarBackground) -> Result<f64> {
    nonrel_jet(s, bg).map(|j| j.v)
}

/// `{A, B}` over `n` canonical pairs.
pub fn bracket_jets(a: &Jet, b: &Jet, n: usize) -> f64 {
    (0..n).map(|i| a.dq(i) * b.dp(i) - a.dp(i) * b.dq(i)).sum()
}

/// Canonical vector field `(q', p') = (-dH/dp, dH/dq)`.
pub(crate) fn hamilton_rhs(h: &Jet, n: usize, out: &mut [f64]) {
    for a in 0..n {
        out[a] = -h.dp(a);
        out[n + a] = h.dq(a);
    }
}
