//! Turns settings into core objects: background, initial state, monitored
//! quantities and integrator options.

use std::sync::Arc;

use sfdyn::analytic::GaussianConformalUnits;
use sfdyn::backgrounds::{
    ConstantProfile, Family, GaussianProfile, LinearProfile, NullArgument, Profile, SinSquaredProfile,
};
use sfdyn::dynamics::quantities::{
    angular_momenta, conformal_set, hamiltonian_quantity, momentum_component, nonrel_hamiltonian_quantity,
    planewave_set, poincare_set, q3_tilde, spacelike_set,
};
use sfdyn::dynamics::{EvolveOptions, StateEvent};
use sfdyn::ode::{EventAction, OdeOptions};
use sfdyn::{ConformalGenerator, ConservedQuantity, Form, FourVector, PhaseSpaceState, ScalarBackground};

use crate::failure::Failure;
use crate::settings::Settings;

/// Dynamical form plus the choice of flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormSpec {
    pub form: Form,
    pub nonrel: bool,
}

pub fn parse_form(name: &str) -> Result<FormSpec, Failure> {
    let form = match name {
        "instant" | "nonrel" => Form::Instant,
        "front" => Form::Front,
        "extended-front" => Form::ExtendedFront,
        "covariant" => Form::Covariant,
        _ => return Err(Failure::Config(format!("unknown form {name:?}"))),
    };
    Ok(FormSpec {
        form,
        nonrel: name == "nonrel",
    })
}

pub fn profile(s: &Settings) -> Result<Arc<dyn Profile>, Failure> {
    let p: Arc<dyn Profile> = match s.str_or("background.profile", "gaussian") {
        "constant" => Arc::new(ConstantProfile(s.f64_or("profile.value", 1.0)?)),
        "linear" => Arc::new(LinearProfile {
            offset: s.f64_or("profile.offset", 0.0)?,
            slope: s.f64_or("profile.slope", 1.0)?,
        }),
        "gaussian" => {
            let k = s.f64_or("profile.k", 1.0)?;
            if !(k > 0.0) {
                return Err(Failure::Config("profile.k must be positive".into()));
            }
            Arc::new(GaussianProfile {
                amplitude: s.f64_or("profile.amplitude", 1.0)?,
                k,
                center: s.f64_or("profile.center", 0.0)?,
            })
        }
        "sin2" => Arc::new(SinSquaredProfile {
            scale: s.f64_or("profile.scale", 1.0)?,
        }),
        other => return Err(Failure::Config(format!("unknown profile {other:?}"))),
    };
    Ok(p)
}

pub fn background(s: &Settings) -> Result<ScalarBackground, Failure> {
    let m0sq = || s.f64_or("background.m0sq", 1.0);
    let bg = match s.require("background.family")? {
        "constant" => ScalarBackground::constant(m0sq()?),
        "linear-z" => ScalarBackground::linear_z(
            m0sq()?,
            s.f64_or("background.b", 1.0)?,
            s.bool_or("background.switched", false)?,
        ),
        "timelike" => ScalarBackground::timelike(m0sq()?, profile(s)?, s.bool_or("background.switched", false)?),
        "plane-wave" => {
            let arg = match s.str_or("background.argument", "plus") {
                "plus" => NullArgument::Plus,
                "minus" => NullArgument::Minus,
                other => return Err(Failure::Config(format!("unknown plane-wave argument {other:?}"))),
            };
            Ok(ScalarBackground::plane_wave(profile(s)?, arg))
        }
        "special-conformal" => {
            if s.bool_or("background.switched", false)? {
                ScalarBackground::special_conformal_switched(profile(s)?, m0sq()?, s.f64_or("background.l", 1.0)?)
            } else {
                Ok(ScalarBackground::special_conformal(profile(s)?))
            }
        }
        "conformal-gaussian" => ScalarBackground::conformal_gaussian_switched(
            m0sq()?,
            s.f64_or("background.l", 1.0)?,
            s.f64_or("background.k", 1.0)?,
        ),
        "dilation" => ScalarBackground::dilation(s.f64_or("background.c2", 1.0)?),
        other => return Err(Failure::Config(format!("unknown background family {other:?}"))),
    };
    bg.map_err(Failure::setup)
}

/// Units of the `conformal-gaussian` family.
pub fn gaussian_units(s: &Settings) -> Result<GaussianConformalUnits, Failure> {
    if s.str("background.family") != Some("conformal-gaussian") {
        return Err(Failure::Config("initial.kappa needs background.family = conformal-gaussian".into()));
    }
    GaussianConformalUnits::new(
        s.f64_or("background.m0sq", 1.0)?.sqrt(),
        s.f64_or("background.l", 1.0)?,
        s.f64_or("background.k", 1.0)?,
    )
    .map_err(Failure::setup)
}

fn arr3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

/// Initial data as written: `initial.form` is `instant` (`q = x`, lower
/// `p_j`) or `front` (`q = (x-, x1, x2)`, `p = (p_-, p1, p2)`, time `x+`).
/// `initial.kappa` replaces both with the Gaussian-conformal starting line.
pub fn raw_initial(s: &Settings) -> Result<PhaseSpaceState, Failure> {
    if s.has("initial.kappa") {
        let units = gaussian_units(s)?;
        let start = s.f64_or("initial.start", units.l)?;
        return units.initial_state(s.f64("initial.kappa")?, start).map_err(Failure::setup);
    }
    let time = s.f64_or("initial.time", 0.0)?;
    let q = arr3(&s.vec("initial.q", 3)?);
    let p = arr3(&s.vec("initial.p", 3)?);
    match s.str_or("initial.form", "instant") {
        "instant" => Ok(PhaseSpaceState::instant(time, q, p)),
        "front" => Ok(PhaseSpaceState::front(time, q, p)),
        other => Err(Failure::Config(format!("initial.form must be instant or front, got {other:?}"))),
    }
}

/// Initial state converted to the dynamical form and validated.
pub fn initial_state(s: &Settings, bg: &ScalarBackground, form: Form) -> Result<PhaseSpaceState, Failure> {
    let raw = raw_initial(s)?;
    raw.validate(bg).map_err(Failure::setup)?;
    let st = raw.convert(form, bg).map_err(Failure::setup)?;
    st.validate(bg).map_err(Failure::setup)?;
    Ok(st)
}

fn linear_b(bg: &ScalarBackground) -> Result<f64, Failure> {
    match bg.family() {
        Family::LinearZ { b, .. } => Ok(*b),
        _ => Err(Failure::Config("this quantity needs a linear-z background".into())),
    }
}

fn generator(name: &str) -> Option<ConformalGenerator> {
    Some(match name {
        "T1" => ConformalGenerator::null_rotation_t(1),
        "T2" => ConformalGenerator::null_rotation_t(2),
        "U1" => ConformalGenerator::null_rotation_u(1),
        "U2" => ConformalGenerator::null_rotation_u(2),
        "D" => ConformalGenerator::dilation(1.0),
        "C" => ConformalGenerator::special_conformal_null(),
        "P+" => ConformalGenerator::translation_plus(),
        "P-" => ConformalGenerator::translation_minus(),
        _ => return None,
    })
}

/// Resolves `quantities.list`. Set names (`spacelike`, `planewave`,
/// `conformal`, `poincare`, `angular`) expand to their members; single names
/// are `H`, `H_nr`, `p1..p3`, `Q3~`, the Poincare labels `P0..P3, Lx..Kz` and
/// the generators `T1, T2, U1, U2, D, C, P+, P-`.
pub fn quantities(s: &Settings, bg: &ScalarBackground, spec: FormSpec) -> Result<Vec<ConservedQuantity>, Failure> {
    let default = match (spec.form, spec.nonrel) {
        (Form::Covariant, _) => "",
        (_, true) => "H_nr",
        _ => "H",
    };
    let list = s.str_or("quantities.list", default);
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match name {
            "spacelike" => out.extend(spacelike_set(linear_b(bg)?, bg)),
            "planewave" => out.extend(planewave_set(bg).map_err(Failure::setup)?),
            "conformal" => out.extend(conformal_set(bg)),
            "poincare" => out.extend(poincare_set(bg)),
            "angular" => out.extend(angular_momenta()),
            "H" => out.push(hamiltonian_quantity(bg)),
            "H_nr" => out.push(nonrel_hamiltonian_quantity(bg)),
            "p1" => out.push(momentum_component(0)),
            "p2" => out.push(momentum_component(1)),
            "p3" => out.push(momentum_component(2)),
            "Q3~" => out.push(q3_tilde(linear_b(bg)?)),
            _ => {
                if let Some(g) = generator(name) {
                    out.push(ConservedQuantity::from_generator(name, g, bg));
                } else if let Some(q) = poincare_set(bg).into_iter().find(|q| q.label == name) {
                    out.push(q);
                } else {
                    return Err(Failure::Config(format!("unknown quantity {name:?}")));
                }
            }
        }
    }
    for q in &out {
        if !q.forms.is_empty() && !q.forms.contains(&spec.form) {
            return Err(Failure::Config(format!(
                "quantity {} is not defined in the {} form",
                q.label,
                spec.form.name()
            )));
        }
    }
    Ok(out)
}

pub fn ode_options(s: &Settings) -> Result<OdeOptions<f64>, Failure> {
    let mut o = OdeOptions::<f64>::default();
    o.abs_tol = s.f64_or("tolerance.abs", 1e-12)?;
    o.rel_tol = s.f64_or("tolerance.rel", 1e-12)?;
    if !(o.abs_tol > 0.0 && o.rel_tol > 0.0) {
        return Err(Failure::Config("tolerances must be positive".into()));
    }
    o.max_steps = s.usize_or("dynamics.max_steps", o.max_steps)?;
    Ok(o)
}

/// Options for `evolve` from `t0` to `t_end`.
pub fn evolve_options(s: &Settings, spec: FormSpec, t0: f64, t_end: f64) -> Result<EvolveOptions, Failure> {
    let mut events = Vec::new();
    if let Some(axis) = s.opt_usize("dynamics.stop_axis")? {
        if axis > 3 {
            return Err(Failure::Config("dynamics.stop_axis must be 0..3".into()));
        }
        let v = s.f64_or("dynamics.stop_value", 0.0)?;
        events.push(StateEvent::coordinate("stop", EventAction::Terminate, axis, v));
    }
    if let Some(i) = s.opt_usize("dynamics.stop_q")? {
        if i >= spec.form.dof() {
            return Err(Failure::Config(format!("dynamics.stop_q must be below {}", spec.form.dof())));
        }
        let v = s.f64_or("dynamics.stop_q_value", 0.0)?;
        events.push(StateEvent::new("stop", EventAction::Terminate, move |st| st.q[i] - v));
    }
    let n = s.usize_or("dynamics.samples", 0)?;
    let t_eval = match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|i| t0 + (t_end - t0) * i as f64 / (n - 1) as f64).collect(),
    };
    Ok(EvolveOptions {
        ode: ode_options(s)?,
        events,
        switch_events: s.bool_or("dynamics.switch_events", true)?,
        t_eval,
        drift_tol: s.f64_or("tolerance.drift", 1e-8)?,
    })
}

/// Lower-index four-vector from four comma-separated numbers.
pub fn four_vector(s: &Settings, key: &str) -> Result<FourVector, Failure> {
    let v = s.vec(key, 4)?;
    Ok(FourVector::new(v[0], v[1], v[2], v[3]))
}
