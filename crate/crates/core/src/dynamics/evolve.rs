use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hamiltonian::{hamilton_rhs, hamiltonian_jet, nonrel_jet};
use super::quantities::ConservedQuantity;
use super::state::{Form, PhaseSpaceState};
use crate::backgrounds::ScalarBackground;
use crate::error::{Error, Result};
use crate::geometry::FourVector;
use crate::ode::{self, Event, EventAction, OdeOptions, OdeStats};

type EventFn = Arc<dyn Fn(&PhaseSpaceState) -> f64 + Send + Sync>;

/// Zero crossing of a function of the state.
#[derive(Clone)]
pub struct StateEvent {
    pub name: String,
    pub action: EventAction,
    g: EventFn,
}

impl std::fmt::Debug for StateEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StateEvent({}, {:?})", self.name, self.action)
    }
}

impl StateEvent {
    pub fn new(
        name: impl Into<String>,
        action: EventAction,
        g: impl Fn(&PhaseSpaceState) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            action,
            g: Arc::new(g),
        }
    }

    /// Fires when the Cartesian coordinate `x^mu` crosses `value`.
    pub fn coordinate(name: impl Into<String>, action: EventAction, mu: usize, value: f64) -> Self {
        Self::new(name, action, move |s| s.position()[mu] - value)
    }

    pub fn eval(&self, s: &PhaseSpaceState) -> f64 {
        (self.g)(s)
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub ode: OdeOptions<f64>,
    /// Extra events; they take precedence over switch surfaces at ties.
    pub events: Vec<StateEvent>,
    /// Stop and restart on the background's switch surfaces.
    pub switch_events: bool,
    /// When non-empty, sample only at these times.
    pub t_eval: Vec<f64>,
    /// Relative drift above which a quantity is flagged.
    pub drift_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            events: Vec::new(),
            switch_events: true,
            t_eval: Vec::new(),
            drift_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: PhaseSpaceState,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn time(&self) -> f64 {
        self.state.time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub label: String,
    pub initial: f64,
    /// `max_t |Q(t) - Q(0)| / max(1, |Q(0)|)`
    pub max_drift: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub tolerance: f64,
    pub entries: Vec<DriftEntry>,
}

impl DriftReport {
    pub fn from_values(labels: &[String], rows: &[Vec<f64>], tolerance: f64) -> Self {
        let entries = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let initial = rows.first().map_or(f64::NAN, |r| r[i]);
                let scale = initial.abs().max(1.0);
                let max_drift = rows
                    .iter()
                    .map(|r| (r[i] - initial).abs() / scale)
                    .fold(0.0, f64::max);
                DriftEntry {
                    label: label.clone(),
                    initial,
                    max_drift,
                    flagged: !(max_drift <= tolerance),
                }
            })
            .collect();
        Self { tolerance, entries }
    }

    pub fn get(&self, label: &str) -> Option<&DriftEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn all_within(&self) -> bool {
        self.entries.iter().all(|e| !e.flagged)
    }

    pub fn max_drift(&self) -> f64 {
        self.entries.iter().map(|e| e.max_drift).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub form: Form,
    pub background: String,
    pub labels: Vec<String>,
    pub samples: Vec<Sample>,
    pub drift: DriftReport,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time()).collect()
    }

    pub fn states(&self) -> impl Iterator<Item = &PhaseSpaceState> {
        self.samples.iter().map(|s| &s.state)
    }

    pub fn last(&self) -> &PhaseSpaceState {
        &self.samples.last().expect("trajectories hold at least one sample").state
    }

    pub fn values_of(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.samples.iter().map(|s| s.values[i]).collect())
    }

    pub fn positions(&self) -> Vec<FourVector> {
        self.samples.iter().map(|s| s.state.position()).collect()
    }

    /// Recomputes the drift report from the stored samples.
    pub fn recompute_drift(&self, tolerance: f64) -> DriftReport {
        let rows: Vec<Vec<f64>> = self.samples.iter().map(|s| s.values.clone()).collect();
        DriftReport::from_values(&self.labels, &rows, tolerance)
    }
}

/// Evaluates `qs` on every sample of `traj` and reports their drift.
pub fn monitor(traj: &Trajectory, qs: &[ConservedQuantity], tolerance: f64) -> Result<DriftReport> {
    let labels: Vec<String> = qs.iter().map(|q| q.label.clone()).collect();
    let rows = traj
        .states()
        .map(|s| qs.iter().map(|q| q.eval(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(DriftReport::from_values(&labels, &rows, tolerance))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Flow {
    Canonical,
    NonRelativistic,
    Covariant,
}

/// Integrates the canonical equations of the state's form up to time
/// `t_end` (`t`, `x+` or `tau`), sampling `qs` along the way.
pub fn evolve(
    s0: &PhaseSpaceState,
    bg: &ScalarBackground,
    t_end: f64,
    opts: &EvolveOptions,
    qs: &[ConservedQuantity],
) -> Result<Trajectory> {
    let flow = if s0.form == Form::Covariant {
        Flow::Covariant
    } else {
        Flow::Canonical
    };
    run(s0, bg, t_end, opts, qs, flow)
}

/// Instant-form evolution generated by `p^2/(2m) + m`.
pub fn evolve_nonrel(
    s0: &PhaseSpaceState,
    bg: &ScalarBackground,
    t_end: f64,
    opts: &EvolveOptions,
    qs: &[ConservedQuantity],
) -> Result<Trajectory> {
    if s0.form != Form::Instant {
        return Err(Error::FormMismatch("non-relativistic flow is instant-form only".into()));
    }
    run(s0, bg, t_end, opts, qs, Flow::NonRelativistic)
}

/// Proper-time evolution of `d/dtau (m u_mu) = d_mu m` from `x0` with unit
/// velocity `u0`.
pub fn evolve_covariant(
    x0: FourVector,
    u0: FourVector,
    bg: &ScalarBackground,
    tau_end: f64,
    opts: &EvolveOptions,
    qs: &[ConservedQuantity],
) -> Result<Trajectory> {
    let s0 = PhaseSpaceState::covariant(0.0, x0, u0);
    run(&s0, bg, tau_end, opts, qs, Flow::Covariant)
}

/// `du^mu/dtau = (d^mu m - u^mu (u.dm)/(u.u)) / m`; on the unit shell this is
/// the projected force law, and it keeps `u.a = 0` exactly.
pub fn covariant_acceleration(x: &FourVector, u: &FourVector, bg: &ScalarBackground) -> Result<FourVector> {
    let m2 = bg.m2(x)?;
    if m2 <= 0.0 {
        return Err(Error::Domain(format!("mass vanished at {x:?}; the force law divides by m")));
    }
    let m = m2.sqrt();
    let dm = bg.grad_m2(x)?.scale(0.5 / m);
    let u_dm = u.contract(&dm);
    let uu = u.square();
    let up = dm.flip_index();
    Ok(FourVector::new(
        (up[0] - u[0] * u_dm / uu) / m,
        (up[1] - u[1] * u_dm / uu) / m,
        (up[2] - u[2] * u_dm / uu) / m,
        (up[3] - u[3] * u_dm / uu) / m,
    ))
}

fn run(
    s0: &PhaseSpaceState,
    bg: &ScalarBackground,
    t_end: f64,
    opts: &EvolveOptions,
    qs: &[ConservedQuantity],
    flow: Flow,
) -> Result<Trajectory> {
    s0.validate(bg)?;
    if !t_end.is_finite() {
        return Err(Error::InvalidParameter("integration span must be finite".into()));
    }
    let form = s0.form;
    let n = s0.dim();
    let t0 = s0.time;

    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let s = PhaseSpaceState::from_vec(form, t, y);
        match flow {
            Flow::Canonical => {
                let h = hamiltonian_jet(&s, bg)?;
                hamilton_rhs(&h, n, dy);
            }
            Flow::NonRelativistic => {
                let h = nonrel_jet(&s, bg)?;
                hamilton_rhs(&h, n, dy);
            }
            Flow::Covariant => {
                let x = FourVector::new(y[0], y[1], y[2], y[3]);
                let u = FourVector::new(y[4], y[5], y[6], y[7]);
                let a = covariant_acceleration(&x, &u, bg)?;
                dy[..4].copy_from_slice(&u.0);
                dy[4..].copy_from_slice(&a.0);
            }
        }
        Ok(())
    };

    let mut events: Vec<Event<'_, f64>> = opts
        .events
        .iter()
        .map(|e| {
            let e = e.clone();
            Event::new(e.name.clone(), e.action, move |t, y: &[f64]| {
                e.eval(&PhaseSpaceState::from_vec(form, t, y))
            })
        })
        .collect();
    if opts.switch_events {
        for surf in bg.switch_surfaces() {
            events.push(Event::new(surf.name(), EventAction::Restart, move |t, y: &[f64]| {
                surf.signed_distance(&PhaseSpaceState::from_vec(form, t, y).position())
            }));
        }
    }

    let mut states: Vec<PhaseSpaceState> = Vec::new();
    let out = ode::solve(
        rhs,
        t0,
        &s0.to_vec(),
        t_end,
        &opts.ode,
        &events,
        &opts.t_eval,
        |t, y| {
            let dir_ok = states.last().map_or(true, |l| (t - l.time) * (t_end - t0).signum() > 0.0);
            if dir_ok {
                states.push(PhaseSpaceState::from_vec(form, t, y));
            }
        },
    )?;

    let labels: Vec<String> = qs.iter().map(|q| q.label.clone()).collect();
    let mut samples = Vec::with_capacity(states.len());
    for s in states {
        let values = qs.iter().map(|q| q.eval(&s)).collect::<Result<Vec<_>>>()?;
        samples.push(Sample { state: s, values });
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.values.clone()).collect();
    let drift = DriftReport::from_values(&labels, &rows, opts.drift_tol);
    Ok(Trajectory {
        form,
        background: bg.label().to_string(),
        labels,
        samples,
        drift,
        stats: out.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::quantities::poincare_set;

    #[test]
    fn free_motion_is_straight_in_every_form() {
        let bg = ScalarBackground::constant(1.0).unwrap();
        let s = PhaseSpaceState::instant(0.0, [0.1, 0.2, -0.3], [0.3, -0.2, 0.4]);
        let qs = poincare_set(&bg);
        for form in [Form::Instant, Form::Front, Form::ExtendedFront, Form::Covariant] {
            let s0 = s.convert(form, &bg).unwrap();
            let end = s0.time + 3.0;
            let tr = evolve(&s0, &bg, end, &EvolveOptions::default(), &qs).unwrap();
            assert!(tr.drift.max_drift() <= 1e-10, "{form:?}: {:?}", tr.drift);
            // straight line: x(t) - x(0) parallel to p^mu
            let p = s0.four_momentum(&bg).unwrap().flip_index();
            for x in tr.positions() {
                let d = x - s0.position();
                let k = d[0] / p[0];
                assert!((d - p.scale(k)).max_abs() < 1e-10, "{form:?}");
            }
        }
    }

    #[test]
    fn time_derivative_is_minus_bracket_with_h() {
        use crate::dynamics::jet::Jet;
        use crate::dynamics::quantities::{hamiltonian_quantity, poisson_bracket};
        let bg = ScalarBackground::linear_z(1.0, 0.6, false).unwrap();
        let z = ConservedQuantity::from_jet("z", &[Form::Instant], |s| Ok(Jet::variable(s.q[2], 2)));
        let p3 = ConservedQuantity::from_jet("p3", &[Form::Instant], |s| Ok(Jet::variable(s.p[2], 6)));
        let h = hamiltonian_quantity(&bg);
        let s = PhaseSpaceState::instant(0.0, [0.1, 0.2, 0.3], [0.2, 0.1, -0.4]);
        let dt = 1e-4;
        let qs = [z.clone(), p3.clone()];
        let fw = evolve(&s, &bg, dt, &EvolveOptions::default(), &qs).unwrap();
        let bw = evolve(&s, &bg, -dt, &EvolveOptions::default(), &qs).unwrap();
        for (i, q) in qs.iter().enumerate() {
            let a = fw.samples.last().unwrap().values[i];
            let b = bw.samples.last().unwrap().values[i];
            let fd = (a - b) / (2.0 * dt);
            let br = -poisson_bracket(q, &h, &s).unwrap();
            assert!((fd - br).abs() < 1e-7, "{}: {fd} vs {br}", q.label);
        }
    }

    #[test]
    fn covariant_orthogonality_and_unit_velocity() {
        let bg = ScalarBackground::linear_z(1.0, 1.0, false).unwrap();
        let u = FourVector::new(1.25, 0.0, 0.0, 0.75);
        let tr = evolve_covariant(FourVector::zero(), u, &bg, 2.0, &EvolveOptions::default(), &[]).unwrap();
        for s in tr.states() {
            let x = s.position();
            let u = FourVector::new(s.p[0], s.p[1], s.p[2], s.p[3]);
            let a = covariant_acceleration(&x, &u, &bg).unwrap();
            assert!((u.square() - 1.0).abs() < 1e-8);
            assert!(u.flip_index().contract(&a).abs() < 1e-12);
        }
    }

    #[test]
    fn p3_not_conserved_and_flagged() {
        let bg = ScalarBackground::linear_z(1.0, 1.0, false).unwrap();
        let s = PhaseSpaceState::instant(0.0, [0.0; 3], [0.0, 0.0, -0.5]);
        let p3 = super::super::quantities::momentum_component(2);
        let tr = evolve(&s, &bg, 1.0, &EvolveOptions::default(), &[p3]).unwrap();
        assert!(tr.drift.entries[0].flagged);
        // p3(t) = p3(0) + B t/(2 H)
        let h = 1.25f64.sqrt();
        let v = tr.values_of("p3").unwrap();
        assert!((v.last().unwrap() - (-0.5 + 1.0 / (2.0 * h))).abs() < 1e-9);
    }
}
