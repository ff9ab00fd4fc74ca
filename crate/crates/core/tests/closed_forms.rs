use std::sync::Arc;

use sfdyn::analytic::{ClosedFormOrbit, ConformalOrbit, PlaneWaveOrbit, SpacelikeOrbit, TimelikeOrbit};
use sfdyn::backgrounds::{GaussianProfile, NullArgument, SinSquaredProfile};
use sfdyn::dynamics::{evolve, EvolveOptions};
use sfdyn::ode::OdeOptions;
use sfdyn::{Form, PhaseSpaceState, ScalarBackground};

fn opts(t0: f64, t1: f64, n: usize) -> EvolveOptions {
    let ode = OdeOptions::<f64> {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        ..Default::default()
    };
    EvolveOptions {
        ode,
        t_eval: (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
        ..Default::default()
    }
}

/// Largest gap in `(q, p)` between integrated samples and the closed form,
/// compared in the closed form's own layout.
fn gap(orbit: &dyn ClosedFormOrbit, bg: &ScalarBackground, s0: &PhaseSpaceState, t1: f64) -> f64 {
    let traj = evolve(s0, bg, t1, &opts(s0.time, t1, 41), &[]).unwrap();
    assert_eq!(traj.samples.len(), 41);
    let mut worst: f64 = 0.0;
    for st in traj.states() {
        let num = st.convert(orbit.form(), bg).unwrap();
        let exact = orbit.state_at(num.time).unwrap();
        for (a, b) in num.q.iter().chain(&num.p).zip(exact.q.iter().chain(&exact.p)) {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    worst
}

#[test]
fn spacelike_closed_form_matches_integration() {
    let bg = ScalarBackground::linear_z(1.0, 0.8, false).unwrap();
    let s0 = PhaseSpaceState::instant(0.0, [0.1, -0.2, 0.3], [0.2, 0.1, -0.1]);
    let orbit = SpacelikeOrbit::new(0.8, 1.0, &s0, false).unwrap();
    assert!(gap(&orbit, &bg, &s0, 1.5) < 1e-10);
}

#[test]
fn timelike_closed_form_matches_integration() {
    let e = Arc::new(GaussianProfile { amplitude: 0.6, k: 1.5, center: 1.0 });
    let bg = ScalarBackground::timelike(1.0, e.clone(), false).unwrap();
    let s0 = PhaseSpaceState::instant(0.0, [0.1, 0.0, -0.2], [0.3, -0.2, 0.4]);
    let orbit = TimelikeOrbit::new(1.0, e, &s0).unwrap();
    assert!(gap(&orbit, &bg, &s0, 3.0) < 1e-10);
}

#[test]
fn plane_wave_closed_form_matches_integration() {
    let bg = ScalarBackground::plane_wave(Arc::new(SinSquaredProfile { scale: 1.0 }), NullArgument::Plus);
    let front = PhaseSpaceState::front(0.0, [0.0, 0.1, -0.1], [0.6, 0.4, -0.3]);
    let s0 = front.convert(Form::ExtendedFront, &bg).unwrap();
    let orbit = PlaneWaveOrbit::new(&s0, &bg).unwrap();
    assert!(gap(&orbit, &bg, &s0, 6.0) < 1e-10);
}

#[test]
fn conformal_closed_form_matches_integration() {
    let f = Arc::new(GaussianProfile { amplitude: 1.0, k: 1.0, center: 0.0 });
    let bg = ScalarBackground::special_conformal(f);
    for s0 in [
        PhaseSpaceState::front(1.0, [0.1, 0.2, -0.1], [0.6, 0.1, -0.2]),
        PhaseSpaceState::front(0.5, [-0.3, 0.0, 0.4], [0.9, -0.3, 0.2]),
    ] {
        let orbit = ConformalOrbit::new(&s0, &bg).unwrap();
        let g = gap(&orbit, &bg, &s0, s0.time + 2.0);
        assert!(g < 1e-9, "{g}");
    }
}

#[test]
fn switched_conformal_orbit_starts_at_the_switch() {
    let bg = ScalarBackground::conformal_gaussian_switched(1.0, 1.0, 1.0).unwrap();
    let inside = PhaseSpaceState::front(1.0, [0.0, 0.0, 0.0], [0.5, 0.0, 0.0]);
    let orbit = ConformalOrbit::new(&inside, &bg).unwrap();
    assert_eq!(orbit.window().0, 1.0);
    let g = gap(&orbit, &bg, &inside, 4.0);
    assert!(g < 1e-9, "{g}");
    let before = PhaseSpaceState::front(0.5, [0.0, 0.0, 0.0], [0.5, 0.0, 0.0]);
    assert!(ConformalOrbit::new(&before, &bg).is_err());
}
