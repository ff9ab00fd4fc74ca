use std::sync::Arc;

use sfdyn::analytic::PlaneWaveOrbit;
use sfdyn::backgrounds::{GaussianProfile, NullArgument, SinSquaredProfile};
use sfdyn::kgverify::{
    free_mode, hamilton_jacobi_defect, make_conformal_solution, make_dilation_solution, operator_identity_defect,
    RATIO_BAND,
};
use sfdyn::{ConformalGenerator, Form, FourVector, PhaseSpaceState, ScalarBackground};

fn plane_wave() -> ScalarBackground {
    ScalarBackground::plane_wave(Arc::new(SinSquaredProfile { scale: 1.0 }), NullArgument::Plus)
}

#[test]
fn plane_wave_phase_is_the_hamilton_jacobi_action() {
    let bg = plane_wave();
    let xs: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
    for p in [[0.6, 0.4, -0.3], [1.2, -0.7, 0.1]] {
        let s0 = PhaseSpaceState::front(0.0, [0.0, 0.1, -0.1], p)
            .convert(Form::ExtendedFront, &bg)
            .unwrap();
        let orbit = PlaneWaveOrbit::new(&s0, &bg).unwrap();
        let d = hamilton_jacobi_defect(&orbit, &bg, &xs, 1e-3).unwrap();
        assert!(d <= 1e-6, "{d}");
        let coarse = hamilton_jacobi_defect(&orbit, &bg, &xs, 2e-3).unwrap();
        let r = coarse / d;
        assert!(r > RATIO_BAND.0 && r < RATIO_BAND.1, "{r}");
    }
}

#[test]
fn hamilton_jacobi_defect_sees_a_foreign_orbit() {
    let bg = plane_wave();
    // integrated in a different profile, so the phase does not match
    let other = ScalarBackground::plane_wave(Arc::new(SinSquaredProfile { scale: 2.0 }), NullArgument::Plus);
    let s0 = PhaseSpaceState::front(0.0, [0.0, 0.0, 0.0], [0.6, 0.4, -0.3])
        .convert(Form::ExtendedFront, &other)
        .unwrap();
    let orbit = PlaneWaveOrbit::new(&s0, &other).unwrap();
    let xs: Vec<f64> = (0..11).map(|i| 0.3 * i as f64).collect();
    assert!(hamilton_jacobi_defect(&orbit, &bg, &xs, 1e-3).unwrap() > 1e-2);
}

fn generators() -> Vec<(&'static str, ConformalGenerator)> {
    vec![
        ("C", ConformalGenerator::special_conformal_null()),
        ("D", ConformalGenerator::dilation(1.0)),
        ("T1", ConformalGenerator::null_rotation_t(1)),
        ("Kz", ConformalGenerator::boost_z()),
        ("P+", ConformalGenerator::translation_plus()),
    ]
}

// The commutator identity holds for any function and any mass, so the
// defect must be pure O(h^2) truncation.
#[test]
fn commutator_identity_converges_for_arbitrary_functions() {
    let f = Arc::new(GaussianProfile { amplitude: 1.0, k: 1.0, center: 0.0 });
    let conf = ScalarBackground::special_conformal(f.clone());
    let dil = ScalarBackground::dilation(2.0).unwrap();
    let cases = [
        (make_conformal_solution([0.3, -0.2], 0.7, f).unwrap(), conf.clone()),
        (free_mode(FourVector::new(1.3, 0.2, 0.1, -0.4)), conf),
        (free_mode(FourVector::new(0.5, -0.3, 0.8, 0.2)), plane_wave()),
        (
            make_dilation_solution([0.5, 0.3], 0.7, 2.0, [1.0.into(), num_complex::Complex64::new(0.0, 0.5)]).unwrap(),
            dil,
        ),
    ];
    let x = FourVector::new(1.4, 0.2, -0.3, 0.1);
    for (phi, bg) in &cases {
        for (name, g) in generators() {
            let d1 = operator_identity_defect(&g, phi, bg, &x, 1e-2).unwrap();
            let d2 = operator_identity_defect(&g, phi, bg, &x, 5e-3).unwrap();
            assert!(d2 < 1e-3, "{name} on {}: {d2}", phi.name);
            let r = d1 / d2;
            assert!(r > RATIO_BAND.0 && r < RATIO_BAND.1, "{name} on {}: ratio {r}", phi.name);
        }
    }
}
