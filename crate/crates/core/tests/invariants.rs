use proptest::prelude::*;

use sfdyn::backgrounds::{NullArgument, SinSquaredProfile};
use sfdyn::conformal::{conformal_killing_residual, divergence, killing_vector, lie_bracket};
use sfdyn::dynamics::quantities::{hamiltonian_quantity, spacelike_set};
use sfdyn::dynamics::jet::P_OFFSET;
use sfdyn::dynamics::{poisson_bracket, ConservedQuantity, Jet};
use sfdyn::integrability::{independence_rank, RANK_TAU};
use sfdyn::kgverify::{kg_residual_normalized, make_planewave_solution};
use sfdyn::{ConformalGenerator, FourVector, PhaseSpaceState, ScalarBackground};

use std::sync::Arc;

fn generator(v: &[f64]) -> ConformalGenerator {
    let mut w = [[0.0; 4]; 4];
    let mut k = 4;
    for mu in 0..4 {
        for nu in mu + 1..4 {
            w[mu][nu] = v[k];
            w[nu][mu] = -v[k];
            k += 1;
        }
    }
    ConformalGenerator::new(
        FourVector::new(v[0], v[1], v[2], v[3]),
        w,
        v[10],
        FourVector::new(v[11], v[12], v[13], v[14]),
    )
    .unwrap()
}

fn gen_params() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 15)
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lie_bracket_is_antisymmetric_and_satisfies_jacobi(
        p1 in gen_params(), p2 in gen_params(), p3 in gen_params()
    ) {
        let (a, b, c) = (generator(&p1), generator(&p2), generator(&p3));
        let anti = lie_bracket(&a, &b).add(&lie_bracket(&b, &a));
        prop_assert!(anti.max_abs() < 1e-12);
        let jac = lie_bracket(&a, &lie_bracket(&b, &c))
            .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
            .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
        prop_assert!(jac.max_abs() < 1e-10, "{}", jac.max_abs());
    }

    #[test]
    fn generators_are_conformal_killing_fields(p in gen_params(), x in point()) {
        let g = generator(&p);
        let x = FourVector(x);
        let r = conformal_killing_residual(&g, &x);
        prop_assert!(r.iter().flatten().all(|v| v.abs() < 1e-13));
        // divergence against central differences of the field
        let h = 1e-5;
        let mut fd = 0.0;
        for mu in 0..4 {
            let mut e = [0.0; 4];
            e[mu] = h;
            let up = killing_vector(&g, &(x + FourVector(e)));
            let dn = killing_vector(&g, &(x - FourVector(e)));
            fd += (up[mu] - dn[mu]) / (2.0 * h);
        }
        prop_assert!((fd - divergence(&g, &x)).abs() < 1e-8);
    }

    #[test]
    fn charges_represent_the_bracket(
        p1 in gen_params(), p2 in gen_params(),
        q in prop::array::uniform3(-1.0..1.0f64), mom in prop::array::uniform3(-1.0..1.0f64)
    ) {
        // Poincare part only: the reduced phase space carries the mass shell,
        // which dilations and special conformal maps do not preserve
        let poincare = |p: &[f64]| {
            let mut v = p.to_vec();
            v[10..].iter_mut().for_each(|x| *x = 0.0);
            generator(&v)
        };
        let bg = ScalarBackground::constant(1.0).unwrap();
        let (a, b) = (poincare(&p1), poincare(&p2));
        let s = PhaseSpaceState::instant(0.3, q, mom);
        let qa = ConservedQuantity::from_generator("a", a, &bg);
        let qb = ConservedQuantity::from_generator("b", b, &bg);
        let qab = ConservedQuantity::from_generator("ab", lie_bracket(&a, &b), &bg);
        let lhs = poisson_bracket(&qa, &qb, &s).unwrap();
        let rhs = qab.eval(&s).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn poisson_bracket_satisfies_jacobi(
        q in prop::array::uniform3(-0.4..0.4f64), mom in prop::array::uniform3(-0.5..0.5f64),
        c in prop::array::uniform6(-1.0..1.0f64)
    ) {
        let bg = ScalarBackground::linear_z(1.0, 1.0, false).unwrap();
        let s = PhaseSpaceState::instant(0.0, q, mom);
        let [f, g] = polynomials(c);
        let j = jacobi_terms(&f, &g, &hamiltonian_quantity(&bg), &s);
        prop_assert!(j.iter().sum::<f64>().abs() < 1e-6, "{j:?}");
    }

    #[test]
    fn rank_is_invariant_under_invertible_recombination(
        m in prop::array::uniform2(0.5..2.0f64), off in -0.4..0.4f64, seed_shift in 0.0..0.2f64
    ) {
        let bg = ScalarBackground::linear_z(1.0, 1.0, false).unwrap();
        let qs = spacelike_set(1.0, &bg);
        let states: Vec<PhaseSpaceState> = (0..8)
            .map(|i| {
                let t = i as f64 * 0.37 + seed_shift;
                PhaseSpaceState::instant(0.0, [0.3 * t.sin(), 0.2 * t.cos(), 0.1 * (2.0 * t).sin()],
                    [0.4 * (1.3 * t).cos(), 0.3 * (0.7 * t).sin(), 0.2 + 0.1 * t.cos()])
            })
            .collect();
        let base = independence_rank(&qs, &states, RANK_TAU).unwrap().rank;
        // (Q1, Q2) -> (m0 Q1 + off Q2, m1 Q2 + off Q1), det = m0 m1 - off^2 > 0
        let (q1, q2) = (qs[0].clone(), qs[1].clone());
        let (a1, a2) = (q1.clone(), q2.clone());
        let mut mixed = qs.clone();
        mixed[0] = ConservedQuantity::from_fn("R1", &[], move |s| Ok(m[0] * q1.eval(s)? + off * q2.eval(s)?));
        mixed[1] = ConservedQuantity::from_fn("R2", &[], move |s| Ok(m[1] * a2.eval(s)? + off * a1.eval(s)?));
        let rank = independence_rank(&mixed, &states, RANK_TAU).unwrap().rank;
        prop_assert_eq!(base, 5);
        prop_assert_eq!(rank, base);
    }

    #[test]
    fn planewave_kg_residual_converges_at_second_order(
        x in point(), qp in prop::array::uniform2(-0.8..0.8f64), qm in 0.2..1.0f64
    ) {
        let bg = ScalarBackground::plane_wave(Arc::new(SinSquaredProfile { scale: 1.0 }), NullArgument::Plus);
        let phi = make_planewave_solution(qp, qm, &bg).unwrap();
        let x = FourVector(x);
        let r1 = kg_residual_normalized(&phi, &bg, &x, 1e-2).unwrap();
        let r2 = kg_residual_normalized(&phi, &bg, &x, 5e-3).unwrap();
        prop_assert!(r1 < 1e-2);
        prop_assert!((r1 / r2 - 4.0).abs() < 0.5, "{}", r1 / r2);
    }
}

fn qv(s: &PhaseSpaceState, i: usize) -> Jet {
    Jet::variable(s.q[i], i)
}

fn pv(s: &PhaseSpaceState, i: usize) -> Jet {
    Jet::variable(s.p[i], P_OFFSET + i)
}

/// Two quadratic phase-space polynomials with exact gradients.
fn polynomials(c: [f64; 6]) -> [ConservedQuantity; 2] {
    [
        ConservedQuantity::from_jet("f", &[], move |s| {
            Ok(qv(s, 0) * qv(s, 2) * c[0] + pv(s, 0) * pv(s, 0) * qv(s, 1) * c[1] + pv(s, 2) * c[2])
        }),
        ConservedQuantity::from_jet("g", &[], move |s| {
            Ok(pv(s, 1) * qv(s, 0) * c[3] + pv(s, 2) * pv(s, 2) * c[4] + qv(s, 1) * qv(s, 2) * c[5])
        }),
    ]
}

/// `{f,{g,k}}, {g,{k,f}}, {k,{f,g}}`; the inner brackets are differentiated
/// by central differences.
fn jacobi_terms(f: &ConservedQuantity, g: &ConservedQuantity, k: &ConservedQuantity, s: &PhaseSpaceState) -> [f64; 3] {
    let nested = |a: &ConservedQuantity, b: &ConservedQuantity, c: &ConservedQuantity| {
        let (b, c) = (b.clone(), c.clone());
        let inner = ConservedQuantity::from_fn("inner", &[], move |st| poisson_bracket(&b, &c, st));
        poisson_bracket(a, &inner, s).unwrap()
    };
    [nested(f, g, k), nested(g, k, f), nested(k, f, g)]
}

#[test]
fn jacobi_terms_are_not_trivially_zero() {
    let bg = ScalarBackground::linear_z(1.0, 1.0, false).unwrap();
    let s = PhaseSpaceState::instant(0.0, [0.1, -0.2, 0.05], [0.2, 0.1, -0.3]);
    let [f, g] = polynomials([0.7, -0.4, 0.3, 0.9, -0.6, 0.5]);
    let j = jacobi_terms(&f, &g, &hamiltonian_quantity(&bg), &s);
    assert!(j.iter().map(|v| v.abs()).fold(0.0, f64::max) > 1e-2, "{j:?}");
    assert!(j.iter().sum::<f64>().abs() < 1e-6, "{j:?}");
    // a sign error in any one term shows up
    assert!((j[0] + j[1] - j[2]).abs() > 1e-3);
}
