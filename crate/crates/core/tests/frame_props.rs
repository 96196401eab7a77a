use foldhk::frame::*;
use foldhk::nahm::{integrate, reconstruct, wedge_identity_residual, FlowConfig, NahmState};
use proptest::prelude::*;

const N: usize = 16;

fn sfield() -> impl Strategy<Value = SField> {
    // a handful of low modes so products stay resolved
    prop::collection::vec(-1.0f64..1.0, 7).prop_map(|a| {
        let mut f = SField::constant(N, a[0]);
        for k in 1..=3 {
            f = &(&f + &SField::cos_mode(N, k as i64, a[2 * k - 1])) + &SField::sin_mode(N, k as i64, a[2 * k]);
        }
        f
    })
}

fn field() -> impl Strategy<Value = InvariantVectorField> {
    (sfield(), sfield(), sfield()).prop_map(|(f, g, h)| InvariantVectorField::new(f, g, h))
}

fn form(degree: usize) -> impl Strategy<Value = FormField> {
    let count = monomials(degree).len();
    prop::collection::vec(sfield(), count).prop_map(move |cs| {
        let masks = monomials(degree);
        FormField::from_fn(degree, N, None, |_, mask| {
            cs[masks.iter().position(|m| *m == mask).unwrap()].clone()
        })
        .unwrap()
    })
}

fn close(a: &InvariantVectorField, b: &InvariantVectorField, tol: f64) -> bool {
    a.sub(b).max_abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(a in form(1), b in form(2)) {
        for f in [a, b] {
            let dd = exterior_derivative(&exterior_derivative(&f).unwrap()).unwrap();
            prop_assert!(dd.max_abs() <= 1e-11);
        }
    }

    #[test]
    fn leibniz_rule(a in form(1), b in form(1)) {
        // d(a∧b) = da∧b − a∧db for 1-forms
        let lhs = exterior_derivative(&wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&exterior_derivative(&a).unwrap(), &b).unwrap()
            .sub(&wedge(&a, &exterior_derivative(&b).unwrap()).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn wedge_graded_commutative(a in form(1), b in form(2)) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().max_abs() <= 1e-12);
        let aa = wedge(&a, &a).unwrap();
        prop_assert!(aa.max_abs() <= 1e-12);
    }

    #[test]
    fn bracket_antisymmetric(v in field(), w in field()) {
        let vw = lie_bracket(&v, &w);
        let wv = lie_bracket(&w, &v);
        prop_assert!(close(&vw, &wv.scale(-1.0), 1e-11));
    }

    #[test]
    fn bracket_bilinear(u in field(), v in field(), w in field(), a in -2.0f64..2.0) {
        let lhs = lie_bracket(&u.axpy(a, &v), &w);
        let rhs = lie_bracket(&u, &w).axpy(a, &lie_bracket(&v, &w));
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn jacobi_identity(u in field(), v in field(), w in field()) {
        let j = lie_bracket(&u, &lie_bracket(&v, &w))
            .add(&lie_bracket(&v, &lie_bracket(&w, &u)))
            .add(&lie_bracket(&w, &lie_bracket(&u, &v)));
        // triple products reach mode 9 < N/2 only after truncation; compare loosely
        prop_assert!(j.max_abs() <= 1e-8 * (1.0 + u.max_abs() * v.max_abs() * w.max_abs()));
    }

    #[test]
    fn brackets_preserve_volume(f in sfield(), g in sfield(), h in sfield()) {
        // g-coefficient free, so divergence vanishes: V = f X₁ + c X₂ + h X₃ with c constant
        let v = InvariantVectorField::new(f.clone(), SField::constant(N, g.mean()), h.clone());
        let w = InvariantVectorField::new(h, SField::constant(N, 0.5), f);
        prop_assert!(v.is_volume_preserving() && w.is_volume_preserving());
        prop_assert!(lie_bracket(&v, &w).is_volume_preserving());
    }

    #[test]
    fn wedge_identity_on_flowed_data(p in sfield(), q in sfield(), r in sfield(), eps in -0.2f64..0.2) {
        let init = NahmState::from_perturbation(eps, &p, &q.scale(0.1), &r.scale(0.1));
        let traj = integrate(&init, &FlowConfig::new(0.01, 0.05, N)).unwrap();
        let hk = reconstruct(&traj).unwrap();
        prop_assert!(wedge_identity_residual(&hk).unwrap() <= 1e-12);
    }
}

#[test]
fn dilation_is_cubic_on_model() {
    let g0 = |p: CoframePoint| model_metric_g0(p.x);
    for t in [0.5, 2.0, 3.7] {
        for i in 0..10 {
            let x = 0.1 + 0.2 * i as f64;
            let p = CoframePoint { x, s: 0.3 * i as f64 };
            let pulled = dilation_pullback(t, g0, p).unwrap();
            let expect = model_metric_g0(x).unwrap().scale(t.powi(3));
            assert!(pulled.max_abs_diff(&expect) <= 1e-14 * expect.c.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs())));
            for a in 0..3 {
                let w = move |p: CoframePoint| Ok(model_kahler_forms(p.x)[a]);
                let pulled = dilation_pullback(t, w, p).unwrap();
                let expect = model_kahler_forms(x)[a].scale(t.powi(3));
                assert!(pulled.max_abs_diff(&expect) <= 1e-14 * t.powi(3).max(1.0) * x.max(1.0));
            }
        }
    }
}

#[test]
fn frame_algebra_structure() {
    let alg = FrameAlgebra;
    assert_eq!(alg.bracket(1, 2), [-1.0, 0.0, 0.0]);
    assert_eq!(alg.jacobi_defect(), 0.0);
}
