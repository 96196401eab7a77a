use foldhk::laplacian::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn admissible(rng: &mut impl Rng) -> (f64, i64) {
    let lambda: f64 = rng.gen_range(0.5..4.0);
    let bound = (lambda * lambda).floor() as i64;
    (lambda, rng.gen_range(-bound..=bound))
}

/// `g(x) = Σ_k a_k cos(kπx) + b_k sin(kπx)`, k ≤ 6.
fn band_limited(rng: &mut impl Rng) -> impl Fn(f64) -> f64 {
    let a: Vec<f64> = (0..=6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..=6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    move |x| (0..=6).map(|k| a[k] * (k as f64 * PI * x).cos() + b[k] * (k as f64 * PI * x).sin()).sum()
}

#[test]
fn manufactured_order_random_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let (l, n) = admissible(&mut rng);
        let s = manufactured_study(l, n, 256).unwrap();
        assert!((s.order - 2.0).abs() <= 0.2, "({l}, {n}): {s:?}");
    }
}

#[test]
fn energy_inequality_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..100 {
        let (l, n) = admissible(&mut rng);
        let bc = if trial % 2 == 0 { BoundaryCondition::Dirichlet } else { BoundaryCondition::Neumann };
        let g = band_limited(&mut rng);
        let p = ModeProblem::from_fn(l, n, bc, 512, g).unwrap();
        let s = solve_mode(&p).unwrap();
        let e = energy_check(&p, &s).unwrap();
        assert!(e.pass, "trial {trial}: {e:?}");
    }
}

#[test]
fn expansion_laws_neumann() {
    let p = ModeProblem::from_fn(2.0, 1, BoundaryCondition::Neumann, 512, |_| 1.0).unwrap();
    let s = solve_mode(&p.folded()).unwrap();
    let fit = expansion_fit(&p, &s).unwrap();
    assert!((fit.coeffs[2] / fit.coeffs[0] - 2.0).abs() < 0.02);
    assert!(fit.f2_error < 0.01 && fit.f3_error < 0.01, "{fit:?}");
    assert!(fit.coeffs[1].abs() < 1e-4 * fit.coeffs[0].abs().max(1.0));
}

#[test]
fn expansion_laws_dirichlet() {
    let p = ModeProblem::from_fn(3.0, -5, BoundaryCondition::Dirichlet, 512, |x| 1.0 + x * x).unwrap();
    let s = solve_mode(&p.folded()).unwrap();
    assert_eq!(s.f[0], 0.0);
    let fit = expansion_fit(&p, &s).unwrap();
    assert!(fit.f2_error < 0.01 && fit.f3_error < 0.01, "{fit:?}");
}

#[test]
fn commuted_identity_converges() {
    let residual = |m: usize| {
        let p = ModeProblem::from_fn(3.0, 2, BoundaryCondition::Dirichlet, m, |x| {
            (PI * PI + 9.0 + 4.0 * x * x) * (PI * x).sin()
        })
        .unwrap();
        let s = solve_mode(&p).unwrap();
        commuted_identity_check(&p, &s).unwrap().residual
    };
    let ratio = residual(256) / residual(512);
    assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
}

#[test]
fn commuted_identity_error_bound() {
    // residual ≤ 10 · (h²/3) max|f‴|, f‴ estimated from the discrete solution
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let g = band_limited(&mut rng);
        let p = ModeProblem::from_fn(3.0, 3, BoundaryCondition::Dirichlet, 512, g).unwrap();
        let s = solve_mode(&p).unwrap();
        let h = p.step();
        let f3 = s
            .f
            .windows(4)
            .map(|w| ((w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0]) / h.powi(3)).abs())
            .fold(0.0, f64::max);
        let bound = h * h / 3.0 * f3;
        let r = commuted_identity_check(&p, &s).unwrap().residual;
        assert!(r <= 10.0 * bound, "{r} vs {bound}");
    }
}

#[test]
fn assembly_diagonal_case() {
    let m = 256;
    let g: Vec<f64> = (0..=m).map(|i| (PI * i as f64 / m as f64).sin()).collect();
    let z = vec![0.0; m + 1];
    let scale = |c: f64| g.iter().map(|v| c * v).collect::<Vec<_>>();
    let v = [
        [scale(2.0), z.clone(), z.clone()],
        [z.clone(), scale(-1.0), z.clone()],
        [z.clone(), z.clone(), scale(-1.0)],
    ];
    let a = dn_assemble(&v, 2.0, 3).unwrap();
    for r in 0..3 {
        for c in 0..3 {
            let nonzero = a.entries[r][c].f.iter().any(|x| *x != 0.0);
            assert_eq!(nonzero, r == c);
        }
    }
    // the diagonal entries are Dirichlet solutions of x·v
    let p = ModeProblem::new(2.0, 3, BoundaryCondition::Dirichlet, scale(2.0)).unwrap().folded();
    assert_eq!(a.entries[0][0], solve_mode(&p).unwrap());
}

#[test]
fn assembly_neumann_entry() {
    let m = 128;
    let g: Vec<f64> = (0..=m).map(|i| (i as f64 / m as f64).cos()).collect();
    let z = vec![0.0; m + 1];
    let v = [
        [z.clone(), g.clone(), z.clone()],
        [g.clone(), z.clone(), z.clone()],
        [z.clone(), z.clone(), z.clone()],
    ];
    let a = dn_assemble(&v, 1.5, 2).unwrap();
    assert_eq!(a.conditions[0][1], BoundaryCondition::Neumann);
    let p = ModeProblem::new(1.5, 2, BoundaryCondition::Neumann, g.clone()).unwrap().folded();
    assert_eq!(a.entries[0][1], solve_mode(&p).unwrap());
    assert_ne!(a.entries[0][1].f[0], 0.0);
}

#[test]
fn structural_pattern_all_nine_entries() {
    // each entry solved alone must carry its own fold condition
    let m = 64;
    let bump: Vec<f64> = (0..=m).map(|i| 1.0 + i as f64 / m as f64).collect();
    for r in 0..3 {
        for c in 0..3 {
            let mut v: [[Vec<f64>; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; m + 1]));
            v[r][c] = bump.clone();
            v[c][r] = bump.clone();
            if r == c {
                let other = (r + 1) % 3;
                v[other][other] = bump.iter().map(|x| -x).collect();
            }
            let a = dn_assemble(&v, 2.0, 1).unwrap();
            let s = &a.entries[r][c];
            match entry_condition(r, c) {
                BoundaryCondition::Dirichlet => assert_eq!(s.f[0], 0.0),
                BoundaryCondition::Neumann => {
                    assert_ne!(s.f[0], 0.0);
                    // discrete f′(0) = 0 through the reflected ghost: row 0 balances
                    let h = 1.0 / m as f64;
                    let row0 = (s.f[0] - s.f[1]) / (h * h) + 0.5 * 4.0 * s.f[0];
                    assert!(row0.abs() < 1e-9 * s.f[0].abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn maximum_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (l, n) = admissible(&mut rng);
        let g = band_limited(&mut rng);
        let p = ModeProblem::from_fn(l, n, BoundaryCondition::Dirichlet, 256, |x| g(x).abs()).unwrap();
        let s = solve_mode(&p).unwrap();
        assert!(s.f.iter().all(|v| *v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_inequality_holds(lambda in 0.3f64..5.0, frac in -1.0f64..1.0, amp in prop::collection::vec(-2.0f64..2.0, 5), neumann: bool) {
        let n = (frac * (lambda * lambda).floor()).round() as i64;
        let bc = if neumann { BoundaryCondition::Neumann } else { BoundaryCondition::Dirichlet };
        let p = ModeProblem::from_fn(lambda, n, bc, 128, |x| {
            amp.iter().enumerate().map(|(k, a)| a * (k as f64 * 2.0 * x).cos()).sum()
        }).unwrap();
        let s = solve_mode(&p).unwrap();
        let e = energy_check(&p, &s).unwrap();
        prop_assert!(e.lhs <= e.rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn solve_is_linear(a in -3.0f64..3.0, lambda in 0.5f64..3.0) {
        let p1 = ModeProblem::from_fn(lambda, 0, BoundaryCondition::Neumann, 64, |x| x.sin()).unwrap();
        let p2 = ModeProblem::from_fn(lambda, 0, BoundaryCondition::Neumann, 64, |x| a * x.sin()).unwrap();
        let f1 = solve_mode(&p1).unwrap().f;
        let f2 = solve_mode(&p2).unwrap().f;
        for (u, v) in f1.iter().zip(&f2) {
            prop_assert!((a * u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn constraint_enforced(lambda in 0.0f64..3.0, n in -20i64..20) {
        let r = ModeProblem::from_fn(lambda, n, BoundaryCondition::Dirichlet, 32, |_| 1.0);
        prop_assert_eq!(r.is_ok(), (n.unsigned_abs() as f64) <= lambda * lambda);
    }
}
