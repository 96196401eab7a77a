use super::{checks, BoundaryCondition, LaplacianError, ModeProblem, ModeSolution};
use crate::numerics::solve_tridiagonal;

/// Symmetric tridiagonal system `(lower, diag, upper, rhs)` and the index of
/// the first unknown.
///
/// Interior rows are `(−f_{i−1} + 2f_i − f_{i+1})/h² + V_i f_i = g_i`. The
/// Neumann row uses the reflected ghost `f_{−1} = f₁` and is halved,
/// `(f₀ − f₁)/h² + ½V₀f₀ = ½g₀`, which keeps the matrix symmetric.
pub(crate) fn assemble(p: &ModeProblem) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, usize) {
    let m = p.intervals();
    let h = p.step();
    let inv_h2 = 1.0 / (h * h);
    let first = match p.bc0 {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Neumann => 0,
    };
    let mut diag = Vec::with_capacity(m - first);
    let mut rhs = Vec::with_capacity(m - first);
    for i in first..m {
        let x = i as f64 * h;
        if i == 0 {
            diag.push(inv_h2 + 0.5 * p.potential(0.0));
            rhs.push(0.5 * p.rhs[0]);
        } else {
            diag.push(2.0 * inv_h2 + p.potential(x));
            rhs.push(p.rhs[i]);
        }
    }
    let off = vec![-inv_h2; diag.len() - 1];
    (off.clone(), diag, off, rhs, first)
}

/// Second-order finite-difference solve of `Δ₀ f = g`.
pub fn solve_mode(p: &ModeProblem) -> Result<ModeSolution, LaplacianError> {
    p.validate()?;
    let (lower, diag, upper, rhs, first) = assemble(p);
    let u = solve_tridiagonal(&lower, &diag, &upper, &rhs).ok_or(LaplacianError::Singular)?;
    let m = p.intervals();
    let mut f = vec![0.0; m + 1];
    f[first..m].copy_from_slice(&u);
    let expansion = checks::near_fold_fit(p, &f).ok();
    let energy = if p.is_zero_mode() {
        None
    } else {
        Some(checks::energy_sides(p, &f))
    };
    Ok(ModeSolution {
        x: p.grid(),
        f,
        expansion,
        energy,
    })
}

/// `(Δ₀ f)_i` with the second-order stencil on `1 ≤ i ≤ M−1`; entries 0 and M
/// are left at zero.
pub fn apply_operator(p: &ModeProblem, f: &[f64]) -> Vec<f64> {
    let m = p.intervals();
    let h = p.step();
    let mut out = vec![0.0; m + 1];
    for i in 1..m {
        let x = i as f64 * h;
        out[i] = (-f[i - 1] + 2.0 * f[i] - f[i + 1]) / (h * h) + p.potential(x) * f[i];
    }
    out
}

/// `max |A u − b|` of the assembled system at the discrete solution `f`.
pub fn system_residual(p: &ModeProblem, f: &[f64]) -> f64 {
    let (lower, diag, upper, rhs, first) = assemble(p);
    let u = &f[first..p.intervals()];
    let k = u.len();
    (0..k)
        .map(|i| {
            let mut r = diag[i] * u[i] - rhs[i];
            if i > 0 {
                r += lower[i - 1] * u[i - 1];
            }
            if i + 1 < k {
                r += upper[i] * u[i + 1];
            }
            r.abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_symmetric() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let p = ModeProblem::from_fn(2.0, 3, bc, 32, |x| x).unwrap();
            let (lower, _, upper, _, _) = assemble(&p);
            assert_eq!(lower, upper);
        }
    }

    #[test]
    fn dirichlet_poisson_closed_form() {
        // −f″ = 1, f(0) = f(1) = 0 ⇒ f = x(1−x)/2; the stencil is exact on quadratics.
        let p = ModeProblem::from_fn(0.0, 0, BoundaryCondition::Dirichlet, 64, |_| 1.0).unwrap();
        let s = solve_mode(&p).unwrap();
        for (x, f) in s.x.iter().zip(&s.f) {
            assert!((f - x * (1.0 - x) / 2.0).abs() < 1e-13);
        }
        assert!(s.energy.is_none());
    }

    #[test]
    fn neumann_poisson_closed_form() {
        // −f″ = 1, f′(0) = 0, f(1) = 0 ⇒ f = (1 − x²)/2.
        let p = ModeProblem::from_fn(0.0, 0, BoundaryCondition::Neumann, 64, |_| 1.0).unwrap();
        let s = solve_mode(&p).unwrap();
        for (x, f) in s.x.iter().zip(&s.f) {
            assert!((f - (1.0 - x * x) / 2.0).abs() < 1e-12, "{x} {f}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let p = ModeProblem::from_fn(1.5, 2, bc, 32, |_| 0.0).unwrap();
            let s = solve_mode(&p).unwrap();
            assert!(s.f.iter().all(|v| *v == 0.0));
            let e = s.energy.unwrap();
            assert_eq!((e.lhs, e.rhs, e.pass), (0.0, 0.0, true));
        }
    }

    #[test]
    fn constraint_violation_rejected() {
        let err = ModeProblem::from_fn(1.0, 2, BoundaryCondition::Dirichlet, 32, |_| 1.0).unwrap_err();
        assert_eq!(err, LaplacianError::FrequencyConstraint { lambda: 1.0, n: 2 });
        assert!(err.to_string().contains("|n| <= lambda^2"));
    }

    #[test]
    fn coarse_grid_rejected() {
        let err = ModeProblem::from_fn(1.0, 0, BoundaryCondition::Dirichlet, 8, |_| 1.0).unwrap_err();
        assert_eq!(err, LaplacianError::GridTooCoarse { intervals: 8 });
    }

    #[test]
    fn multiply_back() {
        let p = ModeProblem::from_fn(3.0, -4, BoundaryCondition::Neumann, 128, |x| (5.0 * x).cos()).unwrap();
        let s = solve_mode(&p).unwrap();
        let gnorm = p.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(system_residual(&p, &s.f) <= 1e-12 * gnorm);
    }
}
