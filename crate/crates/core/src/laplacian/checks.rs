use super::{solve_mode, solver::apply_operator, BoundaryCondition, EnergySides, LaplacianError, ModeProblem, ModeSolution};
use crate::numerics::{observed_order, polyfit_powers, trapezoid};
use std::f64::consts::PI;

fn fit_points(p: &ModeProblem) -> usize {
    p.intervals().div_ceil(8)
}

/// Degree of the near-fold least-squares polynomial. A plain cubic absorbs the
/// `x⁴` and `x⁵` terms into `f₂, f₃` and misses the expansion laws by several
/// percent on a window of `M/8` points; the extra terms remove that bias.
const FIT_DEGREE: u32 = 6;

/// Leading Taylor coefficients `(f₀, f₁, f₂, f₃)` from a degree-6 least-squares
/// fit on the first `⌈M/8⌉` points. With a Dirichlet fold `f₀ = 0` is imposed.
pub(crate) fn near_fold_fit(p: &ModeProblem, f: &[f64]) -> Result<[f64; 4], LaplacianError> {
    let k = fit_points(p);
    if k < 2 * FIT_DEGREE as usize {
        return Err(LaplacianError::IllConditionedFit { points: k });
    }
    let xs = &p.grid()[..k];
    let first = match p.bc0 {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Neumann => 0,
    };
    let powers: Vec<u32> = (first..=FIT_DEGREE).collect();
    let c = polyfit_powers(xs, &f[..k], &powers).ok_or(LaplacianError::IllConditionedFit { points: k })?;
    let mut out = [0.0; 4];
    for (&pw, &v) in powers.iter().zip(&c) {
        if pw < 4 {
            out[pw as usize] = v;
        }
    }
    Ok(out)
}

pub(crate) fn energy_sides(p: &ModeProblem, f: &[f64]) -> EnergySides {
    let h = p.step();
    let x = p.grid();
    let grad: f64 = f.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2) * h).sum();
    let pot: Vec<f64> = x.iter().zip(f).map(|(x, f)| p.potential(*x) * f * f).collect();
    let weighted: Vec<f64> = x.iter().zip(&p.rhs).map(|(x, g)| g * g / p.potential(*x)).collect();
    let lhs = grad + 0.5 * trapezoid(&pot, h);
    let rhs = 0.5 * trapezoid(&weighted, h);
    let pass = lhs <= rhs * (1.0 + 5.0 / p.intervals() as f64);
    EnergySides { lhs, rhs, pass }
}

/// `∫|f′|² + ½∫(λ²+n²x²)|f|²` against `½∫|g|²/(λ²+n²x²)`, by forward
/// differences and the trapezoidal rule; passes within a `5/M` slack.
pub fn energy_check(p: &ModeProblem, sol: &ModeSolution) -> Result<EnergySides, LaplacianError> {
    if p.is_zero_mode() {
        return Err(LaplacianError::ZeroMode);
    }
    if sol.f.len() != p.rhs.len() {
        return Err(LaplacianError::GridMismatch);
    }
    Ok(energy_sides(p, &sol.f))
}

/// Near-fold expansion of a solution of the folded equation and its two laws.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFit {
    pub coeffs: [f64; 4],
    pub points: usize,
    /// `½λ²f₀`.
    pub f2_target: f64,
    /// `(λ²f₁ − g(0))/6`.
    pub f3_target: f64,
    /// Relative deviations from the targets (absolute deviation over `max|f|`
    /// when a target vanishes).
    pub f2_error: f64,
    pub f3_error: f64,
}

/// Fits `f ≈ f₀ + f₁x + f₂x² + f₃x³ + …` to `sol`, which must solve
/// `Δ₀ f = x·g` where `g = p.rhs` (see [`ModeProblem::folded`]).
pub fn expansion_fit(p: &ModeProblem, sol: &ModeSolution) -> Result<ExpansionFit, LaplacianError> {
    if sol.f.len() != p.rhs.len() {
        return Err(LaplacianError::GridMismatch);
    }
    let c = near_fold_fit(p, &sol.f)?;
    let l2 = p.lambda * p.lambda;
    let f2_target = 0.5 * l2 * c[0];
    let f3_target = (l2 * c[1] - p.rhs[0]) / 6.0;
    let scale = sol.f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rel = |actual: f64, target: f64| {
        let diff = (actual - target).abs();
        if target.abs() > 1e-8 * scale {
            diff / target.abs()
        } else if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    };
    Ok(ExpansionFit {
        coeffs: c,
        points: fit_points(p),
        f2_target,
        f3_target,
        f2_error: rel(c[2], f2_target),
        f3_error: rel(c[3], f3_target),
    })
}

/// Residual of `Δ₀(xf) = xg − 2∂ₓf` on the interior grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutedIdentity {
    pub residual: f64,
    /// Where the largest residual occurs.
    pub at: f64,
}

/// Evaluates the left side with the solver's own second-order stencil applied
/// to `x f` and the right side with a fourth-order centered `∂ₓ`, on
/// `2 ≤ i ≤ M−2`.
pub fn commuted_identity_check(p: &ModeProblem, sol: &ModeSolution) -> Result<CommutedIdentity, LaplacianError> {
    if sol.f.len() != p.rhs.len() {
        return Err(LaplacianError::GridMismatch);
    }
    let m = p.intervals();
    let h = p.step();
    let x = p.grid();
    let xf: Vec<f64> = x.iter().zip(&sol.f).map(|(x, f)| x * f).collect();
    let lhs = apply_operator(p, &xf);
    let f = &sol.f;
    let mut worst = CommutedIdentity { residual: 0.0, at: 0.0 };
    for i in 2..=m - 2 {
        let df = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
        let r = (lhs[i] - (x[i] * p.rhs[i] - 2.0 * df)).abs();
        if r > worst.residual {
            worst = CommutedIdentity { residual: r, at: x[i] };
        }
    }
    Ok(worst)
}

/// Errors against `f* = sin(πx)` for `g = (π² + λ² + n²x²) sin(πx)` at `M`
/// and `2M` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedStudy {
    pub intervals: [usize; 2],
    pub errors: [f64; 2],
    pub order: f64,
}

pub fn manufactured_study(lambda: f64, n: i64, intervals: usize) -> Result<ManufacturedStudy, LaplacianError> {
    let mut errors = [0.0; 2];
    let sizes = [intervals, 2 * intervals];
    for (slot, &m) in errors.iter_mut().zip(&sizes) {
        let nn = (n * n) as f64;
        let p = ModeProblem::from_fn(lambda, n, BoundaryCondition::Dirichlet, m, |x| {
            (PI * PI + lambda * lambda + nn * x * x) * (PI * x).sin()
        })?;
        let s = solve_mode(&p)?;
        *slot = s
            .x
            .iter()
            .zip(&s.f)
            .map(|(x, f)| (f - (PI * x).sin()).abs())
            .fold(0.0, f64::max);
    }
    Ok(ManufacturedStudy {
        intervals: sizes,
        errors,
        order: observed_order(errors[0], errors[1], 2.0),
    })
}
