use super::{solve_mode, BoundaryCondition, LaplacianError, ModeProblem, ModeSolution};
use crate::numerics::trapezoid;

/// Fold condition for entry `(row, col)` (0-based) of the mode matrix:
/// Neumann on the off-diagonal entries of the first row and column,
/// Dirichlet everywhere else.
pub fn entry_condition(row: usize, col: usize) -> BoundaryCondition {
    if row != col && (row == 0 || col == 0) {
        BoundaryCondition::Neumann
    } else {
        BoundaryCondition::Dirichlet
    }
}

/// Solutions of `Δ₀ f_{ij} = x v_{ij}` for every entry of a symmetric
/// trace-free 3×3 matrix of profiles at one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledModes {
    pub lambda: f64,
    pub n: i64,
    pub entries: [[ModeSolution; 3]; 3],
    pub conditions: [[BoundaryCondition; 3]; 3],
}

pub fn dn_assemble(v: &[[Vec<f64>; 3]; 3], lambda: f64, n: i64) -> Result<AssembledModes, LaplacianError> {
    let len = v[0][0].len();
    if v.iter().flatten().any(|p| p.len() != len) {
        return Err(LaplacianError::GridMismatch);
    }
    let scale = v.iter().flatten().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale.max(1.0);
    let trace = (0..len)
        .map(|i| (v[0][0][i] + v[1][1][i] + v[2][2][i]).abs())
        .fold(0.0, f64::max);
    if trace > tol {
        return Err(LaplacianError::NonzeroTrace { max: trace });
    }
    for row in 0..3 {
        for col in row + 1..3 {
            if v[row][col].iter().zip(&v[col][row]).any(|(a, b)| (a - b).abs() > tol) {
                return Err(LaplacianError::Asymmetric { row, col });
            }
        }
    }
    let probe = ModeProblem::new(lambda, n, BoundaryCondition::Dirichlet, v[0][0].clone())?;
    if probe.is_zero_mode() {
        let x = probe.grid();
        for col in 1..3 {
            let weighted: Vec<f64> = x.iter().zip(&v[0][col]).map(|(x, g)| x * g).collect();
            let integral = trapezoid(&weighted, probe.step());
            if integral.abs() > 1e-10 * scale.max(1.0) {
                return Err(LaplacianError::Incompatible { row: 0, col, integral });
            }
        }
    }
    let conditions: [[BoundaryCondition; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| entry_condition(r, c)));
    let solve = |r: usize, c: usize| -> Result<ModeSolution, LaplacianError> {
        let p = ModeProblem::new(lambda, n, conditions[r][c], v[r][c].clone())?.folded();
        solve_mode(&p)
    };
    let mut rows = Vec::with_capacity(3);
    for r in 0..3 {
        rows.push([solve(r, 0)?, solve(r, 1)?, solve(r, 2)?]);
    }
    let entries: [[ModeSolution; 3]; 3] = rows.try_into().map_err(|_| LaplacianError::GridMismatch)?;
    Ok(AssembledModes {
        lambda,
        n,
        entries,
        conditions,
    })
}
