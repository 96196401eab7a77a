//! Mode blocks `Δ₀ = −∂ₓ² + λ² + n²x²` of the folded Laplacian on `[0, 1]`,
//! with a Dirichlet or Neumann condition at the fold and Dirichlet at `x = 1`.

mod assembly;
mod checks;
mod solver;

pub use assembly::{dn_assemble, entry_condition, AssembledModes};
pub use checks::{
    commuted_identity_check, energy_check, expansion_fit, manufactured_study, CommutedIdentity,
    ExpansionFit, ManufacturedStudy,
};
pub use solver::{apply_operator, solve_mode, system_residual};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaplacianError {
    #[error("mode (lambda = {lambda}, n = {n}) violates |n| <= lambda^2")]
    FrequencyConstraint { lambda: f64, n: i64 },
    #[error("lambda must be finite and non-negative, got {0}")]
    InvalidLambda(f64),
    #[error("grid has {intervals} intervals; at least 16 are required")]
    GridTooCoarse { intervals: usize },
    #[error("right-hand side contains non-finite values")]
    NonFinite,
    #[error("tridiagonal system is singular")]
    Singular,
    #[error("near-fold fit is ill-conditioned ({points} points)")]
    IllConditionedFit { points: usize },
    #[error("the (0, 0) mode has no energy weight")]
    ZeroMode,
    #[error("trace of the mode matrix is not zero (max |tr| = {max:e})")]
    NonzeroTrace { max: f64 },
    #[error("mode matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("Neumann entry ({row}, {col}) of the (0, 0) mode is incompatible: integral {integral:e}")]
    Incompatible { row: usize, col: usize, integral: f64 },
    #[error("profiles have mismatched lengths")]
    GridMismatch,
}

/// Condition imposed at the fold `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// One block `Δ₀ f = g` on the uniform grid `x_i = i / M`, `i = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProblem {
    pub lambda: f64,
    pub n: i64,
    pub bc0: BoundaryCondition,
    pub rhs: Vec<f64>,
}

impl ModeProblem {
    pub fn new(lambda: f64, n: i64, bc0: BoundaryCondition, rhs: Vec<f64>) -> Result<Self, LaplacianError> {
        let p = Self { lambda, n, bc0, rhs };
        p.validate()?;
        Ok(p)
    }

    /// Builds the right-hand side from a function of `x` on `M + 1` points.
    pub fn from_fn(
        lambda: f64,
        n: i64,
        bc0: BoundaryCondition,
        intervals: usize,
        g: impl Fn(f64) -> f64,
    ) -> Result<Self, LaplacianError> {
        let rhs = (0..=intervals).map(|i| g(i as f64 / intervals as f64)).collect();
        Self::new(lambda, n, bc0, rhs)
    }

    pub fn validate(&self) -> Result<(), LaplacianError> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(LaplacianError::InvalidLambda(self.lambda));
        }
        if (self.n.unsigned_abs() as f64) > self.lambda * self.lambda {
            return Err(LaplacianError::FrequencyConstraint {
                lambda: self.lambda,
                n: self.n,
            });
        }
        if self.rhs.len() < 17 {
            return Err(LaplacianError::GridTooCoarse {
                intervals: self.rhs.len().saturating_sub(1),
            });
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(LaplacianError::NonFinite);
        }
        Ok(())
    }

    pub fn intervals(&self) -> usize {
        self.rhs.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let m = self.intervals();
        (0..=m).map(|i| i as f64 / m as f64).collect()
    }

    /// `V(x) = λ² + n²x²`.
    pub fn potential(&self, x: f64) -> f64 {
        let n = self.n as f64;
        self.lambda * self.lambda + n * n * x * x
    }

    pub fn is_zero_mode(&self) -> bool {
        self.lambda == 0.0 && self.n == 0
    }

    /// The same mode with right-hand side `x·g`, i.e. the folded equation `Δf = g`.
    pub fn folded(&self) -> Self {
        let rhs = self.grid().iter().zip(&self.rhs).map(|(x, g)| x * g).collect();
        Self { rhs, ..self.clone() }
    }
}

/// Both sides of `∫|f′|² + ½∫V|f|² ≤ ½∫|g|²/V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySides {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Discrete solution with its near-fold cubic fit and energy balance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// `(f₀, f₁, f₂, f₃)` from a least-squares fit on the first `⌈M/8⌉` points;
    /// `None` when the window is too short.
    pub expansion: Option<[f64; 4]>,
    /// `None` for the `(0, 0)` mode.
    pub energy: Option<EnergySides>,
}
