//! The Nahm/Ashtekar flow `dV₁/dx + [V₂, V₃] = 0` (and cyclic) for
//! volume-preserving s-dependent frame fields, and the folded hyperkähler
//! triple it generates.

mod asymptotics;
mod bryant;
mod flow;
mod reconstruct;

pub use asymptotics::{fold_asymptotics, FoldReport, QUATERNION_SIGNS};
pub use bryant::{bryant_normalize, BryantCoframe};
pub use flow::{
    flow_self_convergence, integrate, nahm_rhs, parity_check, FlowConvergence, ParityResiduals,
    Trajectory,
};
pub use reconstruct::{
    closedness_residual, conformal_factor, contract_volume, reconstruct, wedge_identity_residual,
    HKTriple, MetricField,
};

use crate::frame::{FrameError, InvariantVectorField, SField};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NahmError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("initial data must have V1 = 0 and volume-preserving V2, V3: {0}")]
    InvalidInitialData(String),
    #[error("solution exceeded the blow-up bound {bound} after x = {last_valid_x}")]
    BlowUp { last_valid_x: f64, bound: f64 },
    #[error("trajectory does not cover a symmetric range around x = 0")]
    AsymmetricRange,
    #[error("coefficient matrix is singular at x = {x} (min |mu| = {min_mu:e})")]
    SingularFrame { x: f64, min_mu: f64 },
    #[error("too few grid points near the fold ({points}); need at least {needed}")]
    InsufficientResolution { points: usize, needed: usize },
    #[error("kernels of the fold data degenerate")]
    DegenerateKernel,
    #[error("kernels of the fold data do not span a contact distribution (min |det| = {min_det:e})")]
    NonContact { min_det: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// `(V₁, V₂, V₃)` at fold coordinate `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct NahmState {
    pub x: f64,
    pub v: [InvariantVectorField; 3],
}

impl NahmState {
    pub fn modes(&self) -> usize {
        self.v[0].modes()
    }

    /// Largest collocation-grid magnitude over all nine coefficient profiles.
    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(0.0, |m, v| m.max(v.max_abs()))
    }

    /// The flat Heisenberg datum `(0, X₂, X₃)` at `x = 0`.
    pub fn model(modes: usize) -> Self {
        Self {
            x: 0.0,
            v: [
                InvariantVectorField::zero(modes),
                InvariantVectorField::frame(modes, 1),
                InvariantVectorField::frame(modes, 2),
            ],
        }
    }

    pub fn zero(modes: usize) -> Self {
        Self {
            x: 0.0,
            v: [
                InvariantVectorField::zero(modes),
                InvariantVectorField::zero(modes),
                InvariantVectorField::zero(modes),
            ],
        }
    }

    /// `V₁ = 0`, `V₂ = X₂ + ε p X₃ + q X₁`, `V₃ = X₃ + r X₁` at `x = 0`.
    pub fn from_perturbation(epsilon: f64, p: &SField, q: &SField, r: &SField) -> Self {
        let n = p.len();
        Self {
            x: 0.0,
            v: [
                InvariantVectorField::zero(n),
                InvariantVectorField::new(q.clone(), SField::constant(n, 1.0), p.scale(epsilon)),
                InvariantVectorField::new(r.clone(), SField::zeros(n), SField::constant(n, 1.0)),
            ],
        }
    }

    /// The standard perturbed datum: `p = sin(2πs)`, `q = 0`,
    /// `r = ε cos(2πs) / 2π`, so that `−[V₂(0), V₃(0)] = (1 + ε sin 2πs) X₁`.
    ///
    /// The exact solution is `V₁ = (x + r̂ sinh(2πx) sin 2πs) X₁`, `V₂ = V₂(0)`,
    /// `V₃ = X₃ + r̂ cosh(2πx) cos(2πs) X₁` with `r̂ = ε / 2π`.
    pub fn perturbed(modes: usize, epsilon: f64) -> Self {
        let p = SField::sin_mode(modes, 1, 1.0);
        let q = SField::zeros(modes);
        let r = SField::cos_mode(modes, 1, epsilon / (2.0 * PI));
        Self::from_perturbation(epsilon, &p, &q, &r)
    }

    /// `−[V₂, V₃]`, the leading slope of `V₁` at the fold.
    pub fn reeb_field(&self) -> InvariantVectorField {
        crate::frame::lie_bracket(&self.v[1], &self.v[2]).scale(-1.0)
    }
}

/// Step and range for the fixed-step RK4 integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub step: f64,
    pub x_max: f64,
    pub modes: usize,
    /// Integrate on `[−x_max, x_max]` instead of `[0, x_max]`.
    pub symmetric: bool,
    /// Abort once any coefficient exceeds this magnitude.
    pub blowup_bound: f64,
    /// Fourier coefficients below this modulus are zeroed after every step.
    ///
    /// The Cauchy problem at the fold amplifies mode `k` like `e^{2π|k|x}`, so
    /// unfiltered round-off in the top modes swamps the solution within a
    /// fraction of the unit interval. Set to 0 to disable.
    pub noise_filter: f64,
}

impl FlowConfig {
    pub fn new(step: f64, x_max: f64, modes: usize) -> Self {
        Self {
            step,
            x_max,
            modes,
            symmetric: true,
            blowup_bound: 1e6,
            noise_filter: 1e-13,
        }
    }

    /// Number of steps on each side of the fold.
    pub fn steps(&self) -> Result<usize, NahmError> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(NahmError::InvalidConfig(format!("step must be positive, got {}", self.step)));
        }
        if !(self.x_max > 0.0) || !self.x_max.is_finite() {
            return Err(NahmError::InvalidConfig(format!("x_max must be positive, got {}", self.x_max)));
        }
        let ratio = self.x_max / self.step;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return Err(NahmError::InvalidConfig(format!(
                "step {} does not divide x_max {}",
                self.step, self.x_max
            )));
        }
        if !self.modes.is_power_of_two() || self.modes < 4 {
            return Err(NahmError::InvalidConfig(format!(
                "s-mode count must be a power of two >= 4, got {}",
                self.modes
            )));
        }
        if !(self.noise_filter >= 0.0) || !self.noise_filter.is_finite() {
            return Err(NahmError::InvalidConfig("noise filter must be non-negative".into()));
        }
        if !(self.blowup_bound > 0.0) {
            return Err(NahmError::InvalidConfig("blow-up bound must be positive".into()));
        }
        Ok(steps as usize)
    }
}
