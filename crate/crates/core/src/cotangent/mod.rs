//! The folded model on the unit disc bundle of `T*Σ`, restricted to the fiber
//! over one base point: the Kähler form `ω₁`, the Hitchin deformation fields,
//! and the invariant polynomials `p_n = ∫ wⁿ ω₁` with their first variation.
//!
//! The fiber chart is `w = r e^{iφ}` with connection form `η = dφ`; on the
//! base `dη = −ω_Σ`, which only enters through the sign convention below.

mod invariants;
mod model;
mod quadrature;

pub use invariants::{
    extension_variation_form, finite_variation_slope, invariant_polynomial, variation_form,
    variation_of_invariants, FiberForm,
};
pub use model::{
    contract_xi_omega, dbar_extension, deformation_identity_residual, harmonic_extension, omega1,
    phi_profile, xi_field, Deformation,
};
pub use quadrature::{weight_moment, FiberChart};

use thiserror::Error;

/// `dη = DETA_SIGN · ω_Σ`.
pub const DETA_SIGN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CotangentError {
    #[error("radius {0} outside the open unit interval")]
    Domain(f64),
    #[error("the m = 0 field is singular at the zero section")]
    SingularAtZeroSection,
    #[error("frequency must be positive, got {0}")]
    InvalidFrequency(i64),
    #[error("invalid fiber grid: {0}")]
    InvalidGrid(String),
    #[error("amplitude or normalization is not finite")]
    NonFinite,
    #[error("deformation frequency {m} exceeds the requested range {nmax}")]
    FrequencyOutOfRange { m: u32, nmax: u32 },
    #[error("orthogonal-polynomial recurrence broke down at degree {0}")]
    Quadrature(usize),
}
