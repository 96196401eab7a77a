//! Exterior algebra and frame calculus on the flat Heisenberg model.
//!
//! The frame `(X₁, X₂, X₃)` has the single nontrivial bracket
//! `[X₂, X₃] = −X₁`; dually `dθ¹ = θ²∧θ³` and `dθ² = dθ³ = 0`. All
//! coefficients depend on one fiber coordinate `s` (with `X₂ = ∂_s`), which
//! keeps every computation algebraic in frame coefficients.

mod form;
mod metric;
mod sfield;
mod vector_field;

pub use form::{
    exterior_derivative, monomials, ordered_mask, partial_x, wedge, wedge_sign, Coframe, FormField,
    XAxis,
};
pub use metric::{
    dilation_pullback, model_kahler_forms, model_metric_g0, CoframePoint, Tensor2, dilation_weights,
};
pub use sfield::SField;
pub use vector_field::{lie_bracket, FrameAlgebra, InvariantVectorField};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("form degree {degree} exceeds the top degree 4")]
    DegreeOverflow { degree: usize },
    #[error("cannot combine forms of degree {left} and {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("operands live on different s- or x-discretizations")]
    GridMismatch,
    #[error("x-derivative requested on a form without an x-axis")]
    MissingXAxis,
    #[error("x-axis has {len} samples; finite differences need at least 4")]
    AxisTooShort { len: usize },
    #[error("x = {x} lies on the fold; the model metric is degenerate there")]
    FoldLocus { x: f64 },
    #[error("dilation factor must be positive, got {t}")]
    NonPositiveDilation { t: f64 },
}
