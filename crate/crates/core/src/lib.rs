//! Numerical construction and verification of folded hyperkähler structures.
//!
//! * [`frame`]: exterior algebra on the Heisenberg model and its thickening.
//! * [`nahm`]: the Nahm flow of s-dependent frame fields, metric reconstruction
//!   and the identities the reconstructed triple satisfies.
//! * [`laplacian`]: mode-by-mode folded Laplacian boundary-value problems.
//! * [`cotangent`]: fiberwise identities of the disc-bundle model over a
//!   hyperbolic surface.

pub mod cotangent;
pub mod frame;
pub mod laplacian;
pub mod nahm;
pub mod numerics;
