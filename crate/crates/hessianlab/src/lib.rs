//! hessianlab: a numerical laboratory for degenerate elliptic complex
//! Hessian operators.
//!
//! The crate provides:
//!
//! - Hermitian pencils and generalized eigenvalues with respect to a
//!   background form ([`hermitian`]);
//! - cone families (positive cone, sigma-polynomial cones, m-sum cones,
//!   interpolated two-dimensional cones) with membership, invariance and
//!   convexity checks ([`cones`]);
//! - normalized operators G(z, A) with gradients, linearizations and an
//!   axiom verification suite (homogeneity, concavity, the linearized
//!   inequality, determinant comparison) ([`operators`]);
//! - an analytic test-function corpus with exact complex Hessians plus a
//!   Wirtinger finite-difference Hessian oracle ([`fields`]);
//! - the singular-solution counterexample checks, including the linearized
//!   gap with its radius threshold ([`counterexample`]);
//! - a radial complex Monge-Ampere Dirichlet solver on the unit ball and
//!   the associated barrier comparisons ([`barrier`]);
//! - end-to-end sup-estimate and maximum-principle harnesses ([`abp`]).

pub mod abp;
pub mod barrier;
pub mod cones;
pub mod counterexample;
pub mod error;
pub mod fields;
pub mod grid;
pub mod hermitian;
pub mod operators;
pub mod report;

pub use error::{Error, Result};
pub use hermitian::{BackgroundForm, Complex64, HermitianMatrix, SpectrumVector};

/// Derive a per-sample seed from a master seed; used by the parallel sweeps
/// so results do not depend on scheduling.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 step
    let mut x = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
