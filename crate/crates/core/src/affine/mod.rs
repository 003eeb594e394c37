//! Affine forward-variance models: `dX = −½v dt + √v dZ`,
//! `dξ_t(u) = κ(u−t)√v_t dW_t`, `d⟨Z,W⟩ = ρ dt`.
//!
//! Every diamond tree in `X` and `ζ_t(T) = ∫_T^{T+Δ} ξ_t(u) du` has the form
//! `∫_t^T ξ_t(u) h(T−u) du`, and the joint MGF of `(X_T, ⟨X⟩_{t,T}, ζ_T)` is
//! driven by a convolution Riccati equation.

mod curve;
mod grid;
mod kernel;
mod riccati;
mod trees;

pub use curve::ForwardVarianceCurve;
pub use grid::{ConvolutionWeights, TauGrid};
pub use kernel::{kappa_bar, KernelSpec};
pub use riccati::{mgf_value, solve_riccati, RiccatiOptions, RiccatiSolution};
pub use trees::{
    spx_expansion_terms, spx_expansion_value, tree_h, AffinePoint, AffineSetup, AffineState,
    AffineTrees, HFunction,
};
