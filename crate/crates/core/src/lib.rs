//! Diamond-product forest expansions of conditional cumulant generating
//! functions of martingale functionals.
//!
//! * [`forest`]: exact tree/forest algebra under the root-joining diamond.
//! * [`expansion`]: the 𝕂 (cumulant) and 𝔾 (generalized forest) recursions
//!   and forest reordering.
//! * [`models`]: closed model algebras (Brownian motion, Lévy area, iterated
//!   integrals, squared Bessel, second Wiener chaos) evaluating those forests.
//! * [`affine`]: affine forward-variance models, tree kernels and the
//!   convolution Riccati solver.
//! * [`mc`]: Monte Carlo simulators and cumulant estimators used as
//!   statistical ground truth.

pub mod affine;
pub mod error;
pub mod expansion;
pub mod forest;
pub mod io;
pub mod mc;
pub mod models;

pub use error::{Error, Result};
