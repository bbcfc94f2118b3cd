//! Generalized frames (g-frames) on finite-dimensional complex Hilbert spaces.
//!
//! A g-frame is a finite family of operator blocks `Λ_j : ℂⁿ → ℂ^{m_j}` whose
//! frame operator `S = Σ Λ_j* Λ_j` is positive definite. The crate computes
//! canonical duals and tight transforms, classifies families (Bessel, complete,
//! frame, tight, Riesz, orthonormal, exact), analyses element removal, builds
//! stable space splittings and atomic operator resolutions, and provides
//! generators for the standard examples.
//!
//! With the default `parallel` feature the per-element loops run on rayon;
//! results are merged in element order, so outputs do not depend on the
//! thread count.

pub mod classify;
pub mod cli;
pub mod duality;
pub mod error;
pub mod excess;
pub mod generators;
pub mod gframe;
pub mod induced;
pub mod io;
pub mod linalg;
mod par;
pub mod resolution;
pub mod splitting;
pub mod tol;

pub use error::{Error, Result};
pub use gframe::{CoefficientFamily, FrameBounds, FrameOperatorMatrix, GFrame};
pub use linalg::{ComplexMatrix, C64};
pub use tol::Tolerances;
