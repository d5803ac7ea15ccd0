//! Multiparameter `N^2 x N^2` braid matrices built on nested-sequence
//! projectors, and the exactly solvable lattice models they generate.
//!
//! * [`params`] — free parameters `m_ab^(eps)` and their symmetries.
//! * [`projectors`] — the complete orthogonal projector basis.
//! * [`braid`] — `R_hat(theta)`, `R(theta)` and their certificates.
//! * [`transfer`] — monodromy blocks and the transfer matrix `T^(r)`.
//! * [`spectrum`] — closed-form spectra, the dense oracle and the multiplet census.
//! * [`spinchain`] — Hamiltonians and conserved quantities.
//! * [`smatrix`] — inverse Cayley transform and scattering potentials.
//! * [`cli`] — the `braidlab` command-line front end.

pub mod braid;
pub mod cli;
pub mod error;
pub mod json;
pub mod linalg;
pub mod params;
pub mod projectors;
pub mod smatrix;
pub mod sparse;
pub mod spectrum;
pub mod spinchain;
pub mod transfer;

pub use error::{BraidError, Result};
pub use linalg::{Budget, ComplexMatrix};
pub use params::{Eps, ParamKey, ParamSet, Parity, RandomOptions};
pub use sparse::SparseOperator;
