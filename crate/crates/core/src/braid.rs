//! The braid matrix `R_hat(theta)`, the Yang-Baxter matrix `R = P R_hat`
//! and numerical certificates for the braid, Yang-Baxter and unitarity
//! relations.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{identity, max_abs_diff, ComplexMatrix, ONE, ZERO};
use crate::params::{Eps, ParamSet};
use crate::projectors::{all_labels, projector};
use crate::sparse::SparseOperator;

/// `sum_P g(m_P) P` over the full projector set, where `m_P` is the
/// exponent attached to `P` (the central exponent for `P_nn`).
pub fn projector_sum(p: &ParamSet, g: impl Fn(Complex64) -> Complex64) -> Result<ComplexMatrix> {
    let n = p.n_states();
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for label in all_labels(n)? {
        let coeff = g(p.slot_value(label.slot()));
        if coeff != ZERO {
            out += projector(&label)? * coeff;
        }
    }
    Ok(out)
}

/// `R_hat(theta) = sum e^{m theta} P`.
pub fn rhat(p: &ParamSet, theta: Complex64) -> ComplexMatrix {
    projector_sum(p, |m| (m * theta).exp()).expect("a validated ParamSet has valid labels")
}

/// Coefficients `(f+, f-)` of `R_hat |ab> = f+ |ab> + f- |a_bar b_bar>`.
///
/// For the central state `|nn>` of odd `N` the two terms coincide and the
/// caller must add them.
pub fn two_site_coefficients(p: &ParamSet, a: usize, b: usize, theta: Complex64) -> (Complex64, Complex64) {
    let plus = (p.lookup(a, b, Eps::Plus) * theta).exp();
    let minus = (p.lookup(a, b, Eps::Minus) * theta).exp();
    ((plus + minus) * 0.5, (plus - minus) * 0.5)
}

/// Factor swap `P = sum (ab) (x) (ba)`.
pub fn permutation_matrix(n_states: usize) -> ComplexMatrix {
    let dim = n_states * n_states;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for a in 0..n_states {
        for b in 0..n_states {
            m[(b * n_states + a, a * n_states + b)] = ONE;
        }
    }
    m
}

/// `R(theta) = P R_hat(theta)`.
pub fn r_matrix(p: &ParamSet, theta: Complex64) -> ComplexMatrix {
    permutation_matrix(p.n_states()) * rhat(p, theta)
}

/// A residual in the max-entry norm, raw and divided by the magnitude guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub raw: f64,
    pub scaled: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(raw: f64, scale: f64) -> Self {
        let scale = scale.max(1.0);
        Self {
            raw,
            scaled: raw / scale,
            scale,
        }
    }
}

/// Largest `|e^{m theta}|` over every exponent in use.
pub fn exp_magnitude(p: &ParamSet, theta: Complex64) -> f64 {
    let layout = p.layout();
    (0..layout.slot_count())
        .map(|s| (p.slot_value(s) * theta).exp().norm())
        .fold(1.0, f64::max)
}

fn lifted(p: &ParamSet, local: &ComplexMatrix, r: usize, first: usize, second: usize) -> SparseOperator {
    SparseOperator::embed_two_site(&SparseOperator::from_dense(local, 0.0), p.n_states(), r, first, second)
}

/// `R_hat12(t) R_hat23(t+t') R_hat12(t') - R_hat23(t') R_hat12(t+t') R_hat23(t)` on `V^{(x) 3}`.
pub fn braid_residual(p: &ParamSet, theta: Complex64, theta2: Complex64) -> Residual {
    let sum = theta + theta2;
    let (a, b, c) = (rhat(p, theta), rhat(p, sum), rhat(p, theta2));
    let lhs = lifted(p, &a, 3, 0, 1)
        .matmul(&lifted(p, &b, 3, 1, 2))
        .matmul(&lifted(p, &c, 3, 0, 1));
    let rhs = lifted(p, &c, 3, 1, 2)
        .matmul(&lifted(p, &b, 3, 0, 1))
        .matmul(&lifted(p, &a, 3, 1, 2));
    let scale = exp_magnitude(p, theta) * exp_magnitude(p, sum) * exp_magnitude(p, theta2);
    Residual::new(lhs.max_abs_diff(&rhs), scale)
}

/// `R12(t) R13(t+t') R23(t') - R23(t') R13(t+t') R12(t)` with `R = P R_hat`.
pub fn ybe_residual(p: &ParamSet, theta: Complex64, theta2: Complex64) -> Residual {
    let sum = theta + theta2;
    let (a, b, c) = (r_matrix(p, theta), r_matrix(p, sum), r_matrix(p, theta2));
    let lhs = lifted(p, &a, 3, 0, 1)
        .matmul(&lifted(p, &b, 3, 0, 2))
        .matmul(&lifted(p, &c, 3, 1, 2));
    let rhs = lifted(p, &c, 3, 1, 2)
        .matmul(&lifted(p, &b, 3, 0, 2))
        .matmul(&lifted(p, &a, 3, 0, 1));
    let scale = exp_magnitude(p, theta) * exp_magnitude(p, sum) * exp_magnitude(p, theta2);
    Residual::new(lhs.max_abs_diff(&rhs), scale)
}

/// `R_hat(theta) R_hat(theta)^dagger - I` for real `theta`.
pub fn unitarity_residual(p: &ParamSet, theta: f64) -> Residual {
    let m = rhat(p, Complex64::new(theta, 0.0));
    let prod = &m * m.adjoint();
    let scale = exp_magnitude(p, Complex64::new(theta, 0.0)).powi(2);
    Residual::new(max_abs_diff(&prod, &identity(m.nrows())), scale)
}
