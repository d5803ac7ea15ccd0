//! Dense complex linear algebra used across the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Basis states of a tensor
//! product map to rows with the leftmost factor most significant, so
//! `|a> (x) |b>` of an `N^2` space sits at row `(a-1)*N + (b-1)` (0-based).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{BraidError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Environment variable that overrides [`Budget::max_dense_dim`].
pub const MAX_DIM_ENV: &str = "BRAIDLAB_MAX_DIM";

/// Size limits for operator construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest dimension that may be materialized densely.
    pub max_dense_dim: usize,
    /// Largest number of stored entries in a sparse operator.
    pub max_sparse_entries: usize,
    /// Largest closed subspace handed to the block eigensolver.
    pub max_block_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_dense_dim: 4096,
            max_sparse_entries: 1_000_000,
            max_block_dim: 1024,
        }
    }
}

impl Budget {
    /// Default budget with `BRAIDLAB_MAX_DIM` applied when it parses.
    pub fn from_env() -> Self {
        let mut budget = Self::default();
        if let Some(dim) = std::env::var(MAX_DIM_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            budget.max_dense_dim = dim;
        }
        budget
    }

    pub fn check_dense(&self, dim: usize) -> Result<()> {
        if dim > self.max_dense_dim {
            return Err(BraidError::Resource {
                what: "dense dimension N^r".into(),
                requested: dim,
                limit: self.max_dense_dim,
            });
        }
        Ok(())
    }

    pub fn check_sparse(&self, entries: usize) -> Result<()> {
        if entries > self.max_sparse_entries {
            return Err(BraidError::Resource {
                what: "sparse entries".into(),
                requested: entries,
                limit: self.max_sparse_entries,
            });
        }
        Ok(())
    }

    pub fn check_block(&self, dim: usize) -> Result<()> {
        if dim > self.max_block_dim {
            return Err(BraidError::Resource {
                what: "closed subspace dimension".into(),
                requested: dim,
                limit: self.max_block_dim,
            });
        }
        Ok(())
    }
}

/// `base^exp` with overflow reported as a resource error.
pub fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or_else(|| BraidError::Resource {
            what: format!("{base}^{exp}"),
            requested: usize::MAX,
            limit: usize::MAX,
        })?;
    }
    Ok(acc)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Max-absolute-entry norm.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Elementary matrix `(row col)` of size `n x n`, indices 1-based.
pub fn unit(n: usize, row: usize, col: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(row - 1, col - 1)] = ONE;
    m
}

/// Eigenvalues of a general complex matrix.
///
/// Hermitian input goes to the Hermitian solver. Otherwise the Schur
/// iteration is capped; if it stalls, it is retried on `Q^H M Q` for a
/// fixed pseudo-random unitary `Q`, which breaks the exact symmetries that
/// can trap the shifted QR sweep.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if *m == m.adjoint() {
        let eig = m.clone().symmetric_eigenvalues();
        return Ok(eig.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    }
    let max_iter = 200 * n.max(10);
    if let Some(schur) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        return Ok(schur_diagonal(schur));
    }
    let q = fixed_unitary(n);
    let conj = q.adjoint() * m * &q;
    nalgebra::linalg::Schur::try_new(conj, f64::EPSILON, max_iter)
        .map(schur_diagonal)
        .ok_or_else(|| BraidError::Numerical(format!("Schur iteration did not converge for {n}x{n} matrix")))
}

fn schur_diagonal(schur: nalgebra::linalg::Schur<Complex64, nalgebra::Dyn>) -> Vec<Complex64> {
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Unitary factor of a seeded random complex matrix.
fn fixed_unitary(n: usize) -> ComplexMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    g.qr().q()
}

/// Orthonormal basis of the numerical null space of `m`.
///
/// Singular values at or below `tol` count as zero.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    let n = m.ncols();
    // Pad to square so the SVD returns a full right basis.
    let square = if m.nrows() < n {
        let mut padded = ComplexMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(k, _)| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect()
}

/// The `count` right singular vectors of a square `m` with the smallest
/// singular values, with those values.
pub fn smallest_singular_vectors(m: &ComplexMatrix, count: usize) -> Vec<(f64, Vec<Complex64>)> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    order
        .into_iter()
        .take(count)
        .map(|k| (svd.singular_values[k], v_t.row(k).iter().map(|z| z.conj()).collect()))
        .collect()
}

/// Inverse through LU, reporting a numerically singular input.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let u = lu.u();
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if pivot <= scale * 1e-13 * n as f64 {
        return Err(BraidError::Numerical(format!(
            "matrix is singular to working precision (smallest pivot {pivot:e})"
        )));
    }
    lu.try_inverse()
        .ok_or_else(|| BraidError::Numerical("LU inverse failed".into()))
}

/// Rescale so the largest-modulus coefficient becomes exactly 1.
pub fn normalize_max_coefficient(v: &mut [Complex64]) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ZERO);
    if pivot.norm() > 0.0 {
        for z in v.iter_mut() {
            *z /= pivot;
        }
        // Remove rounding on the pivot itself.
        if let Some(p) = v.iter_mut().find(|z| (**z - ONE).norm() < 1e-15) {
            *p = ONE;
        }
    }
}

/// Lexicographic (re, im) order used for canonical eigenvalue multisets.
pub fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_cyclic_shift_are_roots_of_unity() {
        let n = 5;
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            m[((k + 1) % n, k)] = ONE;
        }
        let eig = eigenvalues(&m).unwrap();
        for z in &eig {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - ONE).norm() < 1e-11);
        }
        let sum: Complex64 = eig.iter().sum();
        assert!(sum.norm() < 1e-12);
    }

    #[test]
    fn hermitian_and_stalling_inputs() {
        // Real symmetric with a degenerate spectrum {0, 0, 2}.
        let mut m = ComplexMatrix::zeros(3, 3);
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            m[(r, c)] = ONE;
        }
        let mut eig = eigenvalues(&m).unwrap();
        eig.sort_by(lex_cmp);
        assert!(eig[0].norm() < 1e-14 && eig[1].norm() < 1e-14);
        assert!((eig[2] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        let q = fixed_unitary(4);
        assert!(max_abs_diff(&(q.adjoint() * &q), &identity(4)) < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m[(0, 0)] = ONE;
        m[(0, 1)] = ONE;
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let x = &m * nalgebra::DVector::from_vec(v);
            assert!(x.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = ComplexMatrix::zeros(2, 2);
        assert!(matches!(inverse(&m), Err(BraidError::Numerical(_))));
        let inv = inverse(&(identity(3) * Complex64::new(2.0, 0.0))).unwrap();
        assert!((inv[(1, 1)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn budget_rejects_oversize() {
        let b = Budget::default();
        assert!(b.check_dense(4096).is_ok());
        assert!(matches!(b.check_dense(4097), Err(BraidError::Resource { .. })));
        assert_eq!(checked_pow(3, 4).unwrap(), 81);
    }
}
