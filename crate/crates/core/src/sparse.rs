//! Sparse complex operators on `N^r`-dimensional tensor-product spaces.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BraidError, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Square sparse operator; entries keyed by 0-based `(row, col)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseOperator {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for k in 0..dim {
            op.entries.insert((k, k), Complex64::new(1.0, 0.0));
        }
        op
    }

    /// Stored entries with `|z| > drop_tol` from a dense matrix.
    pub fn from_dense(m: &ComplexMatrix, drop_tol: f64) -> Self {
        assert!(m.is_square(), "operator must be square");
        let mut op = Self::zeros(m.nrows());
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if z.norm() > drop_tol {
                    op.entries.insert((r, c), z);
                }
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or(ZERO)
    }

    /// Accumulate into `(row, col)`; an entry that sums to exactly zero is removed.
    pub fn add_to(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "index out of range");
        let slot = self.entries.entry((row, col)).or_insert(ZERO);
        *slot += value;
        if *slot == ZERO {
            self.entries.remove(&(row, col));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (&(r, c), &z) in &self.entries {
            m[(r, c)] = z;
        }
        m
    }

    /// Drop entries with `|z| <= tol`.
    pub fn prune(&mut self, tol: f64) {
        self.entries.retain(|_, z| z.norm() > tol);
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), &z)| ((c, r), z)).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zeros(self.dim);
        for (&(r, c), &z) in &self.entries {
            out.add_to(r, c, z * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        for (&(r, c), &z) in &other.entries {
            out.add_to(r, c, z);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut rows_of_other: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for (&(r, c), &z) in &other.entries {
            rows_of_other[r].push((c, z));
        }
        let mut out = Self::zeros(self.dim);
        for (&(r, k), &a) in &self.entries {
            for &(c, b) in &rows_of_other[k] {
                out.add_to(r, c, a * b);
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Kronecker product `self (x) other`; `self` is the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.dim * other.dim);
        for (&(r1, c1), &a) in &self.entries {
            for (&(r2, c2), &b) in &other.entries {
                out.add_to(r1 * other.dim + r2, c1 * other.dim + c2, a * b);
            }
        }
        out
    }

    /// Lift a two-site operator on `V (x) V` to `V^{(x) r}`, acting with its
    /// first factor on site `first` and its second on site `second`
    /// (0-based, distinct, any order).
    pub fn embed_two_site(local: &Self, n_states: usize, r: usize, first: usize, second: usize) -> Self {
        assert_eq!(local.dim, n_states * n_states, "local operator must act on V (x) V");
        assert!(first < r && second < r && first != second, "invalid site pair");
        let dim = n_states.pow(r as u32);
        let weight = |site: usize| n_states.pow((r - 1 - site) as u32);
        let (w1, w2) = (weight(first), weight(second));
        let mut columns: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); local.dim];
        for (&(row, col), &z) in &local.entries {
            columns[col].push((row, z));
        }
        let mut out = Self::zeros(dim);
        for state in 0..dim {
            let d1 = (state / w1) % n_states;
            let d2 = (state / w2) % n_states;
            let rest = state - d1 * w1 - d2 * w2;
            for &(row, z) in &columns[d1 * n_states + d2] {
                let (e1, e2) = (row / n_states, row % n_states);
                out.add_to(rest + e1 * w1 + e2 * w2, state, z);
            }
        }
        out
    }

    /// Number of stored entries in each column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for &(_, c) in self.entries.keys() {
            counts[c] += 1;
        }
        counts
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut out = vec![ZERO; self.dim];
        for (&(r, c), &z) in &self.entries {
            out[r] += z * v[c];
        }
        out
    }

    pub fn to_doc(&self) -> SparseDoc {
        SparseDoc {
            dim: self.dim,
            triplets: self
                .entries
                .iter()
                .map(|(&(r, c), z)| Triplet(r + 1, c + 1, z.re, z.im))
                .collect(),
        }
    }

    pub fn from_doc(doc: &SparseDoc) -> Result<Self> {
        let mut op = Self::zeros(doc.dim);
        for t in &doc.triplets {
            let Triplet(r, c, re, im) = *t;
            if r == 0 || c == 0 || r > doc.dim || c > doc.dim {
                return Err(BraidError::Domain(format!(
                    "triplet index ({r}, {c}) outside 1..={}",
                    doc.dim
                )));
            }
            op.add_to(r - 1, c - 1, Complex64::new(re, im));
        }
        Ok(op)
    }
}

/// Wire form: 1-based `[row, col, re, im]` triplets in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseDoc {
    pub dim: usize,
    pub triplets: Vec<Triplet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet(pub usize, pub usize, pub f64, pub f64);
