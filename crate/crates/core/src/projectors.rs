//! Nested-sequence projectors on `V (x) V`, `dim V = N`.
//!
//! Every projector is rank one: `P = |phi><phi|` with
//! `phi = (|x y> + eps |x_bar y_bar>) / sqrt 2`, where `(x, y)` is
//! `(i, j)` or `(i, j_bar)`. For odd `N` the pairs involving the fixed
//! index `n` follow the same rule (`n_bar = n`), and `P_nn = |nn><nn|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{BraidError, Result};
use crate::linalg::ComplexMatrix;
use crate::sparse::SparseOperator;
use crate::params::{Eps, IndexLayout, SlotKey};

/// Label of one projector of the nested sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectorLabel {
    pub n_states: usize,
    pub i: usize,
    pub j: usize,
    /// Select `P_{i j_bar}` instead of `P_{ij}`.
    pub barred: bool,
    /// `None` only for the central `P_nn` of odd `N`.
    pub eps: Option<Eps>,
}

impl ProjectorLabel {
    pub fn pair(n_states: usize, i: usize, j: usize, barred: bool, eps: Eps) -> Self {
        Self {
            n_states,
            i,
            j,
            barred,
            eps: Some(eps),
        }
    }

    pub fn center(n_states: usize) -> Self {
        let n = n_states.div_ceil(2);
        Self {
            n_states,
            i: n,
            j: n,
            barred: false,
            eps: None,
        }
    }

    pub fn is_center(&self) -> bool {
        self.eps.is_none()
    }

    fn validate(&self) -> Result<IndexLayout> {
        let layout = IndexLayout::new(self.n_states)?;
        let n = layout.half();
        let bad = |why: &str| Err(BraidError::Domain(format!("invalid projector label {self:?}: {why}")));
        if !(1..=n).contains(&self.i) || !(1..=n).contains(&self.j) {
            return bad("indices must lie in 1..=n");
        }
        let touches_center =
            layout.is_center(self.i) || layout.is_center(self.j);
        let both_center = layout.is_center(self.i) && layout.is_center(self.j);
        match (both_center, self.eps) {
            (true, Some(_)) => return bad("P_nn carries no sign"),
            (false, None) => return bad("sign required"),
            _ => {}
        }
        if touches_center && self.barred {
            return bad("n_bar = n, so the barred form coincides with the plain one");
        }
        Ok(layout)
    }

    /// Parameter slot whose exponential multiplies this projector in `R_hat`.
    pub fn slot(&self) -> usize {
        let layout = IndexLayout::new(self.n_states).expect("validated label");
        layout.slot(self.i, self.j, self.eps.unwrap_or(Eps::Plus))
    }

    /// Whether the coefficient is a free parameter or the central exponent.
    pub fn slot_key(&self) -> SlotKey {
        let layout = IndexLayout::new(self.n_states).expect("validated label");
        layout.slot_key(self.slot())
    }
}

/// All `N^2` labels: for each `(i, j)` the plain and barred forms and both signs.
pub fn all_labels(n_states: usize) -> Result<Vec<ProjectorLabel>> {
    let layout = IndexLayout::new(n_states)?;
    let n = layout.half();
    let mut labels = Vec::with_capacity(n_states * n_states);
    for i in 1..=n {
        for j in 1..=n {
            let ci = layout.is_center(i);
            let cj = layout.is_center(j);
            if ci && cj {
                labels.push(ProjectorLabel::center(n_states));
                continue;
            }
            let bars: &[bool] = if ci || cj { &[false] } else { &[false, true] };
            for &barred in bars {
                for eps in Eps::ALL {
                    labels.push(ProjectorLabel::pair(n_states, i, j, barred, eps));
                }
            }
        }
    }
    debug_assert_eq!(labels.len(), n_states * n_states);
    Ok(labels)
}

/// Dense `N^2 x N^2` matrix of a projector; entries lie in `{0, +-1/2, 1}`.
pub fn projector(label: &ProjectorLabel) -> Result<ComplexMatrix> {
    let layout = label.validate()?;
    let n_states = layout.n_states();
    let dim = n_states * n_states;
    let row = |a: usize, b: usize| (a - 1) * n_states + (b - 1);
    let mut m = ComplexMatrix::zeros(dim, dim);
    let Some(eps) = label.eps else {
        let c = row(label.i, label.j);
        m[(c, c)] = 1.0.into();
        return Ok(m);
    };
    let x = label.i;
    let y = if label.barred { layout.bar(label.j) } else { label.j };
    let states = [row(x, y), row(layout.bar(x), layout.bar(y))];
    let weights = [1.0, eps.sign()];
    for (s, ws) in states.iter().zip(weights) {
        for (t, wt) in states.iter().zip(weights) {
            m[(*s, *t)] += Complex64::new(0.5 * ws * wt, 0.0);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub n_states: usize,
    pub projectors: usize,
    /// Max deviation of `P_a P_b - delta_ab P_a` over all ordered pairs.
    pub orthogonality_deviation: f64,
    /// Max deviation of `sum P - I`.
    pub completeness_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Check idempotence, mutual orthogonality and completeness exhaustively.
pub fn verify_projector_algebra(n_states: usize, tol: f64) -> Result<AlgebraReport> {
    let labels = all_labels(n_states)?;
    let mats = labels
        .iter()
        .map(|l| projector(l).map(|m| SparseOperator::from_dense(&m, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let dim = n_states * n_states;

    // Each projector has at most four nonzeros, so the exhaustive pairwise
    // products are cheap in sparse form.
    let mut orth: f64 = 0.0;
    for (a, pa) in mats.iter().enumerate() {
        for (b, pb) in mats.iter().enumerate() {
            let prod = pa.matmul(pb);
            let dev = if a == b { prod.max_abs_diff(pa) } else { prod.max_abs() };
            orth = orth.max(dev);
        }
    }
    let sum = mats.iter().fold(SparseOperator::zeros(dim), |acc, p| acc.add(p));
    let completeness = sum.max_abs_diff(&SparseOperator::identity(dim));
    Ok(AlgebraReport {
        n_states,
        projectors: mats.len(),
        orthogonality_deviation: orth,
        completeness_deviation: completeness,
        tolerance: tol,
        passed: orth <= tol && completeness <= tol,
    })
}
