//! Monodromy blocks `T^(r)_ab` and the transfer matrix `T^(r) = sum_a T^(r)_aa`.
//!
//! The transfer matrix is assembled directly from its action on basis
//! states. With `u_k = t_k xor t_{k+1}` (cyclic) and `t_0 = 0`,
//!
//! ```text
//! T |b_1 .. b_r> = 2^{1-r} sum_{eps: prod eps = +1} sum_{u: |u| even}
//!     prod_k eps_k^{t_k} e^{(sum_k m_{b_{k+1} b_k}^{eps_k}) theta} |b_2^{u_1} .. b_1^{u_r}>
//! ```
//!
//! where `b^1 = b_bar`. Every entry is kept as an integer combination of
//! exponentials with integer exponent vectors, so coincident terms cancel
//! exactly and `theta`-derivatives are analytic. The coproduct of `2 x 2`
//! blocks extracted from `R(theta)` is retained as an independent oracle.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{exp_magnitude, r_matrix, Residual};
use crate::error::{BraidError, Result};
use crate::linalg::{checked_pow, Budget, ComplexMatrix};
use crate::params::{Eps, IndexLayout, ParamSet, Parity};
use crate::sparse::SparseOperator;

/// `|b_1 .. b_r>`, 1-based site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisState(pub Vec<usize>);

impl BasisState {
    /// Row of the state in `V^{(x) r}`, site 1 most significant.
    pub fn encode(&self, n_states: usize) -> usize {
        self.0.iter().fold(0, |acc, &b| acc * n_states + (b - 1))
    }

    pub fn decode(mut index: usize, n_states: usize, r: usize) -> Self {
        let mut digits = vec![0; r];
        for slot in digits.iter_mut().rev() {
            *slot = index % n_states + 1;
            index /= n_states;
        }
        Self(digits)
    }

    /// `(b_1, .., b_r) -> (b_2, .., b_r, b_1)`.
    pub fn shift(&self) -> Self {
        let mut v = self.0.clone();
        v.rotate_left(1);
        Self(v)
    }

    /// Bar the sites where `mask` is set.
    pub fn bar(&self, mask: &[bool], layout: &IndexLayout) -> Self {
        Self(
            self.0
                .iter()
                .zip(mask)
                .map(|(&b, &m)| if m { layout.bar(b) } else { b })
                .collect(),
        )
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }
}

/// Integer exponent vector over parameter slots: `E = sum_s c_s m_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(pub Vec<u16>);

impl Exponent {
    pub fn zero(slots: usize) -> Self {
        Self(vec![0; slots])
    }

    pub fn value(&self, p: &ParamSet) -> Complex64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, &c)| p.slot_value(s) * c as f64)
            .sum()
    }

    /// Total degree `sum_s c_s` (equals `r` for transfer-matrix entries).
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }
}

/// One symbolic entry `numerator / denominator * e^{E theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub row: usize,
    pub exponent: Exponent,
    pub numerator: i64,
}

/// `T^(r)` with entries kept as integer combinations of exponentials.
#[derive(Debug, Clone)]
pub struct SymbolicTransfer {
    layout: IndexLayout,
    sites: usize,
    denominator: i64,
    columns: Vec<Vec<Term>>,
}

/// Check the size of `T^(r)` against the sparse budget before building it.
pub fn check_transfer_budget(n_states: usize, r: usize, budget: &Budget) -> Result<usize> {
    if r == 0 {
        return Err(BraidError::Domain("r must be at least 1".into()));
    }
    let dim = checked_pow(n_states, r)?;
    let per_column = 1usize << (r - 1).min(62);
    let limit = budget.max_sparse_entries / per_column;
    if dim > limit {
        return Err(BraidError::Resource {
            what: format!("N^r = {n_states}^{r}"),
            requested: dim,
            limit,
        });
    }
    Ok(dim)
}

impl SymbolicTransfer {
    pub fn new(n_states: usize, r: usize, budget: &Budget) -> Result<Self> {
        let layout = IndexLayout::new(n_states)?;
        let dim = check_transfer_budget(n_states, r, budget)?;
        if r > 30 {
            return Err(BraidError::Unsupported(format!("r = {r} exceeds 30 sites")));
        }
        let columns = (0..dim)
            .into_par_iter()
            .map(|col| column_terms(&layout, r, col))
            .collect();
        Ok(Self {
            layout,
            sites: r,
            denominator: 1 << (r - 1),
            columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_states(&self) -> usize {
        self.layout.n_states()
    }

    pub fn layout(&self) -> &IndexLayout {
        &self.layout
    }

    pub fn column(&self, col: usize) -> &[Term] {
        &self.columns[col]
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    fn check(&self, p: &ParamSet) {
        assert_eq!(p.n_states(), self.n_states(), "parameter set has a different N");
    }

    /// `T^(r)(theta)`.
    pub fn evaluate(&self, p: &ParamSet, theta: Complex64) -> SparseOperator {
        self.derivative(p, theta, 0)
    }

    /// `d^l/dtheta^l T^(r)(theta)`, exact.
    pub fn derivative(&self, p: &ParamSet, theta: Complex64, l: u32) -> SparseOperator {
        self.check(p);
        let mut out = SparseOperator::zeros(self.dim());
        let denom = self.denominator as f64;
        for (col, terms) in self.columns.iter().enumerate() {
            for t in terms {
                let e = t.exponent.value(p);
                let z = (e * theta).exp() * e.powu(l) * (t.numerator as f64 / denom);
                out.add_to(t.row, col, z);
            }
        }
        out
    }
}

/// Image terms of one source state, gathered by `(row, exponent)`.
fn column_terms(layout: &IndexLayout, r: usize, col: usize) -> Vec<Term> {
    let n_states = layout.n_states();
    let b = BasisState::decode(col, n_states, r).0;
    let slots = layout.slot_count();
    // Slot of m_{b_{k+1} b_k}^{eps} for each bond k.
    let bond_slots: Vec<[usize; 2]> = (0..r)
        .map(|k| {
            let (hi, lo) = (b[(k + 1) % r], b[k]);
            [layout.slot(hi, lo, Eps::Plus), layout.slot(hi, lo, Eps::Minus)]
        })
        .collect();
    let shifted: Vec<usize> = (0..r).map(|k| b[(k + 1) % r]).collect();
    let mut acc: BTreeMap<(usize, Exponent), i64> = BTreeMap::new();
    for eps_mask in 0u32..(1 << r) {
        // bit k set: eps_k = -1.
        if eps_mask.count_ones() % 2 == 1 {
            continue;
        }
        let mut exponent = Exponent::zero(slots);
        for (k, pair) in bond_slots.iter().enumerate() {
            exponent.0[pair[((eps_mask >> k) & 1) as usize]] += 1;
        }
        for u_mask in 0u32..(1 << r) {
            if u_mask.count_ones() % 2 == 1 {
                continue;
            }
            let mut t = 0u32;
            let mut t_mask = 0u32;
            let mut row = 0usize;
            for (k, &s) in shifted.iter().enumerate() {
                // t_k for site k; t_0 = 0 and t_{k+1} = t_k xor u_k.
                t_mask |= t << k;
                let u = (u_mask >> k) & 1;
                let out = if u == 1 { layout.bar(s) } else { s };
                row = row * n_states + (out - 1);
                t ^= u;
            }
            let sign = if (t_mask & eps_mask).count_ones() % 2 == 1 { -1 } else { 1 };
            *acc.entry((row, exponent.clone())).or_insert(0) += sign;
        }
    }
    acc.into_iter()
        .filter(|(_, n)| *n != 0)
        .map(|((row, exponent), numerator)| Term {
            row,
            exponent,
            numerator,
        })
        .collect()
}

/// `T^(r)(theta)` through the direct assembly.
pub fn transfer_matrix(p: &ParamSet, r: usize, theta: Complex64) -> Result<SparseOperator> {
    let sym = SymbolicTransfer::new(p.n_states(), r, &Budget::from_env())?;
    Ok(sym.evaluate(p, theta))
}

/// The `N x N` blocks `T^(1)_ab` of `R(theta) = sum (ab) (x) T^(1)_ab`,
/// the auxiliary space being the first factor. Indexed `[a-1][b-1]`.
pub fn first_order_blocks(p: &ParamSet, theta: Complex64) -> Vec<Vec<ComplexMatrix>> {
    let n = p.n_states();
    let r = r_matrix(p, theta);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| r.view((a * n, b * n), (n, n)).into_owned())
                .collect()
        })
        .collect()
}

/// All monodromy blocks `T^(r)_ab` through the coproduct recursion
/// `T^(k+1)_ab = sum_c T^(k)_ac (x) T^(1)_cb`. Indexed `[a-1][b-1]`.
pub fn monodromy_blocks(p: &ParamSet, r: usize, theta: Complex64) -> Result<Vec<Vec<SparseOperator>>> {
    if r == 0 {
        return Err(BraidError::Domain("r must be at least 1".into()));
    }
    let n = p.n_states();
    Budget::from_env().check_dense(checked_pow(n, r)?)?;
    let first: Vec<Vec<SparseOperator>> = first_order_blocks(p, theta)
        .iter()
        .map(|row| row.iter().map(|m| SparseOperator::from_dense(m, 0.0)).collect())
        .collect();
    let mut current = first.clone();
    for _ in 1..r {
        current = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let dim = current[a][0].dim() * n;
                        (0..n).fold(SparseOperator::zeros(dim), |acc, c| {
                            acc.add(&current[a][c].kron(&first[c][b]))
                        })
                    })
                    .collect()
            })
            .collect();
    }
    Ok(current)
}

/// One monodromy block `T^(r)_ab`, `a, b` 1-based.
pub fn monodromy_block(p: &ParamSet, r: usize, a: usize, b: usize, theta: Complex64) -> Result<SparseOperator> {
    let n = p.n_states();
    if !(1..=n).contains(&a) || !(1..=n).contains(&b) {
        return Err(BraidError::Domain(format!("block indices ({a}, {b}) outside 1..={n}")));
    }
    let mut blocks = monodromy_blocks(p, r, theta)?;
    Ok(blocks.swap_remove(a - 1).swap_remove(b - 1))
}

/// `sum_a T^(r)_aa` through the coproduct (oracle path).
pub fn transfer_matrix_by_coproduct(p: &ParamSet, r: usize, theta: Complex64) -> Result<SparseOperator> {
    let blocks = monodromy_blocks(p, r, theta)?;
    let dim = blocks[0][0].dim();
    Ok((0..p.n_states()).fold(SparseOperator::zeros(dim), |acc, a| acc.add(&blocks[a][a])))
}

/// `Tr T^(r)(theta) = 2 sum_i e^{r m_ii^(+) theta}` (plus `e^{r c theta}` for odd `N`).
pub fn trace_closed_form(p: &ParamSet, r: usize, theta: Complex64) -> Complex64 {
    let layout = p.layout();
    let r = r as f64;
    let paired = match layout.parity() {
        Parity::Even => layout.half(),
        Parity::Odd => layout.half() - 1,
    };
    let mut sum: Complex64 = (1..=paired)
        .map(|i| (p.lookup(i, i, Eps::Plus) * theta * r).exp() * 2.0)
        .sum();
    if layout.parity() == Parity::Odd {
        sum += (p.center_shift() * theta * r).exp();
    }
    sum
}

/// The inverse candidate: sign-flipped exponents and transposed elementary
/// factors, enumerated term by term over `a_1..a_r` and the signs.
pub fn transfer_inverse_candidate(p: &ParamSet, r: usize, theta: Complex64) -> Result<SparseOperator> {
    let layout = *p.layout();
    let n = layout.n_states();
    let dim = checked_pow(n, r)?;
    Budget::from_env().check_dense(dim)?;
    let scale = 0.5f64.powi(r as i32);
    let mut out = SparseOperator::zeros(dim);
    for a_index in 0..dim {
        let a = BasisState::decode(a_index, n, r).0;
        for eps_mask in 0u32..(1 << r) {
            let eps = |k: usize| if (eps_mask >> k) & 1 == 1 { Eps::Minus } else { Eps::Plus };
            let exponent: Complex64 = (0..r)
                .map(|k| p.lookup(a[(k + 1) % r], a[k], eps(k)))
                .sum();
            let weight = (-exponent * theta).exp() * scale;
            // Factor k is (a_k a_{k+1}) + eps_k (a_k_bar a_{k+1}_bar).
            for t_mask in 0u32..(1 << r) {
                let mut row = 0;
                let mut col = 0;
                let mut sign = 1.0;
                for k in 0..r {
                    let (x, y) = (a[k], a[(k + 1) % r]);
                    let (x, y) = if (t_mask >> k) & 1 == 1 {
                        sign *= eps(k).sign();
                        (layout.bar(x), layout.bar(y))
                    } else {
                        (x, y)
                    };
                    row = row * n + (x - 1);
                    col = col * n + (y - 1);
                }
                out.add_to(row, col, weight * sign);
            }
        }
    }
    out.prune(0.0);
    Ok(out)
}

/// `T(theta) T(theta') - T(theta') T(theta)`.
pub fn commutator_residual(p: &ParamSet, r: usize, theta: Complex64, theta2: Complex64) -> Result<Residual> {
    let sym = SymbolicTransfer::new(p.n_states(), r, &Budget::from_env())?;
    let a = sym.evaluate(p, theta);
    let b = sym.evaluate(p, theta2);
    let scale = (exp_magnitude(p, theta) * exp_magnitude(p, theta2)).powi(r as i32);
    Ok(Residual::new(a.commutator(&b).max_abs(), scale))
}

/// Dense `T^(r)(theta)` subject to the dense budget.
pub fn transfer_dense(p: &ParamSet, r: usize, theta: Complex64) -> Result<ComplexMatrix> {
    let budget = Budget::from_env();
    budget.check_dense(checked_pow(p.n_states(), r)?)?;
    Ok(SymbolicTransfer::new(p.n_states(), r, &budget)?.evaluate(p, theta).to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, ONE, ZERO};
    use crate::params::{ParamKey, RandomOptions};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random(n: usize, seed: u64) -> ParamSet {
        ParamSet::random(n, seed, &RandomOptions::default()).unwrap()
    }

    #[test]
    fn basis_state_round_trip() {
        let s = BasisState(vec![2, 1, 3]);
        assert_eq!(s.encode(3), 9 + 2);
        assert_eq!(BasisState::decode(11, 3, 3), s);
        assert_eq!(s.shift(), BasisState(vec![1, 3, 2]));
        let layout = IndexLayout::new(3).unwrap();
        let barred = s.bar(&[true, true, false], &layout);
        assert_eq!(barred, BasisState(vec![2, 3, 3]));
        assert_eq!(barred.bar(&[true, true, false], &layout), s);
    }

    #[test]
    fn first_order_blocks_match_explicit_form() {
        // T_ab = f+_ba (ba) + f-_ba (b_bar a_bar).
        for n in [2, 3, 4] {
            let p = random(n, 8);
            let theta = Complex64::new(0.6, 0.2);
            let layout = *p.layout();
            let blocks = first_order_blocks(&p, theta);
            for a in 1..=n {
                for b in 1..=n {
                    let mut expected = ComplexMatrix::zeros(n, n);
                    let (fp, fm) = crate::braid::two_site_coefficients(&p, b, a, theta);
                    expected[(b - 1, a - 1)] += fp;
                    expected[(layout.bar(b) - 1, layout.bar(a) - 1)] += fm;
                    assert!(max_abs_diff(&blocks[a - 1][b - 1], &expected) < 1e-14, "N={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn direct_matches_coproduct() {
        for (n, r) in [(2, 2), (2, 3), (3, 2), (4, 2), (3, 3), (2, 4)] {
            let p = random(n, 21);
            let theta = Complex64::new(0.45, -0.3);
            let direct = transfer_matrix(&p, r, theta).unwrap();
            let oracle = transfer_matrix_by_coproduct(&p, r, theta).unwrap();
            assert!(direct.max_abs_diff(&oracle) < 1e-12, "N={n} r={r}");
        }
    }

    #[test]
    fn r1_is_diagonal() {
        let p = random(4, 2);
        let theta = c(0.8);
        let t = transfer_matrix(&p, 1, theta).unwrap();
        let layout = *p.layout();
        assert_eq!(t.nnz(), 4);
        for a in 1..=4 {
            let expected = (p.lookup(layout.class(a), layout.class(a), Eps::Plus) * theta).exp();
            assert!((t.get(a - 1, a - 1) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn r2_n2_action_matches_explicit_expansion() {
        let p = random(2, 5);
        let theta = c(0.7);
        let t = transfer_matrix(&p, 2, theta).unwrap();
        let layout = *p.layout();
        for b1 in 1..=2 {
            for b2 in 1..=2 {
                let col = (b1 - 1) * 2 + (b2 - 1);
                let mut expected = [ZERO; 4];
                for e21 in Eps::ALL {
                    for e12 in Eps::ALL {
                        let w = (p.lookup(b2, b1, e21) + p.lookup(b1, b2, e12)) * theta;
                        let f = w.exp() * (1.0 + e21.sign() * e12.sign()) * 0.25;
                        expected[(b2 - 1) * 2 + (b1 - 1)] += f;
                        expected[(layout.bar(b2) - 1) * 2 + (layout.bar(b1) - 1)] += f * e21.sign();
                    }
                }
                for (row, z) in expected.iter().enumerate() {
                    assert!((t.get(row, col) - z).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn column_sparsity_bound() {
        for (n, r) in [(2, 4), (3, 3), (3, 4)] {
            let sym = SymbolicTransfer::new(n, r, &Budget::default()).unwrap();
            for col in 0..sym.dim() {
                let mut rows: Vec<usize> = sym.column(col).iter().map(|t| t.row).collect();
                rows.dedup();
                rows.sort_unstable();
                rows.dedup();
                assert!(rows.len() <= 1 << (r - 1));
            }
        }
    }

    #[test]
    fn trace_formula() {
        let p = ParamSet::new(
            2,
            [
                (ParamKey::new(1, 1, Eps::Plus), c(0.4)),
                (ParamKey::new(1, 1, Eps::Minus), c(-0.2)),
            ],
            ZERO,
        )
        .unwrap();
        assert!((trace_closed_form(&p, 2, c(1.0)) - c(2.0 * 0.8f64.exp())).norm() < 1e-14);
        let p3 = random(3, 4);
        let expected = (p3.lookup(1, 1, Eps::Plus) * 4.0).exp() * 2.0 + ONE;
        assert!((trace_closed_form(&p3, 4, c(1.0)) - expected).norm() < 1e-12);
        for (n, r) in [(2, 3), (3, 2), (4, 2), (5, 3)] {
            let p = random(n, 13);
            let theta = Complex64::new(0.35, 0.5);
            let t = transfer_matrix(&p, r, theta).unwrap();
            assert!((t.trace() - trace_closed_form(&p, r, theta)).norm() < 1e-12, "N={n} r={r}");
        }
    }

    #[test]
    fn inverse_candidate_is_exact_inverse() {
        for (n, r) in [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)] {
            let p = random(n, 17);
            let theta = Complex64::new(0.5, 0.25);
            let t = transfer_matrix(&p, r, theta).unwrap();
            let cand = transfer_inverse_candidate(&p, r, theta).unwrap();
            let id = SparseOperator::identity(t.dim());
            assert!(t.matmul(&cand).max_abs_diff(&id) < 1e-12, "N={n} r={r}");
            assert!(cand.matmul(&t).max_abs_diff(&id) < 1e-12, "N={n} r={r}");
            let reflected = transfer_matrix(&p, r, -theta).unwrap().transpose();
            assert!(cand.max_abs_diff(&reflected) < 1e-13);
        }
    }

    #[test]
    fn commutativity() {
        let p = random(2, 3);
        assert_eq!(commutator_residual(&p, 3, c(0.2), c(0.2)).unwrap().raw, 0.0);
        assert!(commutator_residual(&p, 3, c(0.2), c(0.9)).unwrap().raw <= 1e-9);
        let p3 = random(3, 3);
        assert!(commutator_residual(&p3, 2, c(0.4), c(1.3)).unwrap().raw <= 1e-9);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = random(3, 6);
        let sym = SymbolicTransfer::new(3, 3, &Budget::default()).unwrap();
        let theta = c(0.3);
        let h = 1e-5;
        let fd = sym
            .evaluate(&p, theta + h)
            .sub(&sym.evaluate(&p, theta - h))
            .scale(c(0.5 / h));
        assert!(sym.derivative(&p, theta, 1).max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn t_at_zero_is_cyclic_shift() {
        let p = random(3, 1);
        let t = transfer_matrix(&p, 3, ZERO).unwrap().to_dense();
        let mut shift = ComplexMatrix::zeros(27, 27);
        for col in 0..27 {
            let s = BasisState::decode(col, 3, 3);
            shift[(s.shift().encode(3), col)] = ONE;
        }
        assert!(max_abs_diff(&t, &shift) < 1e-15);
        assert_eq!(identity(1)[(0, 0)], ONE);
    }

    #[test]
    fn budget_is_enforced() {
        let budget = Budget {
            max_sparse_entries: 100,
            ..Budget::default()
        };
        match SymbolicTransfer::new(2, 5, &budget) {
            Err(BraidError::Resource { what, .. }) => assert!(what.contains("2^5")),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn monodromy_block_bounds() {
        let p = random(2, 1);
        assert!(monodromy_block(&p, 1, 3, 1, ZERO).is_err());
        let b = monodromy_block(&p, 1, 1, 1, c(0.5)).unwrap();
        let (fp, fm) = crate::braid::two_site_coefficients(&p, 1, 1, c(0.5));
        assert!((b.get(0, 0) - fp).norm() < 1e-15);
        assert!((b.get(1, 1) - fm).norm() < 1e-15);
    }
}
