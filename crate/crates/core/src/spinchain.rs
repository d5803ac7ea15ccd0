//! Spin-chain Hamiltonians from `R_hat'(0)` and the conserved quantities
//! `H_l = d^l/dtheta^l log T^(r)(theta)` at `theta = 0`.
//!
//! Bond orientation: the local term `R_hat'(0)` acts with its first factor
//! on site `k + 1` and its second on site `k`. With this orientation the
//! bond sum equals `T(0)^{-1} T'(0)` exactly. The mirrored orientation also
//! commutes with `T^(r)`, but differs from it once `N >= 3` and `r >= 3`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::braid::{exp_magnitude, projector_sum, Residual};
use crate::error::{BraidError, Result};
use crate::linalg::{checked_pow, inverse, Budget, ComplexMatrix};
use crate::params::ParamSet;
use crate::sparse::{SparseDoc, SparseOperator};
use crate::transfer::SymbolicTransfer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Closed,
    Open,
}

/// An operator on an `r`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub sites: usize,
    pub boundary: Boundary,
    pub matrix: SparseOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainDoc {
    pub sites: usize,
    pub boundary: Boundary,
    #[serde(flatten)]
    pub matrix: SparseDoc,
}

impl ChainOperator {
    pub fn to_doc(&self) -> ChainDoc {
        ChainDoc {
            sites: self.sites,
            boundary: self.boundary,
            matrix: self.matrix.to_doc(),
        }
    }
}

/// `d^l/dtheta^l R_hat(theta)` at `theta = 0`: `sum m^l P` (including
/// `c^l P_nn` for odd `N`, `c` the central exponent).
pub fn rhat_derivative(p: &ParamSet, l: u32) -> Result<ComplexMatrix> {
    if l == 0 {
        return Err(BraidError::Domain("derivative order must be at least 1".into()));
    }
    projector_sum(p, |m| m.powu(l))
}

/// Bonds `(k, k+1)`, 0-based; the closed chain adds the wrap bond `(r-1, 0)`.
pub fn bonds(r: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let count = match boundary {
        Boundary::Closed => r,
        Boundary::Open => r - 1,
    };
    (0..count).map(|k| (k, (k + 1) % r)).collect()
}

/// `sum_bonds local_{k,k+1}` with the first factor of `local` on site `k+1`.
pub fn bond_sum(local: &ComplexMatrix, n_states: usize, r: usize, boundary: Boundary) -> SparseOperator {
    let local = SparseOperator::from_dense(local, 0.0);
    let dim = n_states.pow(r as u32);
    bonds(r, boundary)
        .into_iter()
        .fold(SparseOperator::zeros(dim), |acc, (k, next)| {
            acc.add(&SparseOperator::embed_two_site(&local, n_states, r, next, k))
        })
}

/// `H = sum_k R_hat'(0)_{k,k+1}`.
pub fn hamiltonian(p: &ParamSet, r: usize, boundary: Boundary) -> Result<ChainOperator> {
    if r < 2 {
        return Err(BraidError::Domain("a chain needs r >= 2 sites".into()));
    }
    let n = p.n_states();
    let dim = checked_pow(n, r)?;
    Budget::from_env().check_sparse(dim * n * n)?;
    let local = rhat_derivative(p, 1)?;
    Ok(ChainOperator {
        sites: r,
        boundary,
        matrix: bond_sum(&local, n, r, boundary),
    })
}

/// `H_1 = T(0)^{-1} T'(0)` and `H_2 = T(0)^{-1} T''(0) - H_1^2`, from exact
/// derivatives of `T^(r)`. Closed chain only.
pub fn conserved_quantity(p: &ParamSet, r: usize, l: u32) -> Result<ChainOperator> {
    conserved_quantity_at(p, r, l, 0.0)
}

/// As [`conserved_quantity`], expanded about `theta0`.
pub fn conserved_quantity_at(p: &ParamSet, r: usize, l: u32, theta0: f64) -> Result<ChainOperator> {
    if !(1..=2).contains(&l) {
        return Err(BraidError::Unsupported(format!(
            "conserved quantities are implemented for l = 1, 2 (got {l})"
        )));
    }
    if r < 2 {
        return Err(BraidError::Domain("a chain needs r >= 2 sites".into()));
    }
    let budget = Budget::from_env();
    let dim = checked_pow(p.n_states(), r)?;
    budget.check_dense(dim)?;
    let sym = SymbolicTransfer::new(p.n_states(), r, &budget)?;
    let theta = Complex64::new(theta0, 0.0);
    let t_inv = inverse(&sym.evaluate(p, theta).to_dense())?;
    let h1 = &t_inv * sym.derivative(p, theta, 1).to_dense();
    let out = if l == 1 {
        h1
    } else {
        &t_inv * sym.derivative(p, theta, 2).to_dense() - &h1 * &h1
    };
    let scale = crate::linalg::max_abs(&out).max(1.0);
    let mut matrix = SparseOperator::from_dense(&out, 1e-14 * scale);
    matrix.prune(1e-14 * scale);
    Ok(ChainOperator {
        sites: r,
        boundary: Boundary::Closed,
        matrix,
    })
}

/// `[H, T^(r)(theta)]` for the closed chain.
pub fn integrability_residual(p: &ParamSet, r: usize, theta: Complex64) -> Result<Residual> {
    let h = hamiltonian(p, r, Boundary::Closed)?;
    let t = SymbolicTransfer::new(p.n_states(), r, &Budget::from_env())?.evaluate(p, theta);
    let scale = exp_magnitude(p, theta).powi(r as i32) * h.matrix.max_abs().max(1.0);
    Ok(Residual::new(h.matrix.commutator(&t).max_abs(), scale))
}

/// Least-squares `a = alpha b + beta I` over all entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFit {
    pub alpha: crate::json::ComplexDoc,
    pub beta: crate::json::ComplexDoc,
    /// Max-entry norm of `a - alpha b - beta I`.
    pub residual: f64,
}

pub fn affine_fit(a: &SparseOperator, b: &SparseOperator) -> AffineFit {
    let (da, db) = (a.to_dense(), b.to_dense());
    let n = da.nrows();
    let id = ComplexMatrix::identity(n, n);
    // Normal equations for the two basis matrices b and I.
    let dot = |x: &ComplexMatrix, y: &ComplexMatrix| x.iter().zip(y.iter()).map(|(u, v)| u.conj() * v).sum::<Complex64>();
    let g = nalgebra::Matrix2::new(dot(&db, &db), dot(&db, &id), dot(&id, &db), dot(&id, &id));
    let rhs = nalgebra::Vector2::new(dot(&db, &da), dot(&id, &da));
    let sol = g.lu().solve(&rhs).unwrap_or_else(|| nalgebra::Vector2::new(Complex64::new(0.0, 0.0), dot(&id, &da) / n as f64));
    let fitted = &db * sol[0] + &id * sol[1];
    AffineFit {
        alpha: sol[0].into(),
        beta: sol[1].into(),
        residual: crate::linalg::max_abs_diff(&da, &fitted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::rhat;
    use crate::linalg::{max_abs_diff, ZERO};
    use crate::params::{Eps, ParamKey, RandomOptions};
    use crate::spectrum::{closed_form_spectrum, match_spectra};
    use crate::transfer::transfer_matrix;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random(n: usize, seed: u64) -> ParamSet {
        ParamSet::random(n, seed, &RandomOptions::default()).unwrap()
    }

    #[test]
    fn first_derivative_n2() {
        let p = ParamSet::new(
            2,
            [
                (ParamKey::new(1, 1, Eps::Plus), c(0.9)),
                (ParamKey::new(1, 1, Eps::Minus), c(0.2)),
            ],
            ZERO,
        )
        .unwrap();
        let d = rhat_derivative(&p, 1).unwrap();
        let (hat_p, hat_m) = (0.5 * (0.9 + 0.2), 0.5 * (0.9 - 0.2));
        for k in 0..4 {
            assert!((d[(k, k)] - c(hat_p)).norm() < 1e-15);
        }
        for (r, col) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
            assert!((d[(r, col)] - c(hat_m)).norm() < 1e-15);
        }
    }

    #[test]
    fn center_element_of_first_derivative() {
        let p = random(3, 3).shifted(c(0.25)).unwrap();
        let d = rhat_derivative(&p, 1).unwrap();
        assert!((d[(4, 4)] - c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for n in [2, 3, 4] {
            let p = random(n, 7);
            let (plus, zero, minus) = (rhat(&p, c(h)), rhat(&p, ZERO), rhat(&p, c(-h)));
            let d1 = (&plus - &minus) / c(2.0 * h);
            let d2 = (&plus - &zero * c(2.0) + &minus) / c(h * h);
            assert!(max_abs_diff(&rhat_derivative(&p, 1).unwrap(), &d1) < 1e-6);
            assert!(max_abs_diff(&rhat_derivative(&p, 2).unwrap(), &d2) < 1e-6);
        }
    }

    #[test]
    fn closed_r2_n2_is_twice_local_term() {
        let p = random(2, 1);
        let h = hamiltonian(&p, 2, Boundary::Closed).unwrap();
        let twice = rhat_derivative(&p, 1).unwrap() * c(2.0);
        assert!(max_abs_diff(&h.matrix.to_dense(), &twice) == 0.0);
    }

    #[test]
    fn open_and_closed_differ_by_wrap_bond() {
        let p = random(3, 2);
        let closed = hamiltonian(&p, 3, Boundary::Closed).unwrap().matrix;
        let open = hamiltonian(&p, 3, Boundary::Open).unwrap().matrix;
        let local = SparseOperator::from_dense(&rhat_derivative(&p, 1).unwrap(), 0.0);
        let wrap = SparseOperator::embed_two_site(&local, 3, 3, 0, 2);
        assert!(closed.sub(&open).max_abs_diff(&wrap) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_symmetric_for_real_params() {
        for n in [2, 3, 4] {
            let h = hamiltonian(&random(n, 5), 3, Boundary::Closed).unwrap().matrix;
            assert_eq!(h.max_abs_diff(&h.transpose()), 0.0);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_transfer() {
        for (n, r, theta) in [(2, 3, 0.5), (3, 2, 1.0), (3, 3, 0.7), (4, 3, 0.4)] {
            let p = random(n, 11);
            assert!(integrability_residual(&p, r, c(theta)).unwrap().raw <= 1e-8, "N={n} r={r}");
            assert!(integrability_residual(&p, r, ZERO).unwrap().raw <= 1e-10);
        }
    }

    #[test]
    fn h1_equals_hamiltonian() {
        for (n, r) in [(2, 3), (3, 2), (3, 3), (4, 2)] {
            let p = random(n, 4);
            let h1 = conserved_quantity(&p, r, 1).unwrap().matrix;
            let h = hamiltonian(&p, r, Boundary::Closed).unwrap().matrix;
            assert!(h1.max_abs_diff(&h) < 1e-12, "N={n} r={r}");
            let fit = affine_fit(&h1, &h);
            assert!((Complex64::from(fit.alpha) - c(1.0)).norm() < 1e-10);
            assert!(fit.residual < 1e-10);
        }
    }

    #[test]
    fn conserved_quantities_commute() {
        let p = random(2, 6);
        let h1 = conserved_quantity(&p, 4, 1).unwrap().matrix;
        let h2 = conserved_quantity(&p, 4, 2).unwrap().matrix;
        assert!(h1.commutator(&h2).max_abs() <= 1e-8);
        let t = transfer_matrix(&p, 4, c(0.7)).unwrap();
        assert!(h1.commutator(&t).max_abs() <= 1e-8);
        assert!(matches!(conserved_quantity(&p, 4, 3), Err(BraidError::Unsupported(_))));
    }

    #[test]
    fn hamiltonian_spectrum_from_exponents() {
        // Each eigenvalue w e^{E theta} of T gives d/dtheta log = E at 0.
        let p = random(2, 8);
        let h = hamiltonian(&p, 3, Boundary::Closed).unwrap().matrix.to_dense();
        let mut eig = crate::linalg::eigenvalues(&h).unwrap();
        eig.sort_by(crate::linalg::lex_cmp);
        let mut expected: Vec<Complex64> = closed_form_spectrum(&p, 3)
            .unwrap()
            .iter()
            .flat_map(|rec| std::iter::repeat_n(rec.exponent.value(&p), rec.multiplicity))
            .collect();
        expected.sort_by(crate::linalg::lex_cmp);
        assert!(match_spectra(&eig, &expected, 1e-7).matched);
    }

    #[test]
    fn log_transfer_is_linear_in_theta() {
        // Eigenvectors of T do not depend on theta and its eigenvalues are
        // w e^{E theta}, so T(theta) = T(0) e^{theta H_1} and H_2 vanishes
        // while T^{-1} T'' = H_1^2 does not.
        for (n, r) in [(2, 4), (3, 3)] {
            let p = random(n, 9);
            let h1 = conserved_quantity(&p, r, 1).unwrap().matrix;
            let h2 = conserved_quantity(&p, r, 2).unwrap().matrix;
            assert_eq!(h2.nnz(), 0);
            assert!(h1.matmul(&h1).max_abs() > 0.1);
            let t0 = transfer_matrix(&p, r, c(0.0)).unwrap().to_dense();
            let t = transfer_matrix(&p, r, c(0.6)).unwrap().to_dense();
            let flow = (h1.to_dense() * c(0.6)).exp();
            assert!(max_abs_diff(&(t0 * flow), &t) < 1e-10);
        }
    }

    #[test]
    fn mirrored_bonds_commute_but_differ_from_h1() {
        let p = random(3, 10);
        let local = SparseOperator::from_dense(&rhat_derivative(&p, 1).unwrap(), 0.0);
        let mirrored = bonds(3, Boundary::Closed)
            .into_iter()
            .fold(SparseOperator::zeros(27), |acc, (k, next)| {
                acc.add(&SparseOperator::embed_two_site(&local, 3, 3, k, next))
            });
        let t = transfer_matrix(&p, 3, c(0.7)).unwrap();
        assert!(mirrored.commutator(&t).max_abs() < 1e-10);
        let h1 = conserved_quantity(&p, 3, 1).unwrap().matrix;
        assert!(h1.max_abs_diff(&hamiltonian(&p, 3, Boundary::Closed).unwrap().matrix) < 1e-10);
        assert!(h1.max_abs_diff(&mirrored) > 1e-3);
    }
}
