use braidlab::braid::{braid_residual, rhat, ybe_residual};
use braidlab::linalg::{identity, max_abs_diff};
use braidlab::smatrix::{cayley_residual, cayley_x};
use braidlab::spectrum::{closed_form_spectrum, closed_form_values};
use braidlab::spinchain::{hamiltonian, Boundary};
use braidlab::transfer::{trace_closed_form, transfer_inverse_candidate, transfer_matrix, transfer_matrix_by_coproduct};
use braidlab::{BraidError, ParamSet, RandomOptions, SparseOperator};
use num_complex::Complex64;
use proptest::prelude::*;

fn params(n: usize, seed: u64, imaginary: bool) -> ParamSet {
    let options = RandomOptions {
        imaginary,
        ..RandomOptions::default()
    };
    ParamSet::random(n, seed, &options).unwrap()
}

fn theta() -> impl Strategy<Value = f64> {
    -1.5f64..1.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn braid_and_ybe_hold(n in 2usize..=5, seed in any::<u64>(), t in theta(), t2 in theta(), im in any::<bool>()) {
        let p = params(n, seed, im);
        let (t, t2) = (Complex64::new(t, 0.0), Complex64::new(t2, 0.0));
        prop_assert!(braid_residual(&p, t, t2).scaled <= 1e-10);
        prop_assert!(ybe_residual(&p, t, t2).scaled <= 1e-10);
    }

    #[test]
    fn rhat_is_a_one_parameter_group(n in 2usize..=5, seed in any::<u64>(), t in theta(), t2 in theta()) {
        let p = params(n, seed, false);
        let (a, b) = (Complex64::new(t, 0.0), Complex64::new(t2, 0.0));
        let prod = rhat(&p, a) * rhat(&p, b);
        let scale = prod.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        prop_assert!(max_abs_diff(&prod, &rhat(&p, a + b)) <= 1e-13 * scale);
    }

    #[test]
    fn direct_transfer_equals_coproduct(n in 2usize..=3, r in 2usize..=3, seed in any::<u64>(), t in theta()) {
        let p = params(n, seed, false);
        let t = Complex64::new(t, 0.3 * t);
        let direct = transfer_matrix(&p, r, t).unwrap();
        let coproduct = transfer_matrix_by_coproduct(&p, r, t).unwrap();
        let scale = direct.max_abs().max(1.0);
        prop_assert!(direct.max_abs_diff(&coproduct) <= 1e-12 * scale);
    }

    #[test]
    fn trace_and_spectrum_agree(n in 2usize..=4, r in 2usize..=3, seed in any::<u64>(), t in theta()) {
        let p = params(n, seed, false);
        let t = Complex64::new(t, 0.0);
        let trace = transfer_matrix(&p, r, t).unwrap().trace();
        let closed = trace_closed_form(&p, r, t);
        let sum: Complex64 = closed_form_values(&p, &closed_form_spectrum(&p, r).unwrap(), t).iter().sum();
        let scale = closed.norm().max(1.0);
        prop_assert!((trace - closed).norm() <= 1e-10 * scale);
        prop_assert!((sum - closed).norm() <= 1e-10 * scale);
    }

    #[test]
    fn inverse_candidate_inverts(n in 2usize..=3, r in 2usize..=3, seed in any::<u64>(), t in theta()) {
        let p = params(n, seed, false);
        let t = Complex64::new(t, 0.0);
        let prod = transfer_matrix(&p, r, t).unwrap().matmul(&transfer_inverse_candidate(&p, r, t).unwrap());
        let dim = prod.dim();
        prop_assert!(prod.max_abs_diff(&SparseOperator::identity(dim)) <= 1e-10);
    }

    #[test]
    fn real_hamiltonians_are_symmetric(n in 2usize..=4, r in 2usize..=4, seed in any::<u64>(), closed in any::<bool>()) {
        let p = params(n, seed, false);
        let boundary = if closed { Boundary::Closed } else { Boundary::Open };
        let h = hamiltonian(&p, r, boundary).unwrap().matrix;
        prop_assert_eq!(h.max_abs_diff(&h.transpose()), 0.0);
    }

    #[test]
    fn cayley_inverse_or_singular(n in 2usize..=4, seed in any::<u64>(), t in theta(), re in -3.0f64..3.0, im in -1.0f64..1.0) {
        let p = params(n, seed, false);
        let (t, lambda) = (Complex64::new(t, 0.0), Complex64::new(re, im));
        match cayley_x(&p, t, lambda) {
            Ok(x) => {
                // Conditioning degrades near the excluded set.
                let dense = (braidlab::braid::r_matrix(&p, t) - identity(n * n) * lambda).lu().try_inverse().unwrap();
                let cond = dense.iter().fold(1.0f64, |m, z| m.max(z.norm()));
                prop_assert!(cayley_residual(&p, t, lambda, &x) <= 1e-12 * cond.max(1.0) * 10.0);
            }
            Err(BraidError::Singular { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn params_round_trip_through_json(n in 2usize..=7, seed in any::<u64>(), im in any::<bool>()) {
        let p = params(n, seed, im);
        prop_assert_eq!(ParamSet::from_json(&p.to_json()).unwrap(), p);
    }
}
