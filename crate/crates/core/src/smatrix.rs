//! Inverse Cayley transform `X = (R - lambda I)^{-1}` in closed form and the
//! scattering potential `V` defined by `-i V = I + 2 lambda X`.
//!
//! Matrix units follow the tensor convention of [`crate::linalg`]:
//! `(ab) (x) (cd)` has its single unit entry at row `(a, c)`, column `(b, d)`,
//! so the coupling `V_{ab,cd}` is `V[(a,c), (b,d)]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::braid::r_matrix;
use crate::error::{BraidError, Result};
use crate::json::ComplexDoc;
use crate::linalg::{identity, lex_cmp, max_abs_diff, ComplexMatrix, I, ONE};
use crate::params::{Eps, ParamSet};

/// Relative distance `lambda` must keep from every excluded value.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Entries of `V` at or below this modulus are not exported.
pub const ENTRY_DROP_TOL: f64 = 1e-14;

const EPS: [Eps; 2] = [Eps::Plus, Eps::Minus];

/// `e^{(m_ab + m_ba) theta}` for one sign.
fn pair_exponent(p: &ParamSet, a: usize, b: usize, eps: Eps, theta: Complex64) -> Complex64 {
    ((p.lookup(a, b, eps) + p.lookup(b, a, eps)) * theta).exp()
}

/// Every `+-e^{(m_ab + m_ba) theta / 2}`, sorted and deduplicated.
pub fn excluded_lambdas(p: &ParamSet, theta: Complex64) -> Vec<Complex64> {
    let n = p.n_states();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            for eps in EPS {
                let half = ((p.lookup(a, b, eps) + p.lookup(b, a, eps)) * theta * 0.5).exp();
                out.push(half);
                out.push(-half);
            }
        }
    }
    out.sort_by(lex_cmp);
    out.dedup_by(|x, y| (*x - *y).norm() <= 1e-12 * y.norm().max(1.0));
    out
}

/// Fails when `lambda` is within `margin * max(1, |e|)` of an excluded `e`.
pub fn check_lambda(p: &ParamSet, theta: Complex64, lambda: Complex64, margin: f64) -> Result<()> {
    for e in excluded_lambdas(p, theta) {
        if (lambda - e).norm() <= margin * e.norm().max(1.0) {
            return Err(BraidError::Singular {
                lambda: format_complex(lambda),
                excluded: format_complex(e),
                margin,
            });
        }
    }
    Ok(())
}

fn format_complex(z: Complex64) -> String {
    format!("{:e}{:+e}i", z.re, z.im)
}

fn unit_index(n: usize, a: usize, c: usize) -> usize {
    (a - 1) * n + (c - 1)
}

/// Adds `coeff (ab) (x) (cd)`.
fn add_unit(m: &mut ComplexMatrix, n: usize, (a, b): (usize, usize), (c, d): (usize, usize), coeff: Complex64) {
    m[(unit_index(n, a, c), unit_index(n, b, d))] += coeff;
}

/// Closed-form `X(theta) = (R(theta) - lambda I)^{-1}` with the default margin.
pub fn cayley_x(p: &ParamSet, theta: Complex64, lambda: Complex64) -> Result<ComplexMatrix> {
    cayley_x_with_margin(p, theta, lambda, DEFAULT_MARGIN)
}

pub fn cayley_x_with_margin(p: &ParamSet, theta: Complex64, lambda: Complex64, margin: f64) -> Result<ComplexMatrix> {
    check_lambda(p, theta, lambda, margin)?;
    let n = p.n_states();
    let layout = p.layout();
    let mut x = ComplexMatrix::zeros(n * n, n * n);
    for eps in EPS {
        let s = Complex64::new(eps.sign(), 0.0);
        for a in 1..=n {
            for b in 1..=n {
                let (ab, bb) = (layout.bar(a), layout.bar(b));
                let w = -0.5 / (lambda * lambda - pair_exponent(p, a, b, eps, theta));
                let diag = w * lambda;
                add_unit(&mut x, n, (a, a), (b, b), diag);
                add_unit(&mut x, n, (a, ab), (b, bb), diag * s);
                let swap = w * (p.lookup(b, a, eps) * theta).exp();
                add_unit(&mut x, n, (a, b), (b, a), swap);
                add_unit(&mut x, n, (a, bb), (b, ab), swap * s);
            }
        }
    }
    Ok(x)
}

/// `max |(R - lambda I) X - I|`.
pub fn cayley_residual(p: &ParamSet, theta: Complex64, lambda: Complex64, x: &ComplexMatrix) -> f64 {
    let dim = x.nrows();
    let shifted = r_matrix(p, theta) - identity(dim) * lambda;
    max_abs_diff(&(shifted * x), &identity(dim))
}

/// `V = i (I + 2 lambda X)`.
pub fn potential_matrix(x: &ComplexMatrix, lambda: Complex64) -> ComplexMatrix {
    (identity(x.nrows()) + x * (lambda * 2.0)) * I
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub re: f64,
    pub im: f64,
}

/// Comparison of `V` against one of the closed-form element families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCheck {
    pub family: String,
    pub compared: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub agrees: bool,
    /// Least-squares factor `s` in `table ~ s * closed form`.
    pub best_scale: ComplexDoc,
    /// Max deviation after applying `best_scale`.
    pub scaled_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialTable {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub theta: ComplexDoc,
    pub lambda: ComplexDoc,
    pub entries: Vec<PotentialEntry>,
    pub excluded: Vec<ComplexDoc>,
    /// `max |(-i V) - (I + 2 lambda X)|` after rebuilding `V` from `entries`.
    pub reconstruction_residual: f64,
    /// `max |(R - lambda I) X - I|`.
    pub cayley_residual: f64,
    /// Nonzero entries outside every family's index pattern.
    pub unclassified_nonzeros: usize,
    pub family_check: Vec<FamilyCheck>,
}

impl PotentialTable {
    pub fn entry(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|e| (e.a, e.b, e.c, e.d) == (a, b, c, d))
            .map_or(Complex64::new(0.0, 0.0), |e| Complex64::new(e.re, e.im))
    }

    /// `sum V_{ab,cd} (ab) (x) (cd)`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.n_states;
        let mut v = ComplexMatrix::zeros(n * n, n * n);
        for e in &self.entries {
            add_unit(&mut v, n, (e.a, e.b), (e.c, e.d), Complex64::new(e.re, e.im));
        }
        v
    }
}

/// Potential table at `(theta, lambda)`.
pub fn potential(p: &ParamSet, theta: Complex64, lambda: Complex64) -> Result<PotentialTable> {
    let x = cayley_x(p, theta, lambda)?;
    let v = potential_matrix(&x, lambda);
    let n = p.n_states();
    let mut entries = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            for c in 1..=n {
                for d in 1..=n {
                    let z = v[(unit_index(n, a, c), unit_index(n, b, d))];
                    if z.norm() > ENTRY_DROP_TOL {
                        entries.push(PotentialEntry { a, b, c, d, re: z.re, im: z.im });
                    }
                }
            }
        }
    }
    let mut table = PotentialTable {
        n_states: n,
        theta: theta.into(),
        lambda: lambda.into(),
        entries,
        excluded: excluded_lambdas(p, theta).into_iter().map(ComplexDoc::from).collect(),
        reconstruction_residual: 0.0,
        cayley_residual: cayley_residual(p, theta, lambda, &x),
        unclassified_nonzeros: 0,
        family_check: Vec::new(),
    };
    let rebuilt = table.to_matrix() * (-I);
    table.reconstruction_residual = max_abs_diff(&rebuilt, &(identity(n * n) + &x * (lambda * 2.0)));
    table.unclassified_nonzeros = count_unclassified(p, &table);
    table.family_check = family_checks(p, theta, lambda, &table);
    Ok(table)
}

/// Tolerance used when comparing table entries with the closed-form families.
pub const FAMILY_TOL: f64 = 1e-12;

fn count_unclassified(p: &ParamSet, table: &PotentialTable) -> usize {
    let layout = p.layout();
    table
        .entries
        .iter()
        .filter(|e| {
            let diagonal = e.a == e.b && e.c == e.d;
            let barred = e.a == layout.bar(e.b) && e.c == layout.bar(e.d);
            let swap = e.a == e.d && e.b == e.c;
            let barred_swap = e.a == layout.bar(e.d) && e.c == layout.bar(e.b);
            !(diagonal || barred || swap || barred_swap)
        })
        .count()
}

/// The closed-form element families, each compared with the table.
///
/// The families are written for `(b, d) != (n, n)`. Some index patterns
/// coincide (`V_bb,bb` is both a diagonal and a swap element), so each
/// family is compared only on the entries no other family reaches, and the
/// shared entries are compared with the sum of the families that reach
/// them. The central element of odd `N` has its own closed form with
/// vanishing central exponent.
pub fn family_checks(p: &ParamSet, theta: Complex64, lambda: Complex64, table: &PotentialTable) -> Vec<FamilyCheck> {
    let n = p.n_states();
    let layout = p.layout();
    let l2 = lambda * lambda;
    let sum_eps = |b: usize, d: usize, signed: bool, f: &dyn Fn(Eps) -> Complex64| -> Complex64 {
        EPS.iter()
            .map(|&eps| {
                let s = if signed { eps.sign() } else { 1.0 };
                f(eps) * s / (l2 - pair_exponent(p, b, d, eps, theta))
            })
            .sum::<Complex64>()
            * (I * -0.5)
    };
    let ratio = |b: usize, d: usize, eps: Eps| l2 + pair_exponent(p, b, d, eps, theta);
    let single = |b: usize, d: usize, eps: Eps| (p.lookup(b, d, eps) * theta).exp();

    type Index = (usize, usize, usize, usize);
    type Family<'a> = (&'a str, Box<dyn Fn(usize, usize) -> (Index, Complex64) + 'a>);
    let families: Vec<Family> = vec![
        ("V_bb,dd", Box::new(|b, d| ((b, b, d, d), sum_eps(b, d, false, &|e| ratio(b, d, e))))),
        (
            "V_(b-bar)b,(d-bar)d",
            Box::new(|b, d| ((layout.bar(b), b, layout.bar(d), d), sum_eps(b, d, true, &|e| ratio(b, d, e)))),
        ),
        ("V_db,bd", Box::new(|b, d| ((d, b, b, d), sum_eps(b, d, false, &|e| single(b, d, e))))),
        (
            "V_(d-bar)b,(b-bar)d",
            Box::new(|b, d| ((layout.bar(d), b, layout.bar(b), d), sum_eps(b, d, true, &|e| single(b, d, e)))),
        ),
    ];

    // Every (family, index, value) the closed forms produce.
    let mut hits: std::collections::BTreeMap<Index, Vec<(usize, Complex64)>> = Default::default();
    for (fi, (_, f)) in families.iter().enumerate() {
        for b in 1..=n {
            for d in 1..=n {
                if layout.is_center(b) && layout.is_center(d) {
                    continue;
                }
                let (idx, value) = f(b, d);
                hits.entry(idx).or_default().push((fi, value));
            }
        }
    }
    // (actual, expected) pairs per family, then for the shared entries.
    let mut pairs: Vec<Vec<(Complex64, Complex64)>> = vec![Vec::new(); families.len() + 1];
    for (&(i, j, k, l), list) in &hits {
        let expected: Complex64 = list.iter().map(|(_, v)| v).sum();
        let mut owners: Vec<usize> = list.iter().map(|(fi, _)| *fi).collect();
        owners.dedup();
        let bucket = if owners.len() == 1 { owners[0] } else { families.len() };
        pairs[bucket].push((table.entry(i, j, k, l), expected));
    }
    let mut names: Vec<&str> = families.iter().map(|(name, _)| *name).collect();
    names.push("shared entries");
    if let Some(c) = (1..=n).find(|&a| layout.is_center(a)) {
        names.push("V_nn,nn");
        pairs.push(vec![(table.entry(c, c, c, c), central_element(lambda))]);
    }
    names.into_iter().zip(&pairs).map(|(name, list)| compare_family(name, list)).collect()
}

fn compare_family(family: &str, pairs: &[(Complex64, Complex64)]) -> FamilyCheck {
    let dev = pairs.iter().fold(0.0f64, |m, (a, e)| m.max((a - e).norm()));
    let norm2: f64 = pairs.iter().map(|(_, e)| e.norm_sqr()).sum();
    let scale = if norm2 > 0.0 {
        pairs.iter().map(|(a, e)| e.conj() * a).sum::<Complex64>() / norm2
    } else {
        ONE
    };
    let scaled = pairs.iter().fold(0.0f64, |m, (a, e)| m.max((a - scale * e).norm()));
    FamilyCheck {
        family: family.into(),
        compared: pairs.len(),
        max_deviation: dev,
        tolerance: FAMILY_TOL,
        agrees: dev <= FAMILY_TOL,
        best_scale: scale.into(),
        scaled_deviation: scaled,
    }
}

/// Closed form of the central element `-i (lambda^2 + 2) / (lambda^2 - 1)`.
pub fn central_element(lambda: Complex64) -> Complex64 {
    let l2 = lambda * lambda;
    -I * (l2 + 2.0) / (l2 - ONE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inverse, max_abs};
    use crate::params::RandomOptions;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn params(n: usize, seed: u64) -> ParamSet {
        ParamSet::random(n, seed, &RandomOptions::default()).unwrap()
    }

    #[test]
    fn excluded_set_at_zero_and_center() {
        let p = params(2, 1);
        assert_eq!(excluded_lambdas(&p, c(0.0)), vec![c(-1.0), c(1.0)]);
        let ex = excluded_lambdas(&p, c(1.0));
        for eps in EPS {
            let e = p.lookup(1, 1, eps).exp();
            assert!(ex.iter().any(|z| (z - e).norm() < 1e-14));
            assert!(ex.iter().any(|z| (z + e).norm() < 1e-14));
        }
        let p3 = params(3, 2);
        let ex = excluded_lambdas(&p3, c(0.37));
        assert!(ex.iter().any(|z| (z - c(1.0)).norm() < 1e-15));
        assert!(ex.iter().any(|z| (z + c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn closed_form_inverts_r_minus_lambda() {
        for n in 2..=5 {
            let p = params(n, 10 + n as u64);
            for (theta, lambda) in [(0.6, c(2.0)), (0.5, Complex64::new(3.0, 1.0)), (-0.8, c(0.5))] {
                let x = cayley_x(&p, c(theta), lambda).unwrap();
                assert!(cayley_residual(&p, c(theta), lambda, &x) < 1e-10, "N={n}");
                let dense = inverse(&(r_matrix(&p, c(theta)) - identity(n * n) * lambda)).unwrap();
                assert!(max_abs_diff(&x, &dense) < 1e-10);
            }
        }
    }

    #[test]
    fn shifted_center_is_inverted_too() {
        let p = params(3, 4).shifted(Complex64::new(0.3, 0.1)).unwrap();
        let x = cayley_x(&p, c(0.5), c(2.0)).unwrap();
        assert!(cayley_residual(&p, c(0.5), c(2.0), &x) < 1e-10);
    }

    #[test]
    fn large_lambda_limit() {
        let p = params(3, 5);
        let lambda = c(1e6);
        let x = cayley_x(&p, c(0.4), lambda).unwrap();
        assert!(max_abs_diff(&(x * -lambda), &identity(9)) < 1e-5);
    }

    #[test]
    fn diverges_near_excluded_value() {
        let p = params(2, 6);
        let theta = c(0.7);
        let e = excluded_lambdas(&p, theta)[0];
        let norms: Vec<f64> = [1e-2, 1e-4]
            .iter()
            .map(|&delta| max_abs(&cayley_x(&p, theta, e + delta * e.norm().max(1.0)).unwrap()))
            .collect();
        assert!(norms[1] > norms[0] * 10.0);
        let err = cayley_x(&p, theta, e * (1.0 + 1e-9)).unwrap_err();
        match err {
            BraidError::Singular { excluded, .. } => assert_eq!(excluded, format_complex(e)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_reconstructs_minus_i_v() {
        let p = params(4, 7);
        let t = potential(&p, c(0.3), c(3.0)).unwrap();
        assert!(t.reconstruction_residual <= 1e-10);
        assert!(t.cayley_residual <= 1e-10);
        assert_eq!(t.unclassified_nonzeros, 0);
        assert_eq!(t.family_check.len(), 5);
        let json = crate::json::to_string(&t);
        assert!(json.starts_with(r#"{"N":4,"theta":"#));
    }

    #[test]
    fn diagonal_families_agree_off_the_overlap() {
        // For b != d the two diagonal families sit on entries that no
        // other term reaches.
        let p = params(4, 8);
        let (theta, lambda) = (c(0.45), Complex64::new(3.0, 1.0));
        let t = potential(&p, theta, lambda).unwrap();
        let l2 = lambda * lambda;
        for (b, d) in [(1, 2), (2, 1), (1, 3)] {
            let expected: Complex64 = EPS
                .iter()
                .map(|&e| {
                    let x = pair_exponent(&p, b, d, e, theta);
                    (l2 + x) / (l2 - x)
                })
                .sum::<Complex64>()
                * (I * -0.5);
            assert!((t.entry(b, b, d, d) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn swap_families_differ_by_two_lambda() {
        let p = params(4, 12);
        let lambda = Complex64::new(2.0, 0.5);
        let t = potential(&p, c(0.3), lambda).unwrap();
        let by_name = |name: &str| t.family_check.iter().find(|f| f.family == name).unwrap().clone();
        assert!(by_name("V_bb,dd").agrees);
        assert!(by_name("V_(b-bar)b,(d-bar)d").agrees);
        for name in ["V_db,bd", "V_(d-bar)b,(b-bar)d"] {
            let f = by_name(name);
            assert!(!f.agrees);
            assert!((Complex64::from(f.best_scale) - lambda * 2.0).norm() < 1e-12);
            assert!(f.scaled_deviation < 1e-12);
        }
    }

    #[test]
    fn central_element_from_the_defining_identity() {
        // R acts as e^{c theta} on |nn>, so V_nn,nn = -i (lambda + 1)/(lambda - 1)
        // when the central exponent vanishes.
        let p = params(3, 9);
        let lambda = c(2.0);
        let t = potential(&p, c(0.8), lambda).unwrap();
        assert!((t.entry(2, 2, 2, 2) - Complex64::new(0.0, -3.0)).norm() < 1e-12);
        assert!((central_element(lambda) - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        let central = t.family_check.iter().find(|f| f.family == "V_nn,nn").unwrap();
        assert!((central.max_deviation - 1.0).abs() < 1e-12);
    }
}
