//! Spectrum of the transfer matrix `T^(r)`.
//!
//! Write a basis state as a class sequence `kappa` (`kappa_k in 1..=n`)
//! plus bar bits `beta`. For `s in Z_2^r` (with `s_k = 0` on central
//! sites) the characters
//!
//! ```text
//! chi_{kappa,s} = sum_beta (-1)^{s.beta} |kappa, beta>
//! ```
//!
//! satisfy `T chi_{kappa,s} = e^{E theta} chi_{shift kappa, shift s}` with
//! `E = sum_k m_{kappa_{k+1} kappa_k}^{eps_k}` and `eps_k = (-1)^{s_k + s_{k+1}}`.
//! `E` is shift invariant, so every orbit of `(kappa, s)` of length `L`
//! contributes `e^{E theta} w_L^k`, `k = 0..L`. The bar-count parity
//! operator maps `s` to its complement; this decides which roots land in
//! the even and the odd closed subspace.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BraidError, Result};
use crate::json::ComplexDoc;
use crate::linalg::{
    eigenvalues, lex_cmp, normalize_max_coefficient, smallest_singular_vectors, Budget, ComplexMatrix,
};
use crate::params::{Eps, IndexLayout, ParamSet, SlotKey};
use crate::sparse::SparseOperator;
use crate::transfer::{check_transfer_budget, transfer_dense, BasisState, Exponent, SymbolicTransfer};

/// Bar-count parity of a closed subspace. Subspaces whose class sequence
/// contains the central index of odd `N` mix both parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceParity {
    Even,
    Odd,
    Merged,
}

/// Basis states closed under `T^(r)`: all barrings of the rotations of a
/// class sequence with a fixed bar-count parity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedSubspace {
    /// Lexicographically least rotation of the class sequence.
    pub seed: BasisState,
    pub parity: SubspaceParity,
    /// Sorted by row index.
    pub states: Vec<BasisState>,
    /// Least cyclic shift fixing the class sequence.
    pub period: usize,
}

/// Symbolic eigenvalue `w * e^{E theta}`, `w = e^{2 pi i k / d}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenvalueRecord {
    pub seed_state: BasisState,
    pub parity: SubspaceParity,
    pub period: usize,
    #[serde(skip)]
    pub exponent: Exponent,
    pub root_index: usize,
    /// `d` of the reduced root `k/d`.
    pub root_order: usize,
    pub multiplicity: usize,
}

impl EigenvalueRecord {
    pub fn root(&self) -> Complex64 {
        root_of_unity(self.root_index, self.root_order)
    }

    pub fn value_at(&self, p: &ParamSet, theta: Complex64) -> Complex64 {
        self.root() * (self.exponent.value(p) * theta).exp()
    }
}

/// `e^{2 pi i k / d}`, exact on the axes.
pub fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let k = k % d;
    if (4 * k).is_multiple_of(d) {
        return match 4 * k / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `k / n` in lowest terms, with `0 / n = 0 / 1`.
fn reduce(k: usize, n: usize) -> (usize, usize) {
    let g = gcd(k, n);
    (k / g, n / g)
}

fn rotations<T: Clone>(v: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..v.len()).map(move |j| {
        let mut w = v.to_vec();
        w.rotate_left(j);
        w
    })
}

/// Least `d >= 1` with `rotate(v, d) = v`.
fn period_of<T: PartialEq + Clone>(v: &[T]) -> usize {
    (1..=v.len())
        .find(|&d| rotations(v).nth(d % v.len()).is_some_and(|w| w == v))
        .unwrap_or(v.len())
}

/// Canonical class sequences: least rotations of every `kappa in [n]^r`.
fn canonical_class_sequences(layout: &IndexLayout, r: usize) -> Vec<Vec<usize>> {
    let n = layout.half();
    let total = n.pow(r as u32);
    (0..total)
        .map(|idx| BasisState::decode(idx, n, r).0)
        .filter(|kappa| rotations(kappa).all(|w| kappa.as_slice() <= w.as_slice()))
        .collect()
}

fn bar_count(state: &[usize], layout: &IndexLayout) -> usize {
    state.iter().filter(|&&b| layout.is_barred(b)).count()
}

fn has_center(kappa: &[usize], layout: &IndexLayout) -> bool {
    kappa.iter().any(|&k| layout.is_center(k))
}

fn subspace_for(kappa: &[usize], parity: SubspaceParity, layout: &IndexLayout) -> ClosedSubspace {
    let n_states = layout.n_states();
    let r = kappa.len();
    let period = period_of(kappa);
    let free: Vec<usize> = (0..r).filter(|&k| !layout.is_center(kappa[k])).collect();
    let mut states = Vec::new();
    for rot in rotations(kappa).take(period) {
        let free_rot: Vec<usize> = (0..r).filter(|&k| !layout.is_center(rot[k])).collect();
        debug_assert_eq!(free_rot.len(), free.len());
        for mask in 0u64..(1 << free_rot.len()) {
            let keep = match parity {
                SubspaceParity::Even => mask.count_ones() % 2 == 0,
                SubspaceParity::Odd => mask.count_ones() % 2 == 1,
                SubspaceParity::Merged => true,
            };
            if !keep {
                continue;
            }
            let mut s = rot.clone();
            for (bit, &site) in free_rot.iter().enumerate() {
                if (mask >> bit) & 1 == 1 {
                    s[site] = layout.bar(s[site]);
                }
            }
            states.push(BasisState(s));
        }
    }
    states.sort_by_key(|s| s.encode(n_states));
    ClosedSubspace {
        seed: BasisState(kappa.to_vec()),
        parity,
        states,
        period,
    }
}

/// Partition of the `N^r` basis states into closed subspaces.
pub fn orbit_decompose(n_states: usize, r: usize) -> Result<Vec<ClosedSubspace>> {
    let layout = IndexLayout::new(n_states)?;
    check_transfer_budget(n_states, r, &Budget::from_env())?;
    let mut out = Vec::new();
    for kappa in canonical_class_sequences(&layout, r) {
        if has_center(&kappa, &layout) {
            out.push(subspace_for(&kappa, SubspaceParity::Merged, &layout));
        } else {
            out.push(subspace_for(&kappa, SubspaceParity::Even, &layout));
            out.push(subspace_for(&kappa, SubspaceParity::Odd, &layout));
        }
    }
    Ok(out)
}

/// The subspace containing `state`.
pub fn subspace_of(state: &BasisState, n_states: usize) -> Result<ClosedSubspace> {
    let layout = IndexLayout::new(n_states)?;
    if state.0.is_empty() || state.0.iter().any(|&b| !(1..=n_states).contains(&b)) {
        return Err(BraidError::Domain(format!("{state:?} is not a basis state for N={n_states}")));
    }
    let kappa: Vec<usize> = state.0.iter().map(|&b| layout.class(b)).collect();
    let canonical = rotations(&kappa).min().expect("nonempty");
    let parity = if has_center(&kappa, &layout) {
        SubspaceParity::Merged
    } else if bar_count(&state.0, &layout).is_multiple_of(2) {
        SubspaceParity::Even
    } else {
        SubspaceParity::Odd
    };
    Ok(subspace_for(&canonical, parity, &layout))
}

/// Exponent of the character orbit `(kappa, s)`.
fn character_exponent(layout: &IndexLayout, kappa: &[usize], s: &[u8]) -> Exponent {
    let r = kappa.len();
    let mut e = Exponent::zero(layout.slot_count());
    for k in 0..r {
        let next = (k + 1) % r;
        let eps = if s[k] == s[next] { Eps::Plus } else { Eps::Minus };
        e.0[layout.slot(kappa[next], kappa[k], eps)] += 1;
    }
    e
}

/// One orbit of characters with the roots it places in each parity.
struct CharacterOrbit {
    exponent: Exponent,
    length: usize,
    roots: Vec<(SubspaceParity, usize)>,
}

fn character_orbits(layout: &IndexLayout, kappa: &[usize]) -> Vec<CharacterOrbit> {
    let r = kappa.len();
    let d = period_of(kappa);
    let free: Vec<usize> = (0..r).filter(|&k| !layout.is_center(kappa[k])).collect();
    let center = free.len() < r;
    // Orbits of s under the stabilizer of kappa (shifts by multiples of d).
    let shift_by = |s: &[u8], j: usize| {
        let mut w = s.to_vec();
        w.rotate_left(j * d % r);
        w
    };
    let steps = r / d;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << free.len()) {
        let mut s = vec![0u8; r];
        for (bit, &site) in free.iter().enumerate() {
            s[site] = ((mask >> bit) & 1) as u8;
        }
        if seen.contains(&s) {
            continue;
        }
        let orbit: Vec<Vec<u8>> = (0..steps).map(|j| shift_by(&s, j)).collect();
        let size = (1..=steps).find(|&j| orbit[j % steps] == s).unwrap_or(steps);
        let length = d * size;
        let exponent = character_exponent(layout, kappa, &s);
        let roots = if center {
            (0..length).map(|k| (SubspaceParity::Merged, k)).collect()
        } else {
            let complement: Vec<u8> = s.iter().map(|&x| 1 - x).collect();
            if orbit.contains(&complement) {
                (0..length)
                    .map(|k| {
                        let parity = if k % 2 == 0 { SubspaceParity::Even } else { SubspaceParity::Odd };
                        (parity, k)
                    })
                    .collect()
            } else {
                for w in (0..steps).map(|j| shift_by(&complement, j)) {
                    seen.insert(w);
                }
                (0..length)
                    .flat_map(|k| [(SubspaceParity::Even, k), (SubspaceParity::Odd, k)])
                    .collect()
            }
        };
        for w in orbit {
            seen.insert(w);
        }
        out.push(CharacterOrbit {
            exponent,
            length,
            roots,
        });
    }
    out
}

/// All eigenvalues of `T^(r)` as symbolic records, grouped by closed
/// subspace, exponent and reduced root. Multiplicities sum to `N^r`.
pub fn closed_form_spectrum(p: &ParamSet, r: usize) -> Result<Vec<EigenvalueRecord>> {
    let layout = *p.layout();
    check_transfer_budget(layout.n_states(), r, &Budget::from_env())?;
    let sequences = canonical_class_sequences(&layout, r);
    let per_kappa: Vec<Vec<EigenvalueRecord>> = sequences
        .par_iter()
        .map(|kappa| {
            let period = period_of(kappa);
            let mut grouped: BTreeMap<(SubspaceParity, Exponent, (usize, usize)), usize> = BTreeMap::new();
            for orbit in character_orbits(&layout, kappa) {
                for &(parity, k) in &orbit.roots {
                    *grouped
                        .entry((parity, orbit.exponent.clone(), reduce(k, orbit.length)))
                        .or_insert(0) += 1;
                }
            }
            grouped
                .into_iter()
                .map(|((parity, exponent, (k, d)), multiplicity)| EigenvalueRecord {
                    seed_state: BasisState(kappa.clone()),
                    parity,
                    period,
                    exponent,
                    root_index: k,
                    root_order: d,
                    multiplicity,
                })
                .collect()
        })
        .collect();
    Ok(per_kappa.into_iter().flatten().collect())
}

/// The records' values at `theta`, each repeated by multiplicity, sorted.
pub fn closed_form_values(p: &ParamSet, records: &[EigenvalueRecord], theta: Complex64) -> Vec<Complex64> {
    let mut values: Vec<Complex64> = records
        .iter()
        .flat_map(|rec| std::iter::repeat_n(rec.value_at(p, theta), rec.multiplicity))
        .collect();
    values.sort_by(lex_cmp);
    values
}

/// One eigenpair of a closed-subspace block; the vector is indexed like
/// the subspace's states and has its largest coefficient equal to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

fn restrict(op: &SparseOperator, subspace: &ClosedSubspace, n_states: usize) -> Result<ComplexMatrix> {
    let index: BTreeMap<usize, usize> = subspace
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.encode(n_states), i))
        .collect();
    let dim = subspace.states.len();
    let mut block = ComplexMatrix::zeros(dim, dim);
    for (&global_col, &local_col) in &index {
        for ((row, col), z) in op.iter() {
            if col != global_col {
                continue;
            }
            let Some(&local_row) = index.get(&row) else {
                return Err(BraidError::Numerical(format!(
                    "subspace seeded by {:?} is not closed under T",
                    subspace.seed.0
                )));
            };
            block[(local_row, local_col)] += z;
        }
    }
    Ok(block)
}

/// `T^(r)(theta)` restricted to a closed subspace.
pub fn subspace_block(p: &ParamSet, subspace: &ClosedSubspace, theta: Complex64) -> Result<ComplexMatrix> {
    let budget = Budget::from_env();
    budget.check_block(subspace.states.len())?;
    let r = subspace.seed.sites();
    let sym = SymbolicTransfer::new(p.n_states(), r, &budget)?;
    // Only the subspace's columns are needed.
    let mut op = SparseOperator::zeros(sym.dim());
    let denom = sym.denominator() as f64;
    for s in &subspace.states {
        let col = s.encode(p.n_states());
        for t in sym.column(col) {
            let z = (t.exponent.value(p) * theta).exp() * (t.numerator as f64 / denom);
            op.add_to(t.row, col, z);
        }
    }
    restrict(&op, subspace, p.n_states())
}

/// Eigenpairs of the restricted block by Schur decomposition; vectors of a
/// cluster of (numerically) equal eigenvalues span its eigenspace.
pub fn block_spectrum(p: &ParamSet, subspace: &ClosedSubspace, theta: Complex64) -> Result<Vec<EigenPair>> {
    let block = subspace_block(p, subspace, theta)?;
    eigenpairs(&block)
}

fn eigenpairs(block: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    let dim = block.nrows();
    let mut values = eigenvalues(block)?;
    values.sort_by(lex_cmp);
    let scale = values.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let tol = 1e-8 * scale;
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in values {
        match clusters.iter_mut().find(|c| (c[0] - z).norm() <= tol) {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let mut out = Vec::with_capacity(dim);
    for cluster in clusters {
        let mean = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let shifted = block - ComplexMatrix::identity(dim, dim) * mean;
        for (_, mut v) in smallest_singular_vectors(&shifted, cluster.len()) {
            normalize_max_coefficient(&mut v);
            out.push(EigenPair { value: mean, vector: v });
        }
    }
    Ok(out)
}

/// Largest residual `|B2 v - mu v| / |v|` of the eigenvectors found at
/// `theta` against the block at `theta2`, `mu` the Rayleigh quotient.
/// Zero (to rounding) when the eigenstates are `theta`-independent.
pub fn eigenvector_drift(p: &ParamSet, subspace: &ClosedSubspace, theta: Complex64, theta2: Complex64) -> Result<f64> {
    let pairs = block_spectrum(p, subspace, theta)?;
    let b2 = subspace_block(p, subspace, theta2)?;
    let scale = b2.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let mut worst: f64 = 0.0;
    for pair in pairs {
        let v = nalgebra::DVector::from_vec(pair.vector);
        let bv = &b2 * &v;
        let norm2 = v.dotc(&v);
        let mu = v.dotc(&bv) / norm2;
        let resid = (&bv - &v * mu).norm() / norm2.re.sqrt();
        worst = worst.max(resid / scale);
    }
    Ok(worst)
}

/// Eigenvalues of the dense `T^(r)(theta)`, sorted by `(re, im)`.
pub fn oracle_spectrum(p: &ParamSet, r: usize, theta: Complex64) -> Result<Vec<Complex64>> {
    let dense = transfer_dense(p, r, theta)?;
    let mut values = eigenvalues(&dense)?;
    values.sort_by(lex_cmp);
    Ok(values)
}

/// Outcome of pairing two eigenvalue multisets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchReport {
    pub matched: bool,
    pub count: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

/// Greedy nearest-neighbour pairing of `a` against `b`, both in `(re, im)`
/// order; `tol` is scaled by the largest modulus (at least 1).
pub fn match_spectra(a: &[Complex64], b: &[Complex64], tol: f64) -> MatchReport {
    let scale = a.iter().chain(b).fold(1.0f64, |acc, z| acc.max(z.norm()));
    let tolerance = tol * scale;
    if a.len() != b.len() {
        return MatchReport {
            matched: false,
            count: a.len().min(b.len()),
            max_deviation: f64::INFINITY,
            tolerance,
        };
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .expect("equal lengths leave a candidate");
        used[best] = true;
        worst = worst.max(dist);
    }
    MatchReport {
        matched: worst <= tolerance,
        count: a.len(),
        max_deviation: worst,
        tolerance,
    }
}

/// One exponent pattern `(r - s) m^(+) + s m^(-)` of an identical-index
/// subspace together with the multiplets it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultipletEntry {
    /// Number of `m^(-)` factors.
    pub minus_count: usize,
    /// Size of the root set `{w_d^k}`; 1 for the trace doublet members.
    pub root_set_size: usize,
    /// Number of multiplets with this pattern and size (`n_s`).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdenticalIndexCensus {
    /// The class `i` of `|i i .. i>`.
    pub class_index: usize,
    pub entries: Vec<MultipletEntry>,
    /// Number of zero-sum multiplets (root sets of size > 1).
    pub zero_sum_multiplets: usize,
    /// Largest `|sum_k w_d^k|` over the zero-sum multiplets.
    pub max_root_sum: f64,
    /// Dense block eigenvalues against the census eigenvalues at `theta = 0.7`.
    pub block_check: MatchReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultipletCensus {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub r: usize,
    pub subspaces: Vec<IdenticalIndexCensus>,
    /// Zero-sum multiplets per identical-index subspace.
    pub fermat_total: usize,
    /// `(2^r - 2) / r` when `r` is prime.
    pub fermat_expected: Option<usize>,
}

fn is_prime(r: usize) -> bool {
    r >= 2 && (2..r).take_while(|d| d * d <= r).all(|d| !r.is_multiple_of(d))
}

/// Census of the zero-sum multiplets on the identical-index subspaces
/// `|i i .. i>` (all barrings), `i` a non-central class.
pub fn multiplet_census(p: &ParamSet, r: usize) -> Result<MultipletCensus> {
    if r < 2 {
        return Err(BraidError::Domain("census needs r >= 2".into()));
    }
    let layout = *p.layout();
    let theta = Complex64::new(0.7, 0.0);
    let classes: Vec<usize> = (1..=layout.half()).filter(|&i| !layout.is_center(i)).collect();
    let mut subspaces = Vec::new();
    for &i in &classes {
        let kappa = vec![i; r];
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut zero_sum = 0;
        let mut max_root_sum: f64 = 0.0;
        let mut census_values = Vec::new();
        for orbit in character_orbits(&layout, &kappa) {
            let minus = match layout.slot_key(layout.slot(i, i, Eps::Minus)) {
                SlotKey::Free(_) => orbit.exponent.0[layout.slot(i, i, Eps::Minus)] as usize,
                SlotKey::Center => 0,
            };
            // A complement pair contributes two multiplets with the same roots.
            let copies = orbit.roots.len() / orbit.length;
            *counts.entry((minus, orbit.length)).or_insert(0) += copies;
            if orbit.length > 1 {
                zero_sum += copies;
                let sum: Complex64 = (0..orbit.length).map(|k| root_of_unity(k, orbit.length)).sum();
                max_root_sum = max_root_sum.max(sum.norm());
            }
            let e = (orbit.exponent.value(p) * theta).exp();
            for &(_, k) in &orbit.roots {
                census_values.push(root_of_unity(k, orbit.length) * e);
            }
        }
        census_values.sort_by(lex_cmp);
        let mut block_values = Vec::new();
        for parity in [SubspaceParity::Even, SubspaceParity::Odd] {
            let sub = subspace_for(&kappa, parity, &layout);
            block_values.extend(eigenvalues(&subspace_block(p, &sub, theta)?)?);
        }
        block_values.sort_by(lex_cmp);
        subspaces.push(IdenticalIndexCensus {
            class_index: i,
            entries: counts
                .into_iter()
                .map(|((minus_count, root_set_size), multiplicity)| MultipletEntry {
                    minus_count,
                    root_set_size,
                    multiplicity,
                })
                .collect(),
            zero_sum_multiplets: zero_sum,
            max_root_sum,
            block_check: match_spectra(&census_values, &block_values, 1e-8),
        });
    }
    let fermat_total = subspaces.first().map_or(0, |s| s.zero_sum_multiplets);
    Ok(MultipletCensus {
        n_states: layout.n_states(),
        r,
        subspaces,
        fermat_total,
        fermat_expected: is_prime(r).then(|| ((1usize << r) - 2) / r),
    })
}

/// Wire form of one exponent coefficient; the central exponent of odd `N`
/// is written with `eps = "c"` and `i = j = n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentTermDoc {
    pub i: usize,
    pub j: usize,
    pub eps: &'static str,
    pub coeff: u32,
}

pub fn exponent_doc(layout: &IndexLayout, e: &Exponent) -> Vec<ExponentTermDoc> {
    e.0.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(slot, &c)| match layout.slot_key(slot) {
            SlotKey::Free(k) => ExponentTermDoc {
                i: k.i,
                j: k.j,
                eps: k.eps.as_str(),
                coeff: c as u32,
            },
            SlotKey::Center => ExponentTermDoc {
                i: layout.half(),
                j: layout.half(),
                eps: "c",
                coeff: c as u32,
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordDoc {
    pub seed_state: Vec<usize>,
    pub parity: SubspaceParity,
    pub period: usize,
    pub root_index: usize,
    pub root_order: usize,
    pub exponent: Vec<ExponentTermDoc>,
    pub multiplicity: usize,
    pub value: ComplexDoc,
}

pub fn record_docs(p: &ParamSet, records: &[EigenvalueRecord], theta: Complex64) -> Vec<RecordDoc> {
    records
        .iter()
        .map(|rec| RecordDoc {
            seed_state: rec.seed_state.0.clone(),
            parity: rec.parity,
            period: rec.period,
            root_index: rec.root_index,
            root_order: rec.root_order,
            exponent: exponent_doc(p.layout(), &rec.exponent),
            multiplicity: rec.multiplicity,
            value: rec.value_at(p, theta).into(),
        })
        .collect()
}

/// Sum of multiplicities.
pub fn total_multiplicity(records: &[EigenvalueRecord]) -> usize {
    records.iter().map(|r| r.multiplicity).sum()
}
