//! Free parameters `m_ab^(eps)` of the braid matrix and their symmetry.
//!
//! For `N = 2n` the independent parameters are `m_ij^(eps)` with
//! `i, j in 1..=n`. For `N = 2n - 1` they are the same block minus the
//! pair `(n, n)`; the coefficient of the central projector is fixed by
//! normalization (optionally `e^{m theta}` through `center_shift`).
//!
//! Every full-index lookup `m_ab` with `a, b in 1..=N` resolves to the
//! independent entry at the bar classes `(min(a, a_bar), min(b, b_bar))`,
//! where `a_bar = N + 1 - a`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BraidError, Result};
use crate::json::ComplexDoc;

/// Sign label of a projector family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Eps {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Eps {
    pub const ALL: [Eps; 2] = [Eps::Plus, Eps::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Eps::Plus => 1.0,
            Eps::Minus => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Eps::Plus => 0,
            Eps::Minus => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Eps::Plus => "+",
            Eps::Minus => "-",
        }
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Independent parameter `m_ij^(eps)`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamKey {
    pub i: usize,
    pub j: usize,
    pub eps: Eps,
}

impl ParamKey {
    pub fn new(i: usize, j: usize, eps: Eps) -> Self {
        Self { i, j, eps }
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m_{{{},{}}}^({})", self.i, self.j, self.eps)
    }
}

/// What a parameter slot refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SlotKey {
    Free(ParamKey),
    /// Exponent of the central projector `P_nn` (odd `N` only).
    Center,
}

/// Index arithmetic for a given `N`: bars, bar classes and parameter slots.
///
/// Slots enumerate `(i, j, eps)` over the `n x n` class block; for odd `N`
/// slot `(n, n, +)` stands for the central exponent and `(n, n, -)` is
/// never produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexLayout {
    n_states: usize,
    half: usize,
}

impl IndexLayout {
    pub fn new(n_states: usize) -> Result<Self> {
        if n_states < 2 {
            return Err(BraidError::Domain(format!(
                "N must be at least 2, got {n_states}"
            )));
        }
        Ok(Self {
            n_states,
            half: n_states.div_ceil(2),
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// `n` with `N = 2n` or `N = 2n - 1`.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn parity(&self) -> Parity {
        if self.n_states.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bar(&self, a: usize) -> usize {
        self.n_states + 1 - a
    }

    /// Representative of `{a, a_bar}` in `1..=n`.
    pub fn class(&self, a: usize) -> usize {
        a.min(self.bar(a))
    }

    /// `a` is the self-conjugate index `n` of odd `N`.
    pub fn is_center(&self, a: usize) -> bool {
        a == self.bar(a)
    }

    pub fn is_barred(&self, a: usize) -> bool {
        a > self.bar(a)
    }

    pub fn slot_count(&self) -> usize {
        2 * self.half * self.half
    }

    /// Slot holding `m_ab^(eps)` for full indices `a, b in 1..=N`.
    pub fn slot(&self, a: usize, b: usize, eps: Eps) -> usize {
        let (i, j) = (self.class(a), self.class(b));
        if self.is_center(i) && self.is_center(j) {
            return self.center_slot();
        }
        ((i - 1) * self.half + (j - 1)) * 2 + eps.index()
    }

    pub fn center_slot(&self) -> usize {
        ((self.half - 1) * self.half + (self.half - 1)) * 2
    }

    pub fn slot_key(&self, slot: usize) -> SlotKey {
        if self.parity() == Parity::Odd && slot == self.center_slot() {
            return SlotKey::Center;
        }
        let eps = if slot.is_multiple_of(2) { Eps::Plus } else { Eps::Minus };
        let ij = slot / 2;
        SlotKey::Free(ParamKey::new(ij / self.half + 1, ij % self.half + 1, eps))
    }

    /// The independent parameter keys, in lexicographic order.
    pub fn independent_keys(&self) -> Vec<ParamKey> {
        let n = self.half;
        let odd = self.parity() == Parity::Odd;
        let mut keys = Vec::with_capacity(self.slot_count());
        for i in 1..=n {
            for j in 1..=n {
                if odd && i == n && j == n {
                    continue;
                }
                for eps in Eps::ALL {
                    keys.push(ParamKey::new(i, j, eps));
                }
            }
        }
        keys
    }

    fn is_independent(&self, key: &ParamKey) -> bool {
        let n = self.half;
        (1..=n).contains(&key.i)
            && (1..=n).contains(&key.j)
            && !(self.parity() == Parity::Odd && key.i == n && key.j == n)
    }
}

/// Number of independent scalars: `N^2/2` for even `N`, `(N+3)(N-1)/2` for odd.
pub fn count_free_parameters(n_states: usize) -> Result<usize> {
    IndexLayout::new(n_states)?;
    Ok(if n_states.is_multiple_of(2) {
        n_states * n_states / 2
    } else {
        (n_states + 3) * (n_states - 1) / 2
    })
}

/// A validated, immutable set of braid-matrix parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    layout: IndexLayout,
    values: Vec<Complex64>,
    center_shift: Complex64,
}

impl ParamSet {
    /// Build from exactly the independent entries for `n_states`.
    pub fn new(
        n_states: usize,
        entries: impl IntoIterator<Item = (ParamKey, Complex64)>,
        center_shift: Complex64,
    ) -> Result<Self> {
        let layout = IndexLayout::new(n_states)?;
        if layout.parity() == Parity::Even && center_shift != Complex64::new(0.0, 0.0) {
            return Err(BraidError::ConstraintViolation {
                index: "center_shift".into(),
                reason: format!("must be zero for even N={n_states}"),
            });
        }
        if !(center_shift.re.is_finite() && center_shift.im.is_finite()) {
            return Err(BraidError::Domain("center_shift is not finite".into()));
        }
        let mut seen: BTreeMap<ParamKey, Complex64> = BTreeMap::new();
        for (key, value) in entries {
            if !layout.is_independent(&key) {
                return Err(BraidError::ConstraintViolation {
                    index: key.to_string(),
                    reason: format!("not an independent parameter for N={n_states}"),
                });
            }
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(BraidError::Domain(format!("{key} is not finite")));
            }
            if seen.insert(key, value).is_some() {
                return Err(BraidError::ConstraintViolation {
                    index: key.to_string(),
                    reason: "given more than once".into(),
                });
            }
        }
        let mut values = vec![Complex64::new(0.0, 0.0); layout.slot_count()];
        for key in layout.independent_keys() {
            let value = seen.get(&key).ok_or_else(|| BraidError::ConstraintViolation {
                index: key.to_string(),
                reason: "missing".into(),
            })?;
            values[layout.slot(key.i, key.j, key.eps)] = *value;
        }
        if layout.parity() == Parity::Odd {
            values[layout.center_slot()] = center_shift;
        }
        Ok(Self {
            layout,
            values,
            center_shift,
        })
    }

    /// Deterministic random parameters.
    pub fn random(n_states: usize, seed: u64, options: &RandomOptions) -> Result<Self> {
        let layout = IndexLayout::new(n_states)?;
        let (lo, hi) = options.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(BraidError::Domain(format!(
                "random range [{lo}, {hi}) is empty or not finite"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scalar = |x: f64| {
            if options.imaginary {
                Complex64::new(0.0, x)
            } else {
                Complex64::new(x, 0.0)
            }
        };
        let mut entries = Vec::new();
        for key in layout.independent_keys() {
            if key.eps == Eps::Minus {
                continue;
            }
            let mut plus = rng.random_range(lo..hi);
            let mut minus = rng.random_range(lo..hi);
            if options.boltzmann {
                while plus == minus {
                    minus = rng.random_range(lo..hi);
                }
                if plus < minus {
                    std::mem::swap(&mut plus, &mut minus);
                }
            }
            entries.push((key, scalar(plus)));
            entries.push((ParamKey::new(key.i, key.j, Eps::Minus), scalar(minus)));
        }
        Self::new(n_states, entries, Complex64::new(0.0, 0.0))
    }

    pub fn layout(&self) -> &IndexLayout {
        &self.layout
    }

    pub fn n_states(&self) -> usize {
        self.layout.n_states
    }

    pub fn parity(&self) -> Parity {
        self.layout.parity()
    }

    pub fn center_shift(&self) -> Complex64 {
        self.center_shift
    }

    /// `m_ab^(eps)` for full indices `a, b in 1..=N`.
    ///
    /// For odd `N`, `m_nn^(+) = m_nn^(-) = center_shift`.
    pub fn lookup(&self, a: usize, b: usize, eps: Eps) -> Complex64 {
        assert!(
            (1..=self.n_states()).contains(&a) && (1..=self.n_states()).contains(&b),
            "index out of range 1..={}",
            self.n_states()
        );
        self.values[self.layout.slot(a, b, eps)]
    }

    pub fn slot_value(&self, slot: usize) -> Complex64 {
        self.values[slot]
    }

    pub fn get(&self, key: &ParamKey) -> Option<Complex64> {
        self.layout
            .is_independent(key)
            .then(|| self.values[self.layout.slot(key.i, key.j, key.eps)])
    }

    /// Independent entries in key order.
    pub fn entries(&self) -> Vec<(ParamKey, Complex64)> {
        self.layout
            .independent_keys()
            .into_iter()
            .map(|k| (k, self.values[self.layout.slot(k.i, k.j, k.eps)]))
            .collect()
    }

    /// Largest `|m|` over every slot in use, including the center.
    pub fn max_abs(&self) -> f64 {
        let mut m = self.center_shift.norm();
        for (_, v) in self.entries() {
            m = m.max(v.norm());
        }
        m
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.entries().iter().all(|(_, v)| v.re == 0.0) && self.center_shift.re == 0.0
    }

    /// Add `m` to every entry and set `center_shift = m`: the braid matrix
    /// picks up the overall factor `e^{m theta}`. Odd `N` only.
    pub fn shifted(&self, m: Complex64) -> Result<Self> {
        if self.parity() == Parity::Even {
            return Err(BraidError::Unsupported(
                "parameter shift applies to odd N only".into(),
            ));
        }
        let entries = self.entries().into_iter().map(|(k, v)| (k, v + m));
        Self::new(self.n_states(), entries, m)
    }

    pub fn to_doc(&self) -> ParamDoc {
        ParamDoc {
            n_states: self.n_states(),
            entries: self
                .entries()
                .into_iter()
                .map(|(k, v)| EntryDoc {
                    i: k.i,
                    j: k.j,
                    eps: k.eps,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
            center_shift: ComplexDoc::from(self.center_shift),
        }
    }

    pub fn from_doc(doc: &ParamDoc) -> Result<Self> {
        let entries = doc
            .entries
            .iter()
            .map(|e| (ParamKey::new(e.i, e.j, e.eps), Complex64::new(e.re, e.im)));
        Self::new(doc.n_states, entries, doc.center_shift.into())
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(&self.to_doc())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ParamDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }
}

/// Options for [`ParamSet::random`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomOptions {
    /// Half-open interval the (real or imaginary) parts are drawn from.
    pub range: (f64, f64),
    /// Draw purely imaginary entries (unitary braid matrices for real theta).
    pub imaginary: bool,
    /// Enforce `m_ab^(+) > m_ab^(-)` for every pair.
    pub boltzmann: bool,
}

impl Default for RandomOptions {
    fn default() -> Self {
        Self {
            range: (-1.0, 1.0),
            imaginary: false,
            boltzmann: false,
        }
    }
}

/// Wire form of a parameter set. Entry order carries no meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDoc {
    #[serde(rename = "N")]
    pub n_states: usize,
    pub entries: Vec<EntryDoc>,
    #[serde(default)]
    pub center_shift: ComplexDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub i: usize,
    pub j: usize,
    pub eps: Eps,
    pub re: f64,
    pub im: f64,
}
