//! Orthonormal basis labels for the two carrier spaces and their truncations.
//!
//! `L₂(h)` carries the Peter–Weyl vectors `e^{(n)}_{ij}`; the DLSSV space
//! carries `u^n_{ij}` (sector [`Sector::Up`]) and `d^n_{ij}` (sector
//! [`Sector::Down`]). Every enumeration is n-major, then `i`, then `j`, then
//! sector with `Up` before `Down`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::HalfInt;

/// Largest spin retained on either space.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    nmax: HalfInt,
}

impl Truncation {
    pub fn new(nmax: HalfInt) -> Result<Self> {
        if nmax < HalfInt::ZERO {
            return Err(Error::InvalidParameter(format!("nmax must be nonnegative, got {nmax}")));
        }
        Ok(Truncation { nmax })
    }

    /// Truncation at `nmax = twice / 2`.
    pub fn from_twice(twice: i32) -> Result<Self> {
        Truncation::new(HalfInt::from_twice(twice))
    }

    pub fn nmax(self) -> HalfInt {
        self.nmax
    }

    /// All retained spins `0, ½, ..., nmax`.
    pub fn levels(self) -> impl Iterator<Item = HalfInt> + Clone {
        HalfInt::half_steps_to(self.nmax)
    }

    /// Levels whose images under one generator stay inside the truncation
    /// and whose squares do too: `n ≤ nmax − 1`.
    pub fn is_interior(self, n: HalfInt) -> bool {
        n <= self.nmax - HalfInt::ONE
    }

    pub fn contains_level(self, n: HalfInt) -> bool {
        n >= HalfInt::ZERO && n <= self.nmax
    }
}

/// Common behavior of basis labels.
pub trait BasisLabel: Copy + Eq + Hash + Ord + fmt::Display {
    fn level(&self) -> HalfInt;
    fn is_valid(&self) -> bool;
}

/// Label of `e^{(n)}_{ij}`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PwIndex {
    pub n: HalfInt,
    pub i: HalfInt,
    pub j: HalfInt,
}

impl PwIndex {
    /// Validating constructor.
    pub fn new(n: HalfInt, i: HalfInt, j: HalfInt) -> Result<Self> {
        let x = PwIndex { n, i, j };
        if x.is_valid() {
            Ok(x)
        } else {
            Err(Error::InvalidLabel(x.to_string()))
        }
    }

    /// Unchecked constructor from doubled components.
    pub const fn from_twice(n2: i32, i2: i32, j2: i32) -> Self {
        PwIndex { n: HalfInt::from_twice(n2), i: HalfInt::from_twice(i2), j: HalfInt::from_twice(j2) }
    }

    /// Label shifted by `(dn, di, dj)`; `None` when the result is invalid.
    pub fn shifted(self, dn: HalfInt, di: HalfInt, dj: HalfInt) -> Option<PwIndex> {
        let x = PwIndex { n: self.n + dn, i: self.i + di, j: self.j + dj };
        x.is_valid().then_some(x)
    }
}

impl BasisLabel for PwIndex {
    fn level(&self) -> HalfInt {
        self.n
    }

    fn is_valid(&self) -> bool {
        let PwIndex { n, i, j } = *self;
        n >= HalfInt::ZERO && i.abs() <= n && j.abs() <= n && i.same_parity(n) && j.same_parity(n)
    }
}

impl fmt::Display for PwIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[n={}, i={}, j={}]", self.n, self.i, self.j)
    }
}

impl fmt::Debug for PwIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    Up,
    Down,
}

/// Label of `u^n_{ij}` or `d^n_{ij}`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DlssvIndex {
    pub n: HalfInt,
    pub i: HalfInt,
    pub j: HalfInt,
    pub sector: Sector,
}

impl DlssvIndex {
    pub fn new(n: HalfInt, i: HalfInt, j: HalfInt, sector: Sector) -> Result<Self> {
        let x = DlssvIndex { n, i, j, sector };
        if x.is_valid() {
            Ok(x)
        } else {
            Err(Error::InvalidLabel(x.to_string()))
        }
    }

    pub const fn from_twice(n2: i32, i2: i32, j2: i32, sector: Sector) -> Self {
        DlssvIndex { n: HalfInt::from_twice(n2), i: HalfInt::from_twice(i2), j: HalfInt::from_twice(j2), sector }
    }

    pub fn up(n: HalfInt, i: HalfInt, j: HalfInt) -> Self {
        DlssvIndex { n, i, j, sector: Sector::Up }
    }

    pub fn down(n: HalfInt, i: HalfInt, j: HalfInt) -> Self {
        DlssvIndex { n, i, j, sector: Sector::Down }
    }
}

/// Whether `(n, i, j)` labels a pair `v^n_{ij} = (u^n_{ij}, d^n_{ij})`:
/// `i ∈ {−n..n}`, `j ∈ {−n−½..n+½}`, integer steps.
pub fn is_valid_v_label(n: HalfInt, i: HalfInt, j: HalfInt) -> bool {
    n >= HalfInt::ZERO && i.abs() <= n && i.same_parity(n) && j.abs() <= n + HalfInt::HALF && !j.same_parity(n)
}

/// Whether the `d` component of `v^n_{ij}` exists (it is zero for `j = ±(n+½)`).
pub fn has_down(n: HalfInt, i: HalfInt, j: HalfInt) -> bool {
    is_valid_v_label(n, i, j) && j.abs() <= n - HalfInt::HALF
}

impl BasisLabel for DlssvIndex {
    fn level(&self) -> HalfInt {
        self.n
    }

    fn is_valid(&self) -> bool {
        match self.sector {
            Sector::Up => is_valid_v_label(self.n, self.i, self.j),
            Sector::Down => has_down(self.n, self.i, self.j),
        }
    }
}

impl fmt::Display for DlssvIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.sector {
            Sector::Up => 'u',
            Sector::Down => 'd',
        };
        write!(f, "{tag}[n={}, i={}, j={}]", self.n, self.i, self.j)
    }
}

impl fmt::Debug for DlssvIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Summand {
    First,
    Second,
}

/// Label of a basis vector of `L₂(h) ⊕ L₂(h)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubledPwIndex {
    pub copy: Summand,
    pub inner: PwIndex,
}

impl BasisLabel for DoubledPwIndex {
    fn level(&self) -> HalfInt {
        self.inner.n
    }

    fn is_valid(&self) -> bool {
        self.inner.is_valid()
    }
}

impl fmt::Display for DoubledPwIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.copy {
            Summand::First => 1,
            Summand::Second => 2,
        };
        write!(f, "{}#{k}", self.inner)
    }
}

/// A frozen, ordered basis with position lookup.
#[derive(Clone, Debug)]
pub struct Enumeration<L: BasisLabel> {
    truncation: Truncation,
    labels: Vec<L>,
    positions: HashMap<L, usize>,
}

impl<L: BasisLabel> Enumeration<L> {
    fn from_labels(truncation: Truncation, labels: Vec<L>) -> Self {
        let positions = labels.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        Enumeration { truncation, labels, positions }
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = &L> {
        self.labels.iter()
    }

    /// Position of `x`, checking validity and truncation.
    pub fn index_of(&self, x: &L) -> Result<usize> {
        if !x.is_valid() {
            return Err(Error::InvalidLabel(x.to_string()));
        }
        self.positions
            .get(x)
            .copied()
            .ok_or_else(|| Error::OutOfTruncation { label: x.to_string(), nmax: self.truncation.nmax().to_string() })
    }

    /// Position of `x` if it is a retained label.
    pub fn position(&self, x: &L) -> Option<usize> {
        self.positions.get(x).copied()
    }

    pub fn vector_at(&self, k: usize) -> Option<L> {
        self.labels.get(k).copied()
    }

    /// Spin of every basis vector, in enumeration order.
    pub fn levels(&self) -> Vec<HalfInt> {
        self.labels.iter().map(BasisLabel::level).collect()
    }

    /// Mask of basis vectors on interior levels (`n ≤ nmax − 1`).
    pub fn interior_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|x| self.truncation.is_interior(x.level())).collect()
    }

    /// Mask of basis vectors with level `≤ cut`.
    pub fn level_mask(&self, cut: HalfInt) -> Vec<bool> {
        self.labels.iter().map(|x| x.level() <= cut).collect()
    }
}

pub type PwBasis = Enumeration<PwIndex>;
pub type DlssvBasis = Enumeration<DlssvIndex>;
pub type DoubledPwBasis = Enumeration<DoubledPwIndex>;

/// Peter–Weyl labels up to `t.nmax()`; length `Σ_{2n ≤ 2·nmax} (2n+1)²`.
pub fn enumerate_pw(t: Truncation) -> PwBasis {
    let mut labels = Vec::new();
    for n in t.levels() {
        for i in HalfInt::range_inclusive(-n, n) {
            for j in HalfInt::range_inclusive(-n, n) {
                labels.push(PwIndex { n, i, j });
            }
        }
    }
    Enumeration::from_labels(t, labels)
}

/// DLSSV labels up to `t.nmax()`: `W_n↑` has `(2n+1)(2n+2)` vectors and
/// `W_n↓` has `(2n+1)(2n)`.
pub fn enumerate_dlssv(t: Truncation) -> DlssvBasis {
    let mut labels = Vec::new();
    for n in t.levels() {
        for i in HalfInt::range_inclusive(-n, n) {
            for j in HalfInt::range_inclusive(-n - HalfInt::HALF, n + HalfInt::HALF) {
                labels.push(DlssvIndex::up(n, i, j));
                if has_down(n, i, j) {
                    labels.push(DlssvIndex::down(n, i, j));
                }
            }
        }
    }
    Enumeration::from_labels(t, labels)
}

/// `L₂(h) ⊕ L₂(h)`: the first copy in Peter–Weyl order, then the second.
pub fn enumerate_doubled(t: Truncation) -> DoubledPwBasis {
    let pw = enumerate_pw(t);
    let labels = [Summand::First, Summand::Second]
        .into_iter()
        .flat_map(|copy| pw.iter().map(move |&inner| DoubledPwIndex { copy, inner }))
        .collect();
    Enumeration::from_labels(t, labels)
}

/// Closed-form dimension of the truncated Peter–Weyl space.
pub fn pw_dimension(t: Truncation) -> usize {
    t.levels().map(|n| ((n.twice() + 1) as usize).pow(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(twice: i32) -> Truncation {
        Truncation::from_twice(twice).unwrap()
    }

    #[test]
    fn pw_lengths() {
        assert_eq!(enumerate_pw(t(0)).len(), 1);
        assert_eq!(enumerate_pw(t(1)).len(), 5);
        assert_eq!(enumerate_pw(t(4)).len(), 55);
        assert_eq!(pw_dimension(t(4)), 55);
    }

    #[test]
    fn dlssv_lengths() {
        assert_eq!(enumerate_dlssv(t(0)).len(), 2);
        assert_eq!(enumerate_dlssv(t(1)).len(), 10);
        assert_eq!(enumerate_dlssv(t(4)).len(), 110);
        let b = enumerate_dlssv(t(4));
        for n in t(4).levels() {
            let up = b.iter().filter(|x| x.n == n && x.sector == Sector::Up).count();
            let down = b.iter().filter(|x| x.n == n && x.sector == Sector::Down).count();
            let n2 = n.twice() as usize;
            assert_eq!(up, (n2 + 1) * (n2 + 2));
            assert_eq!(down, (n2 + 1) * n2);
        }
    }

    #[test]
    fn index_round_trip() {
        let pw = enumerate_pw(t(2));
        assert_eq!(pw.index_of(&pw.labels()[0]).unwrap(), 0);
        for (k, x) in pw.iter().enumerate() {
            assert_eq!(pw.index_of(x).unwrap(), k);
            assert_eq!(pw.vector_at(k), Some(*x));
        }
        let dl = enumerate_dlssv(t(2));
        for (k, x) in dl.iter().enumerate() {
            assert_eq!(dl.index_of(x).unwrap(), k);
        }
    }

    #[test]
    fn canonical_order_position() {
        let pw = enumerate_pw(t(1));
        let x = PwIndex::from_twice(1, -1, -1);
        assert_eq!(pw.index_of(&x).unwrap(), 1);
        let dl = enumerate_dlssv(t(1));
        assert_eq!(dl.labels()[0], DlssvIndex::from_twice(0, 0, -1, Sector::Up));
        // Up precedes Down at the same (n, i, j)
        let u = dl.index_of(&DlssvIndex::from_twice(1, -1, 0, Sector::Up)).unwrap();
        let d = dl.index_of(&DlssvIndex::from_twice(1, -1, 0, Sector::Down)).unwrap();
        assert_eq!(d, u + 1);
    }

    #[test]
    fn lookup_errors() {
        let pw = enumerate_pw(t(1));
        assert!(matches!(pw.index_of(&PwIndex::from_twice(2, 0, 0)), Err(Error::OutOfTruncation { .. })));
        assert!(matches!(pw.index_of(&PwIndex::from_twice(1, 0, 1)), Err(Error::InvalidLabel(_))));
        assert!(Truncation::from_twice(-1).is_err());
        assert!(PwIndex::new(HalfInt::ONE, HalfInt::HALF, HalfInt::ZERO).is_err());
    }
}
