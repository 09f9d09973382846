//! Diagonal Dirac operators on the Peter–Weyl basis and their spectral
//! bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_pw, PwBasis, Truncation};
use crate::qarith::HalfInt;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquivarianceSide {
    /// Commutes with the left regular action; eigenvalues depend on `(n, j)`.
    Left,
    /// Commutes with the right regular action; eigenvalues depend on `(n, i)`.
    Right,
}

/// `λ = a·n + b` when `w < n − k`, and `c·n + d` when `w ≥ n − k`, where `w`
/// is `j` for left models and `i` for right ones.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueModel {
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub side: EquivarianceSide,
}

impl EigenvalueModel {
    pub const D1: EigenvalueModel = EigenvalueModel::left(0, -2.0, 0.0, 2.0, 1.0);
    pub const D2: EigenvalueModel = EigenvalueModel::left(0, -2.0, -1.0, 2.0, 1.0);

    pub const fn left(k: u32, a: f64, b: f64, c: f64, d: f64) -> Self {
        EigenvalueModel { k, a, b, c, d, side: EquivarianceSide::Left }
    }

    pub const fn right(k: u32, a: f64, b: f64, c: f64, d: f64) -> Self {
        EigenvalueModel { k, a, b, c, d, side: EquivarianceSide::Right }
    }

    /// `ac < 0`: the two branches have opposite signs for large `n`.
    pub fn is_spectral_grade(&self) -> bool {
        self.a * self.c < 0.0
    }

    pub fn eigenvalue(&self, n: HalfInt, i: HalfInt, j: HalfInt) -> f64 {
        let w = match self.side {
            EquivarianceSide::Left => j,
            EquivarianceSide::Right => i,
        };
        let n_f = n.to_f64();
        if w.twice() < n.twice() - 2 * self.k as i32 {
            self.a * n_f + self.b
        } else {
            self.c * n_f + self.d
        }
    }

    /// Eigenvalues on level `n` with multiplicities.
    pub fn level(&self, n: HalfInt) -> Vec<(f64, u64)> {
        let n2 = n.twice() as i64;
        let low = (n2 - self.k as i64).clamp(0, n2 + 1) as u64;
        let high = (n2 + 1) as u64 - low;
        let width = (n2 + 1) as u64;
        let n_f = n.to_f64();
        let mut out = Vec::new();
        if low > 0 {
            out.push((self.a * n_f + self.b, low * width));
        }
        if high > 0 {
            out.push((self.c * n_f + self.d, high * width));
        }
        out
    }
}

/// Diagonal operator of a model on the truncated Peter–Weyl basis.
pub fn dirac_family(m: &EigenvalueModel, t: Truncation) -> OperatorMatrix {
    let basis = enumerate_pw(t);
    let values: Vec<f64> = basis.labels().iter().map(|x| m.eigenvalue(x.n, x.i, x.j)).collect();
    OperatorMatrix::diagonal(&values)
}

pub fn d1(t: Truncation) -> OperatorMatrix {
    dirac_family(&EigenvalueModel::D1, t)
}

pub fn d2(t: Truncation) -> OperatorMatrix {
    dirac_family(&EigenvalueModel::D2, t)
}

pub fn op_abs(d: &OperatorMatrix) -> Result<OperatorMatrix> {
    let v = d.diagonal_values()?;
    Ok(OperatorMatrix::diagonal(&v.iter().map(|x| x.abs()).collect::<Vec<_>>()))
}

/// Sign of a diagonal operator, with `sign(0) = +1`. Also returns the
/// positions of zero eigenvalues so callers can flag them.
pub fn op_sign(d: &OperatorMatrix) -> Result<(OperatorMatrix, Vec<usize>)> {
    let v = d.diagonal_values()?;
    let zeros = v.iter().enumerate().filter(|(_, x)| **x == 0.0).map(|(k, _)| k).collect();
    let signs: Vec<f64> = v.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
    Ok((OperatorMatrix::diagonal(&signs), zeros))
}

pub fn direct_sum(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.direct_sum(b)
}

/// Norm of `DT − TD` with rows and columns restricted by `mask`.
pub fn commutator_norm(d: &OperatorMatrix, t: &OperatorMatrix, mask: &[bool]) -> Result<f64> {
    Ok(d.commutator(t)?.restrict(mask, mask).operator_norm())
}

pub const K2_GRID_STEP: f64 = 0.125;
const K2_GRID_MAX: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GrowthBound {
    /// `|D̃| ≤ k1 + k2·|D|` on the whole truncation.
    Feasible { k1: f64, k2: f64 },
    /// No grid value of `k2` gives a non-increasing trend; the per-level
    /// maxima of `|λ̃| − k2·|λ|` at the largest `k2` are the certificate.
    Infeasible { k2: f64, level_maxima: Vec<(HalfInt, f64)> },
}

fn level_maxima(tilde: &[f64], d: &[f64], levels: &[HalfInt], k2: f64) -> Vec<(HalfInt, f64)> {
    let mut out: Vec<(HalfInt, f64)> = Vec::new();
    for ((&x, &y), &n) in tilde.iter().zip(d).zip(levels) {
        let v = x.abs() - k2 * y.abs();
        match out.last_mut() {
            Some((m, best)) if *m == n => *best = best.max(v),
            _ => out.push((n, v)),
        }
    }
    out
}

/// Smallest grid `k2` (step [`K2_GRID_STEP`]) for which the per-level maxima
/// of `|λ̃| − k2·|λ|` have non-increasing increments that are `≤ 0` over the
/// upper half of the levels.
pub fn growth_bound(tilde: &OperatorMatrix, d: &OperatorMatrix, basis: &PwBasis) -> Result<GrowthBound> {
    let (x, y) = (tilde.diagonal_values()?, d.diagonal_values()?);
    if x.len() != basis.len() || y.len() != basis.len() {
        return Err(Error::DimensionMismatch("growth bound operands differ from the basis".into()));
    }
    let levels = basis.levels();
    let half = basis.truncation().nmax().twice();
    let mut last = Vec::new();
    for step in 0..=K2_GRID_MAX {
        let k2 = f64::from(step) * K2_GRID_STEP;
        let maxima = level_maxima(&x, &y, &levels, k2);
        let increments: Vec<(HalfInt, f64)> = maxima.windows(2).map(|w| (w[1].0, w[1].1 - w[0].1)).collect();
        let concave = increments.windows(2).all(|w| w[1].1 <= w[0].1);
        let bounded = increments.iter().filter(|d| 2 * d.0.twice() >= half).all(|d| d.1 <= 0.0);
        let stable = concave && bounded;
        if stable {
            let k1 = maxima.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
            return Ok(GrowthBound::Feasible { k1, k2 });
        }
        last = maxima;
    }
    Ok(GrowthBound::Infeasible { k2: f64::from(K2_GRID_MAX) * K2_GRID_STEP, level_maxima: last })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCompactness {
    pub compact: bool,
    /// Highest level where the sign patterns disagree.
    pub witness: Option<HalfInt>,
}

/// Compare `sign(D1)` and `sign(D2)`. A diagonal difference with entries in
/// `{0, ±2}` is compact iff it vanishes from some level on; on a truncation
/// that means agreement on the top two levels at least.
pub fn sign_compact_diff(a: &OperatorMatrix, b: &OperatorMatrix, basis: &PwBasis) -> Result<SignCompactness> {
    let (sa, _) = op_sign(a)?;
    let (sb, _) = op_sign(b)?;
    let (sa, sb) = (sa.diagonal_values()?, sb.diagonal_values()?);
    let witness = basis.labels().iter().zip(sa.iter().zip(&sb)).filter(|(_, (x, y))| x != y).map(|(l, _)| l.n).max();
    let nmax = basis.truncation().nmax();
    let compact = witness.is_none_or(|w| w + HalfInt::HALF <= nmax - HalfInt::ONE);
    Ok(SignCompactness { compact, witness })
}

/// Spectra with closed-form level multiplicities.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DiracSpectrum {
    Model(EigenvalueModel),
    /// `2n+1` with multiplicity `(2n+1)(2n+2)`, `−2n` with `(2n+1)(2n)`.
    Dlssv,
}

/// Eigenvalue multiplicities level by level.
pub trait LevelSpectrum {
    fn level(&self, n: HalfInt) -> Vec<(f64, u64)>;
}

impl LevelSpectrum for DiracSpectrum {
    fn level(&self, n: HalfInt) -> Vec<(f64, u64)> {
        match self {
            DiracSpectrum::Model(m) => m.level(n),
            DiracSpectrum::Dlssv => {
                let n2 = n.twice() as u64;
                let mut out = vec![((n2 + 1) as f64, (n2 + 1) * (n2 + 2))];
                if n2 > 0 {
                    out.push((-(n2 as f64), (n2 + 1) * n2));
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSums {
    pub s: f64,
    /// `(n, increment at n, partial sum through n)`.
    pub levels: Vec<(HalfInt, f64, f64)>,
    /// Multiplicity of zero eigenvalues left out of the sums.
    pub skipped_zero_modes: u64,
}

impl PartialSums {
    pub fn last_increment(&self) -> Option<f64> {
        self.levels.last().map(|l| l.1)
    }

    pub fn increment_at(&self, n: HalfInt) -> Option<f64> {
        self.levels.iter().find(|l| l.0 == n).map(|l| l.1)
    }
}

/// Partial sums of `Σ mult·|λ|^{−s}` over levels `0, ½, ..., up_to`.
pub fn summability_partial_sums(spectrum: &impl LevelSpectrum, s: f64, up_to: HalfInt) -> PartialSums {
    let mut total = 0.0;
    let mut skipped = 0;
    let mut levels = Vec::new();
    for n in HalfInt::half_steps_to(up_to) {
        let mut inc = 0.0;
        for (lambda, mult) in spectrum.level(n) {
            if lambda == 0.0 {
                skipped += mult;
            } else {
                inc += mult as f64 * lambda.abs().powf(-s);
            }
        }
        total += inc;
        levels.push((n, inc, total));
    }
    PartialSums { s, levels, skipped_zero_modes: skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwbasis::PwIndex;

    fn t(twice: i32) -> Truncation {
        Truncation::from_twice(twice).unwrap()
    }

    fn at(d: &OperatorMatrix, b: &PwBasis, n2: i32, i2: i32, j2: i32) -> f64 {
        let k = b.index_of(&PwIndex::from_twice(n2, i2, j2)).unwrap();
        d.get(k, k)
    }

    #[test]
    fn d1_d2_values() {
        let b = enumerate_pw(t(4));
        let (x, y) = (d1(t(4)), d2(t(4)));
        assert_eq!(at(&x, &b, 0, 0, 0), 1.0);
        assert_eq!(at(&x, &b, 2, 0, 0), -2.0);
        assert_eq!(at(&x, &b, 2, 0, 2), 3.0);
        assert_eq!(at(&y, &b, 1, 1, -1), -2.0);
        let abs = op_abs(&y).unwrap();
        assert_eq!(abs, dirac_family(&EigenvalueModel::left(0, 2.0, 1.0, 2.0, 1.0), t(4)));
        for (k, l) in b.labels().iter().enumerate() {
            if l.j == l.n {
                assert_eq!(x.get(k, k), y.get(k, k));
            }
        }
        assert_eq!(direct_sum(&x, &abs).dim_source(), 2 * b.len());
        assert!(EigenvalueModel::D1.is_spectral_grade());
    }

    #[test]
    fn sign_pattern() {
        let b = enumerate_pw(t(4));
        let (s, zeros) = op_sign(&d1(t(4))).unwrap();
        assert!(zeros.is_empty());
        for (k, l) in b.labels().iter().enumerate() {
            assert_eq!(s.get(k, k), if l.j == l.n { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn growth_bounds() {
        let tt = t(12);
        let b = enumerate_pw(tt);
        assert_eq!(growth_bound(&d2(tt), &d1(tt), &b).unwrap(), GrowthBound::Feasible { k1: 1.0, k2: 1.0 });
        assert_eq!(growth_bound(&d1(tt), &d1(tt), &b).unwrap(), GrowthBound::Feasible { k1: 0.0, k2: 1.0 });
        let sq = OperatorMatrix::diagonal(&b.labels().iter().map(|l| l.n.to_f64().powi(2)).collect::<Vec<_>>());
        assert!(matches!(growth_bound(&sq, &d1(tt), &b).unwrap(), GrowthBound::Infeasible { .. }));
    }

    #[test]
    fn sign_compactness() {
        let tt = t(12);
        let b = enumerate_pw(tt);
        let r = sign_compact_diff(&d1(tt), &d2(tt), &b).unwrap();
        assert_eq!(r, SignCompactness { compact: true, witness: None });
        assert!(!sign_compact_diff(&d1(tt), &d1(tt).scale(-1.0), &b).unwrap().compact);
        let mut v = d1(tt).diagonal_values().unwrap();
        let k = b.index_of(&PwIndex::from_twice(2, 0, 0)).unwrap();
        v[k] = -v[k] + 10.0;
        let r = sign_compact_diff(&d1(tt), &OperatorMatrix::diagonal(&v), &b).unwrap();
        assert_eq!(r, SignCompactness { compact: true, witness: Some(HalfInt::ONE) });
    }

    #[test]
    fn closed_form_multiplicities_match_enumeration() {
        let tt = t(8);
        let b = enumerate_pw(tt);
        let v = d1(tt).diagonal_values().unwrap();
        for n in tt.levels() {
            let mut counted: Vec<(f64, u64)> = Vec::new();
            for k in (0..b.len()).filter(|&k| b.labels()[k].n == n) {
                match counted.iter_mut().find(|c| c.0 == v[k]) {
                    Some(c) => c.1 += 1,
                    None => counted.push((v[k], 1)),
                }
            }
            let mut closed = EigenvalueModel::D1.level(n);
            closed.sort_by(|a, b| a.0.total_cmp(&b.0));
            counted.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert_eq!(closed, counted);
        }
    }

    #[test]
    fn partial_sums() {
        let zero = summability_partial_sums(&DiracSpectrum::Model(EigenvalueModel::D1), 0.0, HalfInt::from_int(2));
        assert_eq!(zero.levels.last().unwrap().2, 55.0);
        let s2 = summability_partial_sums(&DiracSpectrum::Model(EigenvalueModel::D1), 2.0, HalfInt::from_int(20));
        assert!(s2.last_increment().unwrap() >= 0.9);
        let dl = summability_partial_sums(&DiracSpectrum::Dlssv, 0.0, HalfInt::from_int(2));
        assert_eq!(dl.levels.last().unwrap().2, 110.0);
    }
}
