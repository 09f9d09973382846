//! Comparison of the two triples: the unitary `U: L₂(h) ⊕ L₂(h) → 𝓗`,
//! difference operators measured against the ideal `𝒦_q`, leading-term
//! asymptotics of the coefficient matrices, and the index pairing.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordalg::{Generator, GsBasis};
use crate::dlssvrep::{coeff, dirac_dlssv, CoeffKind, DlssvRepresentation};
use crate::error::{Error, Result};
use crate::gnsrep::{d1, d2, op_abs, HatRepresentation};
use crate::operator::{KernelReport, OperatorMatrix};
use crate::pwbasis::{
    enumerate_dlssv, enumerate_doubled, BasisLabel, DlssvBasis, DlssvIndex, DoubledPwBasis, DoubledPwIndex, Summand,
    Truncation,
};
use crate::qarith::HalfInt;

/// Norms at or below this are treated as exact zeros in decay fits.
pub const FIT_FLOOR: f64 = 1e-13;

/// `U` as a bijection of basis labels; every coefficient is 1.
#[derive(Clone, Debug)]
pub struct UnitaryU {
    doubled: DoubledPwBasis,
    dlssv: DlssvBasis,
    forward: Vec<usize>,
    backward: Vec<usize>,
}

/// Image of a basis vector of `L₂(h) ⊕ L₂(h)` under `U`.
pub fn u_image(x: &DoubledPwIndex) -> DlssvIndex {
    let (n, i, j) = (x.inner.n, x.inner.i, x.inner.j);
    let h = HalfInt::HALF;
    match x.copy {
        Summand::First if j < n => DlssvIndex::down(n, i, j + h),
        Summand::First => DlssvIndex::up(n, i, n + h),
        Summand::Second => DlssvIndex::up(n, i, j - h),
    }
}

pub fn unitary_u(t: Truncation) -> Result<UnitaryU> {
    let doubled = enumerate_doubled(t);
    let dlssv = enumerate_dlssv(t);
    if doubled.len() != dlssv.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} doubled labels, {} sector labels",
            doubled.len(),
            dlssv.len()
        )));
    }
    let mut backward = vec![usize::MAX; dlssv.len()];
    let mut forward = Vec::with_capacity(doubled.len());
    for (k, x) in doubled.labels().iter().enumerate() {
        let y = dlssv.index_of(&u_image(x))?;
        if backward[y] != usize::MAX {
            return Err(Error::InvalidLabel(format!("{} is hit twice", dlssv.labels()[y])));
        }
        backward[y] = k;
        forward.push(y);
    }
    Ok(UnitaryU { doubled, dlssv, forward, backward })
}

impl UnitaryU {
    pub fn doubled(&self) -> &DoubledPwBasis {
        &self.doubled
    }

    pub fn dlssv(&self) -> &DlssvBasis {
        &self.dlssv
    }

    /// Position in the sector basis of the image of doubled position `k`.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn backward(&self) -> &[usize] {
        &self.backward
    }

    pub fn operator(&self) -> OperatorMatrix {
        let n = self.forward.len();
        OperatorMatrix::from_triplets(n, n, self.forward.iter().enumerate().map(|(k, &y)| (y, k, 1.0)))
    }

    /// `U X U*` for an operator on the doubled space.
    pub fn conjugate(&self, x: &OperatorMatrix) -> OperatorMatrix {
        let n = self.forward.len();
        x.relabel(n, n, &self.forward, &self.forward)
    }

    /// `U* Y U` for an operator on the sector space.
    pub fn pull_back(&self, y: &OperatorMatrix) -> OperatorMatrix {
        let n = self.backward.len();
        y.relabel(n, n, &self.backward, &self.backward)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intertwining {
    pub holds: bool,
    /// Labels whose eigenvalues disagree, as `(doubled label, sector label)`.
    pub mismatches: Vec<(String, String)>,
}

/// Compare the eigenvalues of `D₁ ⊕ |D₂|` with those of `D` under `U`.
pub fn check_dirac_intertwine(t: Truncation) -> Result<Intertwining> {
    let u = unitary_u(t)?;
    let lhs = d1(t).direct_sum(&op_abs(&d2(t))?).diagonal_values()?;
    let rhs = dirac_dlssv(t).diagonal_values()?;
    let mismatches: Vec<(String, String)> = lhs
        .iter()
        .enumerate()
        .filter(|&(k, v)| *v != rhs[u.forward[k]])
        .map(|(k, _)| (u.doubled.labels()[k].to_string(), u.dlssv.labels()[u.forward[k]].to_string()))
        .collect();
    Ok(Intertwining { holds: mismatches.is_empty(), mismatches })
}

/// Per-level norms of an operator together with a fitted geometric decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealWitness {
    pub label: String,
    pub q: f64,
    pub nmax: HalfInt,
    /// `(n, ‖Δ_n‖)` over the measured source levels.
    pub levels: Vec<(HalfInt, f64)>,
    /// Lowest level entering the fit.
    pub fit_from: HalfInt,
    /// `exp(slope)` of the least-squares line through `(n, ln ‖Δ_n‖)`;
    /// `None` with fewer than two usable levels.
    pub ratio: Option<f64>,
    /// `max_n ‖Δ_n‖ / ratio^n` over the fitted levels.
    pub constant: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayStatus {
    Pass,
    Warn,
    Fail,
    Skipped,
}

impl fmt::Display for DecayStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayStatus::Pass => "pass",
            DecayStatus::Warn => "warn",
            DecayStatus::Fail => "fail",
            DecayStatus::Skipped => "skipped",
        })
    }
}

impl IdealWitness {
    pub fn new(
        label: impl Into<String>,
        q: f64,
        nmax: HalfInt,
        levels: Vec<(HalfInt, f64)>,
        fit_from: HalfInt,
    ) -> Self {
        let pts: Vec<(f64, f64)> = levels
            .iter()
            .filter(|(n, v)| *n >= fit_from && *v > FIT_FLOOR)
            .map(|(n, v)| (n.to_f64(), v.ln()))
            .collect();
        let ratio = fit_slope(&pts).map(f64::exp);
        let constant = ratio.map(|r| pts.iter().map(|(n, lv)| (lv - n * r.ln()).exp()).fold(0.0, f64::max));
        IdealWitness { label: label.into(), q, nmax, levels, fit_from, ratio, constant }
    }

    /// `Pass` at ratio ≤ `strong`, `Warn` at ratio ≤ `weak`, else `Fail`.
    pub fn assess(&self, strong: f64, weak: f64) -> DecayStatus {
        match self.ratio {
            None => DecayStatus::Skipped,
            Some(r) if r <= strong => DecayStatus::Pass,
            Some(r) if r <= weak => DecayStatus::Warn,
            Some(_) => DecayStatus::Fail,
        }
    }

    pub fn norm_at(&self, n: HalfInt) -> Option<f64> {
        self.levels.iter().find(|l| l.0 == n).map(|l| l.1)
    }

    /// Norms are nonincreasing from `from` on.
    pub fn is_monotone_from(&self, from: HalfInt) -> bool {
        let tail: Vec<f64> = self.levels.iter().filter(|l| l.0 >= from).map(|l| l.1).collect();
        tail.windows(2).all(|w| w[1] <= w[0])
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Operator norm of the columns on each requested level.
pub fn level_norms<L: BasisLabel + Sync>(m: &OperatorMatrix, labels: &[L], levels: &[HalfInt]) -> Vec<(HalfInt, f64)> {
    levels
        .par_iter()
        .map(|&n| {
            let cols: Vec<bool> = labels.iter().map(|x| x.level() == n).collect();
            let rows = vec![true; labels.len()];
            (n, m.restrict(&rows, &cols).operator_norm())
        })
        .collect()
}

fn interior_levels(t: Truncation) -> Vec<HalfInt> {
    t.levels().filter(|&n| t.is_interior(n)).collect()
}

fn hat_generator(rep: &HatRepresentation, g: Generator) -> OperatorMatrix {
    rep.generator(g).clone()
}

/// `U(ĥπ(g) ⊕ ĥπ(g))U* − π′(g)`.
pub fn difference_operator(g: Generator, t: Truncation, q: f64) -> Result<OperatorMatrix> {
    let u = unitary_u(t)?;
    let hat = hat_generator(&HatRepresentation::new(t, q)?, g);
    let dl = DlssvRepresentation::new(t, q)?;
    u.conjugate(&hat.direct_sum(&hat)).sub(dl.generator(g))
}

/// Per-source-level norms of the difference operator on interior levels,
/// fitted from level 1 on.
pub fn difference_blocks(g: Generator, t: Truncation, q: f64) -> Result<IdealWitness> {
    let diff = difference_operator(g, t, q)?;
    let basis = enumerate_dlssv(t);
    let norms = level_norms(&diff, basis.labels(), &interior_levels(t));
    Ok(IdealWitness::new(format!("U(h{g}+h{g})U* - pi'({g})"), q, t.nmax(), norms, HalfInt::ONE))
}

/// Per-vector signs `s` such that `s_x s_y E_xy` and `H_xy` agree in sign
/// along a maximum-weight spanning tree of the shared nonzero pattern,
/// rooted at the cyclic vector. Fails if some vector is not reached.
pub fn sign_gauge(pairs: &[(&OperatorMatrix, &OperatorMatrix)], dim: usize) -> Result<Vec<f64>> {
    const SHARED: f64 = 1e-14;
    let mut adj: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); dim];
    for (exact, hat) in pairs {
        for (r, c, e) in exact.entries() {
            let h = hat.get(r, c);
            if r != c && e.abs() > SHARED && h.abs() > SHARED {
                let w = e.abs().min(h.abs());
                let s = (e * h).signum();
                adj[r].push((c, w, s));
                adj[c].push((r, w, s));
            }
        }
    }
    let mut sign = vec![0.0; dim];
    if dim == 0 {
        return Ok(sign);
    }
    sign[0] = 1.0;
    // Prim's algorithm; ties broken by index for determinism
    let mut frontier: Vec<(f64, usize, usize, f64)> = adj[0].iter().map(|&(y, w, s)| (w, 0, y, s)).collect();
    while let Some(best) = frontier
        .iter()
        .enumerate()
        .filter(|(_, e)| sign[e.2] == 0.0)
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(b.1 .2.cmp(&a.1 .2)))
        .map(|(k, _)| k)
    {
        let (_, x, y, s) = frontier.swap_remove(best);
        sign[y] = sign[x] * s;
        frontier.retain(|e| sign[e.2] == 0.0);
        frontier.extend(adj[y].iter().filter(|e| sign[e.0] == 0.0).map(|&(z, w, s)| (w, y, z, s)));
    }
    match sign.iter().position(|&s| s == 0.0) {
        Some(k) => Err(Error::GaugeFailure(format!("basis vector {k} shares no dominant matrix element"))),
        None => Ok(sign),
    }
}

/// Exact left multiplication against the approximate generators on the
/// Gram–Schmidt basis, after aligning basis signs with both generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub witness: IdealWitness,
    /// `‖Δ_1‖ / q²`.
    pub calibration: f64,
    /// `(n, ‖Δ_n‖ / (C q^{2n}))` on the remaining levels.
    pub scaled: Vec<(HalfInt, f64)>,
    /// Number of basis vectors whose sign was flipped.
    pub flips: usize,
}

impl OracleComparison {
    pub fn max_scaled(&self) -> f64 {
        self.scaled.iter().map(|s| s.1).fold(0.0, f64::max)
    }
}

pub fn oracle_blocks(g: Generator, gs: &GsBasis, q: f64) -> Result<OracleComparison> {
    let t = gs.truncation();
    let rep = HatRepresentation::new(t, q)?;
    let pair =
        |x: Generator| -> Result<(OperatorMatrix, OperatorMatrix)> { Ok((gs.pi_exact(x, q)?, hat_generator(&rep, x))) };
    let (ea, ha) = pair(Generator::Alpha)?;
    let (eb, hb) = pair(Generator::Beta)?;
    let signs = sign_gauge(&[(&ea, &ha), (&eb, &hb)], gs.len())?;
    let (exact, hat) = match g {
        Generator::Alpha => (ea, ha),
        Generator::Beta => (eb, hb),
        other => pair(other)?,
    };
    let aligned = OperatorMatrix::from_triplets(
        exact.dim_target(),
        exact.dim_source(),
        exact.entries().map(|(r, c, v)| (r, c, v * signs[r] * signs[c])),
    );
    let diff = aligned.sub(&hat)?;
    // columns on the top level are clipped by the truncation
    let levels: Vec<HalfInt> = t.levels().filter(|&n| n < t.nmax()).collect();
    let labels = gs.basis().labels();
    let norms = level_norms(&diff, labels, &levels);
    let scale = |n: HalfInt| q.powf(2.0 * n.to_f64());
    // low levels carry a transient, so C is read off at n = 1
    let calibration = norms.iter().find(|l| l.0 == HalfInt::ONE).map_or(0.0, |&(n, v)| v / scale(n));
    let scaled = norms
        .iter()
        .filter(|l| l.0 > HalfInt::ONE)
        .map(|&(n, v)| (n, if calibration > 0.0 { v / (calibration * scale(n)) } else { v }))
        .collect();
    let witness = IdealWitness::new(format!("pi_exact({g}) - h{g}"), q, t.nmax(), norms, HalfInt::ONE);
    let flips = signs.iter().filter(|&&s| s < 0.0).count();
    Ok(OracleComparison { witness, calibration, scaled, flips })
}

fn sqrt_one_minus(q: f64, e: f64) -> f64 {
    (1.0 - q.powf(e)).max(0.0).sqrt()
}

/// Leading term of a coefficient matrix as `n → ∞`.
pub fn leading_term(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt, q: f64) -> [[f64; 2]; 2] {
    let (n, i, j) = (n.to_f64(), i.to_f64(), j.to_f64());
    let s = |e: f64| sqrt_one_minus(q, e);
    let (pre, d0, d1) = match kind {
        CoeffKind::APlus => (s(2.0 * n + 2.0 * i + 2.0), s(2.0 * n + 2.0 * j + 3.0), s(2.0 * n + 2.0 * j + 1.0)),
        CoeffKind::AMinus => (
            q.powf(2.0 * n + i + j + 0.5) * s(2.0 * n - 2.0 * i),
            q * s(2.0 * n - 2.0 * j + 1.0),
            s(2.0 * n - 2.0 * j - 1.0),
        ),
        CoeffKind::BPlus => (
            q.powf(n + j - 0.5) * s(2.0 * n + 2.0 * i + 2.0),
            q * s(2.0 * n - 2.0 * j + 3.0),
            s(2.0 * n - 2.0 * j + 1.0),
        ),
        CoeffKind::BMinus => {
            (-q.powf(n + i) * s(2.0 * n - 2.0 * i), s(2.0 * n + 2.0 * j + 1.0), s(2.0 * n + 2.0 * j - 1.0))
        }
    };
    [[pre * d0, 0.0], [0.0, pre * d1]]
}

/// Largest entry of `coeff − leading_term` over entries between existing
/// sectors.
pub fn asymptotic_residual(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt, q: f64) -> Result<f64> {
    let c = coeff(kind, n, i, j, q)?;
    let l = leading_term(kind, n, i, j, q);
    let mut r: f64 = 0.0;
    for ((present, entries), lead) in c.present.iter().zip(&c.entries).zip(&l) {
        for ((&p, e), l) in present.iter().zip(entries).zip(lead) {
            if p {
                r = r.max((e - l).abs());
            }
        }
    }
    Ok(r)
}

/// Largest residual over all labels on level `n`.
pub fn asymptotic_level_residual(kind: CoeffKind, n: HalfInt, q: f64) -> Result<f64> {
    let h = HalfInt::HALF;
    let mut r: f64 = 0.0;
    for i in HalfInt::range_inclusive(-n, n) {
        for j in HalfInt::range_inclusive(-n - h, n + h) {
            r = r.max(asymptotic_residual(kind, n, i, j, q)?);
        }
    }
    Ok(r)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Triple {
    /// `D₁` with the approximate generators on `L₂(h)`.
    Cp,
    /// The sector triple with `π′`.
    Dlssv,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Triple::Cp => "cp",
            Triple::Dlssv => "dlssv",
        })
    }
}

impl std::str::FromStr for Triple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp" => Ok(Triple::Cp),
            "dlssv" => Ok(Triple::Dlssv),
            _ => Err(Error::Parse(format!("unknown triple '{s}' (expected cp or dlssv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub triple: Triple,
    pub threshold: f64,
    pub index: i64,
    pub kernel: usize,
    pub cokernel: usize,
    /// Largest singular value counted as zero.
    pub largest_below: f64,
    /// Smallest singular value counted as nonzero.
    pub gap: f64,
    pub domain_dim: usize,
    pub codomain_dim: usize,
}

/// A spectrum is gapped at `threshold` if nothing lies within a factor 10
/// of it on either side.
const GAP_FACTOR: f64 = 10.0;

/// Index of the fundamental unitary `[[α, −qβ*], [β, α*]]` compressed by
/// `P ⊗ I₂`, `P` the projection onto the nonnegative spectrum of the Dirac
/// operator. The compression maps `P`-vectors below the top level into all
/// `P`-vectors, so that the truncation does not cut the kernel.
pub fn index_pairing(triple: Triple, t: Truncation, q: f64, threshold: f64) -> Result<IndexReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold {threshold} outside (0, 1)")));
    }
    let (gens, dirac, levels): ([OperatorMatrix; 4], OperatorMatrix, Vec<HalfInt>) = match triple {
        Triple::Cp => {
            let rep = HatRepresentation::new(t, q)?;
            let g = Generator::ALL.map(|x| rep.generator(x).clone());
            (g, d1(t), rep.basis().levels())
        }
        Triple::Dlssv => {
            let rep = DlssvRepresentation::new(t, q)?;
            let g = Generator::ALL.map(|x| rep.generator(x).clone());
            (g, dirac_dlssv(t), rep.basis().levels())
        }
    };
    let pick = |g: Generator| &gens[Generator::ALL.iter().position(|&x| x == g).unwrap_or(0)];
    let (a, b, a_, b_) =
        (pick(Generator::Alpha), pick(Generator::Beta), pick(Generator::AlphaStar), pick(Generator::BetaStar));
    let w = OperatorMatrix::block2x2(a, &b_.scale(-q), b, a_)?;
    let w_star = OperatorMatrix::block2x2(a_, b_, &b.scale(-q), a)?;
    let positive: Vec<bool> = dirac.diagonal_values()?.iter().map(|&v| v > 0.0).collect();
    let cod: Vec<usize> = (0..2 * positive.len()).filter(|&k| positive[k % positive.len()]).collect();
    let dom: Vec<usize> = cod.iter().copied().filter(|&k| levels[k % levels.len()] < t.nmax()).collect();
    let kt = w.submatrix(&cod, &dom).kernel_dimension(threshold);
    let kt_star = w_star.submatrix(&cod, &dom).kernel_dimension(threshold);
    let largest_below = kt.largest_below.max(kt_star.largest_below);
    let gap = kt.smallest_above.min(kt_star.smallest_above);
    if gap < GAP_FACTOR * threshold || largest_below * GAP_FACTOR > threshold {
        return Err(Error::UnstableIndex {
            threshold,
            detail: format!("{triple}: singular values {largest_below:e} and {gap:e} straddle the cutoff"),
        });
    }
    let KernelReport { dimension: kernel, .. } = kt;
    let cokernel = kt_star.dimension;
    Ok(IndexReport {
        triple,
        threshold,
        index: kernel as i64 - cokernel as i64,
        kernel,
        cokernel,
        largest_below,
        gap,
        domain_dim: dom.len(),
        codomain_dim: cod.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordalg::gs_basis;
    use crate::pwbasis::{PwIndex, Sector};
    use std::sync::OnceLock;

    const Q: f64 = 0.5;

    fn t(twice: i32) -> Truncation {
        Truncation::from_twice(twice).unwrap()
    }

    fn doubled(copy: Summand, n2: i32, i2: i32, j2: i32) -> DoubledPwIndex {
        DoubledPwIndex { copy, inner: PwIndex::from_twice(n2, i2, j2) }
    }

    #[test]
    fn u_on_documented_vectors() {
        assert_eq!(u_image(&doubled(Summand::First, 0, 0, 0)), DlssvIndex::from_twice(0, 0, 1, Sector::Up));
        assert_eq!(u_image(&doubled(Summand::Second, 0, 0, 0)), DlssvIndex::from_twice(0, 0, -1, Sector::Up));
        assert_eq!(u_image(&doubled(Summand::First, 2, 0, 0)), DlssvIndex::from_twice(2, 0, 1, Sector::Down));
    }

    #[test]
    fn u_is_a_bijection() {
        for twice in 0..=8 {
            let u = unitary_u(t(twice)).unwrap();
            let op = u.operator();
            let id = OperatorMatrix::identity(op.dim_source());
            assert_eq!(op.adjoint().compose(&op).unwrap(), id);
            assert_eq!(op.compose(&op.adjoint()).unwrap(), id);
        }
    }

    #[test]
    fn intertwining_is_exact() {
        for twice in 0..=8 {
            let r = check_dirac_intertwine(t(twice)).unwrap();
            assert!(r.holds, "{:?}", r.mismatches);
        }
    }

    #[test]
    fn conjugating_back_gives_zero() {
        let tt = t(6);
        let u = unitary_u(tt).unwrap();
        let dl = DlssvRepresentation::new(tt, Q).unwrap();
        let pulled = u.pull_back(dl.generator(Generator::Beta));
        assert_eq!(u.conjugate(&pulled).sub(dl.generator(Generator::Beta)).unwrap().nnz(), 0);
    }

    #[test]
    fn differences_decay_like_q_squared() {
        for g in [Generator::AlphaStar, Generator::Beta] {
            let w = difference_blocks(g, t(10), Q).unwrap();
            let r = w.ratio.unwrap();
            assert!(r <= Q * Q * 1.2, "{g}: {r}");
            assert!(w.is_monotone_from(HalfInt::ONE), "{w:?}");
        }
    }

    #[test]
    fn fit_recovers_a_geometric_sequence() {
        let levels = (0..6).map(|k| (HalfInt::from_twice(k), 3.0 * 0.2f64.powf(k as f64 / 2.0))).collect();
        let w = IdealWitness::new("x", Q, HalfInt::from_twice(5), levels, HalfInt::ZERO);
        assert!((w.ratio.unwrap() - 0.2).abs() < 1e-12);
        assert!((w.constant.unwrap() - 3.0).abs() < 1e-9);
        let w = IdealWitness::new("x", Q, HalfInt::ZERO, vec![(HalfInt::ZERO, 1.0)], HalfInt::ZERO);
        assert_eq!(w.ratio, None);
        assert_eq!(w.assess(0.25, 0.5), DecayStatus::Skipped);
    }

    fn gs3() -> &'static GsBasis {
        static GS: OnceLock<GsBasis> = OnceLock::new();
        GS.get_or_init(|| gs_basis(t(6)).unwrap())
    }

    #[test]
    fn oracle_agrees_up_to_q_squared_decay() {
        for g in [Generator::Alpha, Generator::Beta] {
            let c = oracle_blocks(g, gs3(), Q).unwrap();
            assert!(c.max_scaled() <= 2.0, "{g}: {c:?}");
            assert!(c.witness.ratio.unwrap() <= Q * Q * 1.3, "{g}: {c:?}");
        }
        let c = oracle_blocks(Generator::Alpha, gs3(), Q).unwrap();
        let first = c.witness.norm_at(HalfInt::ZERO).unwrap();
        assert!((first - Q * (1.0 - 1.0 / (1.0 + Q * Q).sqrt())).abs() < 1e-12, "{first}");
    }

    #[test]
    fn leading_terms() {
        let h = |x| HalfInt::from_twice(x);
        for kind in CoeffKind::ALL {
            let c = asymptotic_level_residual(kind, h(2), Q).unwrap() / Q.powi(2);
            for n2 in [4, 6] {
                let r = asymptotic_level_residual(kind, h(n2), Q).unwrap();
                assert!(r <= 2.0 * c * Q.powi(n2), "{kind} at 2n={n2}: {r}");
            }
            let slow = asymptotic_residual(kind, h(6), h(0), h(1), 0.5).unwrap();
            let fast = asymptotic_residual(kind, h(6), h(0), h(1), 0.1).unwrap();
            assert!(fast <= slow * (0.1f64 / 0.5).powi(6) * 10.0, "{kind}: {slow} {fast}");
        }
    }

    #[test]
    fn gauge_failure_is_reported() {
        let m = OperatorMatrix::identity(3);
        assert!(matches!(sign_gauge(&[(&m, &m)], 3), Err(Error::GaugeFailure(_))));
    }

    #[test]
    fn index_pairing_agrees_across_triples() {
        let tt = t(8);
        let mut seen = Vec::new();
        for triple in [Triple::Cp, Triple::Dlssv] {
            for th in [1e-6, 1e-4, 1e-2] {
                let r = index_pairing(triple, tt, Q, th).unwrap();
                seen.push(r.index);
            }
        }
        assert!(seen.iter().all(|&x| x == seen[0] && x != 0), "{seen:?}");
        assert!(index_pairing(Triple::Cp, tt, Q, 1.5).is_err());
    }
}
