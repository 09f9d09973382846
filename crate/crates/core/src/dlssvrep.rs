//! The isospectral triple on `𝓗 = ⊕ W_n↑ ⊕ W_n↓`: 2×2 coefficient matrices,
//! the representation `π′` and the Dirac operator.
//!
//! A coefficient matrix acts on the column `(u, d)` of the source vector
//! `v^n_{ij}`; row = target sector, column = source sector. Every entry has
//! the shape `±q^e · Π[x_k]^{1/2} / Π[y_k]` with half-integer q-number
//! arguments, so it can be checked for sign and squared exactly.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordalg::Generator;
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_dlssv, has_down, is_valid_v_label, DlssvBasis, DlssvIndex, Sector, Truncation};
use crate::qarith::{q_number, q_number_f64, HalfInt, QScalar};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoeffKind {
    APlus,
    AMinus,
    BPlus,
    BMinus,
}

impl CoeffKind {
    pub const ALL: [CoeffKind; 4] = [CoeffKind::APlus, CoeffKind::AMinus, CoeffKind::BPlus, CoeffKind::BMinus];

    fn raises(self) -> bool {
        matches!(self, CoeffKind::APlus | CoeffKind::BPlus)
    }

    fn is_a(self) -> bool {
        matches!(self, CoeffKind::APlus | CoeffKind::AMinus)
    }

    /// `a^± ↔ a^∓`, `b^± ↔ b^∓`.
    fn flipped(self) -> CoeffKind {
        match self {
            CoeffKind::APlus => CoeffKind::AMinus,
            CoeffKind::AMinus => CoeffKind::APlus,
            CoeffKind::BPlus => CoeffKind::BMinus,
            CoeffKind::BMinus => CoeffKind::BPlus,
        }
    }

    /// `(dn, di, dj)` from source to target for the plain kind.
    fn shift(self) -> (HalfInt, HalfInt, HalfInt) {
        let h = HalfInt::HALF;
        let dn = if self.raises() { h } else { -h };
        let dj = if self.is_a() { h } else { -h };
        (dn, h, dj)
    }
}

impl fmt::Display for CoeffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoeffKind::APlus => "a+",
            CoeffKind::AMinus => "a-",
            CoeffKind::BPlus => "b+",
            CoeffKind::BMinus => "b-",
        })
    }
}

/// `sign · q^{q_exp} · Π [sqrt_args]^{1/2} / Π [den_args]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    /// 0 for a structural zero.
    pub sign: i8,
    pub q_exp: HalfInt,
    pub sqrt_args: Vec<HalfInt>,
    pub den_args: Vec<HalfInt>,
}

impl CoeffEntry {
    fn zero() -> Self {
        CoeffEntry { sign: 0, q_exp: HalfInt::ZERO, sqrt_args: Vec::new(), den_args: Vec::new() }
    }

    fn new(sign: i8, q_exp_twice: i32, sqrt_args: &[i32], den_args: &[i32]) -> Self {
        CoeffEntry {
            sign,
            q_exp: HalfInt::from_twice(q_exp_twice),
            sqrt_args: sqrt_args.iter().map(|&x| HalfInt::from_twice(x)).collect(),
            den_args: den_args.iter().map(|&x| HalfInt::from_twice(x)).collect(),
        }
    }

    fn times_prefactor(mut self, q_exp: HalfInt, sqrt_arg: HalfInt) -> Self {
        self.q_exp += q_exp;
        self.sqrt_args.push(sqrt_arg);
        self
    }

    /// Vanishes identically: structural zero or a `[0]^{1/2}` factor.
    pub fn is_zero(&self) -> bool {
        self.sign == 0 || self.sqrt_args.contains(&HalfInt::ZERO)
    }

    fn check_radicands(&self) -> Result<()> {
        // [x] < 0 exactly when x < 0 for 0 < q < 1
        match self.sqrt_args.iter().find(|x| **x < HalfInt::ZERO) {
            Some(x) => Err(Error::NegativeRadicand(format!("[{x}] in {self}"))),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, q: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        self.check_radicands()?;
        let mut v = f64::from(self.sign) * q.powf(self.q_exp.to_f64());
        for &x in &self.sqrt_args {
            v *= q_number_f64(x, q).sqrt();
        }
        for &y in &self.den_args {
            let d = q_number_f64(y, q);
            if d == 0.0 {
                return Err(Error::DivisionByZero);
            }
            v /= d;
        }
        Ok(v)
    }

    /// The signed square `sign · |entry|²` as an exact rational function.
    pub fn exact_square(&self) -> Result<QScalar> {
        if self.is_zero() {
            return Ok(QScalar::zero());
        }
        self.check_radicands()?;
        let mut v = QScalar::from_int(i64::from(self.sign)) * QScalar::q_pow(self.q_exp + self.q_exp);
        for &x in &self.sqrt_args {
            v = v * q_number(x);
        }
        for &y in &self.den_args {
            let d = q_number(y);
            v = v.checked_div(&(&d * &d))?;
        }
        Ok(v)
    }
}

impl fmt::Display for CoeffEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        write!(f, "{}q^({})", if self.sign < 0 { "-" } else { "" }, self.q_exp)?;
        for x in &self.sqrt_args {
            write!(f, " [{x}]^(1/2)")?;
        }
        for y in &self.den_args {
            write!(f, " / [{y}]")?;
        }
        Ok(())
    }
}

/// Exact form of a coefficient matrix, with the sectors that exist at its
/// source and target labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicCoeff {
    pub entries: [[CoeffEntry; 2]; 2],
    pub source_present: [bool; 2],
    pub target_present: [bool; 2],
}

impl SymbolicCoeff {
    pub fn transpose(&self) -> SymbolicCoeff {
        let e = &self.entries;
        SymbolicCoeff {
            entries: [[e[0][0].clone(), e[1][0].clone()], [e[0][1].clone(), e[1][1].clone()]],
            source_present: self.target_present,
            target_present: self.source_present,
        }
    }

    pub fn is_present(&self, t: usize, s: usize) -> bool {
        self.source_present[s] && self.target_present[t]
    }

    /// Evaluate the entries that connect existing sectors; the others are
    /// reported as 0 and marked absent.
    pub fn evaluate(&self, q: f64) -> Result<Coeff2x2> {
        let mut out = Coeff2x2 { entries: [[0.0; 2]; 2], present: [[false; 2]; 2] };
        for t in 0..2 {
            for s in 0..2 {
                if self.is_present(t, s) {
                    out.entries[t][s] = self.entries[t][s].evaluate(q)?;
                    out.present[t][s] = true;
                }
            }
        }
        Ok(out)
    }
}

/// Numeric 2×2 coefficient matrix; `present` marks entries between sectors
/// that exist.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coeff2x2 {
    pub entries: [[f64; 2]; 2],
    pub present: [[bool; 2]; 2],
}

fn sector_mask(n: HalfInt, i: HalfInt, j: HalfInt) -> [bool; 2] {
    [is_valid_v_label(n, i, j), has_down(n, i, j)]
}

/// Sign flip applied to one entry of every matrix of one kind; used to check
/// that the relation tests notice corrupted coefficients.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    pub kind: CoeffKind,
    pub row: usize,
    pub col: usize,
}

impl Mutation {
    /// One flip per entry that is not identically zero.
    pub fn candidates() -> Vec<Mutation> {
        let mut out = Vec::new();
        for kind in CoeffKind::ALL {
            let cells: [(usize, usize); 3] = match kind {
                CoeffKind::APlus | CoeffKind::BPlus => [(0, 0), (1, 0), (1, 1)],
                CoeffKind::AMinus | CoeffKind::BMinus => [(0, 0), (0, 1), (1, 1)],
            };
            out.extend(cells.iter().map(|&(row, col)| Mutation { kind, row, col }));
        }
        out
    }
}

fn symbolic(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt, mutation: Option<Mutation>) -> Result<SymbolicCoeff> {
    if !is_valid_v_label(n, i, j) {
        return Err(Error::InvalidLabel(format!("{kind} at (n={n}, i={i}, j={j})")));
    }
    let (n2, j2) = (n.twice(), j.twice());
    let z = CoeffEntry::zero;
    let e = CoeffEntry::new;
    // arguments and exponents are written doubled
    let mut entries = match kind {
        CoeffKind::APlus => [
            [e(1, -n2 - 1, &[n2 + j2 + 3], &[2 * n2 + 4]), z()],
            [e(1, 1, &[n2 - j2 + 1], &[2 * n2 + 2, 2 * n2 + 4]), e(1, -n2, &[n2 + j2 + 1], &[2 * n2 + 2])],
        ],
        CoeffKind::AMinus => [
            [e(1, n2 + 2, &[n2 - j2 + 1], &[2 * n2 + 2]), e(-1, 1, &[n2 + j2 + 1], &[2 * n2, 2 * n2 + 2])],
            [z(), e(1, n2 + 1, &[n2 - j2 - 1], &[2 * n2])],
        ],
        CoeffKind::BPlus => [
            [e(1, 0, &[n2 - j2 + 3], &[2 * n2 + 4]), z()],
            [e(-1, -n2 - 2, &[n2 + j2 + 1], &[2 * n2 + 2, 2 * n2 + 4]), e(1, -1, &[n2 - j2 + 1], &[2 * n2 + 2])],
        ],
        CoeffKind::BMinus => [
            [e(-1, -1, &[n2 + j2 + 1], &[2 * n2 + 2]), e(-1, n2, &[n2 - j2 + 1], &[2 * n2, 2 * n2 + 2])],
            [z(), e(-1, 0, &[n2 + j2 - 1], &[2 * n2])],
        ],
    };
    // q^{(i+j−½)/2} [n ± i + …]^{1/2}
    let pre_exp = HalfInt::from_twice((i.twice() + j2 - 1) / 2);
    let pre_arg = if kind.raises() { n + i + HalfInt::ONE } else { n - i };
    for row in entries.iter_mut() {
        for entry in row.iter_mut() {
            *entry = std::mem::replace(entry, z()).times_prefactor(pre_exp, pre_arg);
        }
    }
    if let Some(m) = mutation.filter(|m| m.kind == kind) {
        entries[m.row][m.col].sign = -entries[m.row][m.col].sign;
    }
    let (dn, di, dj) = kind.shift();
    Ok(SymbolicCoeff {
        entries,
        source_present: sector_mask(n, i, j),
        target_present: sector_mask(n + dn, i + di, j + dj),
    })
}

/// Exact `a^±_{nij}` or `b^±_{nij}`.
pub fn coeff_symbolic(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt) -> Result<SymbolicCoeff> {
    symbolic(kind, n, i, j, None)
}

/// `a^±_{nij}` or `b^±_{nij}` at q.
pub fn coeff(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt, q: f64) -> Result<Coeff2x2> {
    coeff_symbolic(kind, n, i, j)?.evaluate(q)
}

/// Label at which the tilde matrix of `kind` is read off:
/// `ã^±_{nij} = (a^∓_{n±½, i−½, j−½})*`, `b̃^±_{nij} = (b^∓_{n±½, i−½, j+½})*`.
fn tilde_source(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt) -> (HalfInt, HalfInt, HalfInt) {
    let h = HalfInt::HALF;
    let n1 = if kind.raises() { n + h } else { n - h };
    let j1 = if kind.is_a() { j - h } else { j + h };
    (n1, i - h, j1)
}

fn symbolic_tilde(
    kind: CoeffKind,
    n: HalfInt,
    i: HalfInt,
    j: HalfInt,
    mutation: Option<Mutation>,
) -> Result<SymbolicCoeff> {
    let (n1, i1, j1) = tilde_source(kind, n, i, j);
    Ok(symbolic(kind.flipped(), n1, i1, j1, mutation)?.transpose())
}

pub fn coeff_tilde_symbolic(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt) -> Result<SymbolicCoeff> {
    symbolic_tilde(kind, n, i, j, None)
}

/// `ã^±_{nij}` or `b̃^±_{nij}` at q. All entries are real, so the hermitian
/// conjugate is the transpose.
pub fn coeff_tilde(kind: CoeffKind, n: HalfInt, i: HalfInt, j: HalfInt, q: f64) -> Result<Coeff2x2> {
    coeff_tilde_symbolic(kind, n, i, j)?.evaluate(q)
}

/// A component that `π′` drops because its target is not a basis label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedComponent {
    pub generator: Generator,
    pub source: DlssvIndex,
    pub target: (HalfInt, HalfInt, HalfInt),
}

fn sector_index(s: Sector) -> usize {
    match s {
        Sector::Up => 0,
        Sector::Down => 1,
    }
}

const SECTORS: [Sector; 2] = [Sector::Up, Sector::Down];

/// Assemble `π′(g)`, logging dropped components. A dropped component whose
/// coefficient does not vanish is an error.
pub fn pi_prime_with(
    g: Generator,
    t: Truncation,
    q: f64,
    mutation: Option<Mutation>,
) -> Result<(OperatorMatrix, Vec<DroppedComponent>)> {
    let basis = enumerate_dlssv(t);
    // π′(β) and π′(β*) are minus the displayed actions of −β and −β*
    let (kinds, tilde, sign) = match g {
        Generator::AlphaStar => ([CoeffKind::APlus, CoeffKind::AMinus], false, 1.0),
        Generator::Beta => ([CoeffKind::BPlus, CoeffKind::BMinus], false, -1.0),
        Generator::Alpha => ([CoeffKind::APlus, CoeffKind::AMinus], true, 1.0),
        Generator::BetaStar => ([CoeffKind::BPlus, CoeffKind::BMinus], true, -1.0),
    };
    let h = HalfInt::HALF;
    let sources: Vec<(HalfInt, HalfInt, HalfInt)> =
        basis.labels().iter().filter(|x| x.sector == Sector::Up).map(|x| (x.n, x.i, x.j)).collect();
    type Piece = (Vec<(usize, usize, f64)>, Vec<usize>, Vec<DroppedComponent>);
    let pieces: Vec<Piece> = sources
        .par_iter()
        .map(|&(n, i, j)| -> Result<Piece> {
            let mut triplets = Vec::new();
            let mut boundary = Vec::new();
            let mut dropped = Vec::new();
            for kind in kinds {
                let dn = if kind.raises() { h } else { -h };
                let (di, dj) = match (tilde, kind.is_a()) {
                    (false, true) => (h, h),
                    (false, false) => (h, -h),
                    (true, true) => (-h, -h),
                    (true, false) => (-h, h),
                };
                let (tn, ti, tj) = (n + dn, i + di, j + dj);
                if !is_valid_v_label(tn, ti, tj) {
                    if !tilde {
                        // the formula must vanish on every existing source sector
                        let c = symbolic(kind, n, i, j, mutation)?;
                        for s in 0..2 {
                            for r in 0..2 {
                                if c.source_present[s] && !c.entries[r][s].is_zero() {
                                    return Err(Error::NonvanishingDrop(format!(
                                        "{g} {kind} from (n={n}, i={i}, j={j}) to (n={tn}, i={ti}, j={tj})"
                                    )));
                                }
                            }
                        }
                    }
                    for s in SECTORS.into_iter().filter(|s| sector_mask(n, i, j)[sector_index(*s)]) {
                        dropped.push(DroppedComponent {
                            generator: g,
                            source: DlssvIndex { n, i, j, sector: s },
                            target: (tn, ti, tj),
                        });
                    }
                    continue;
                }
                let c =
                    if tilde { symbolic_tilde(kind, n, i, j, mutation)? } else { symbolic(kind, n, i, j, mutation)? };
                let c = c.evaluate(q)?;
                for s in SECTORS {
                    let Some(col) = basis.position(&DlssvIndex { n, i, j, sector: s }) else { continue };
                    for r in SECTORS {
                        let (ri, si) = (sector_index(r), sector_index(s));
                        if !c.present[ri][si] {
                            continue;
                        }
                        match basis.position(&DlssvIndex { n: tn, i: ti, j: tj, sector: r }) {
                            Some(row) => {
                                let v = sign * c.entries[ri][si];
                                if v != 0.0 {
                                    triplets.push((row, col, v));
                                }
                            }
                            None => boundary.push(col),
                        }
                    }
                }
            }
            Ok((triplets, boundary, dropped))
        })
        .collect::<Result<_>>()?;
    let mut triplets = Vec::new();
    let mut boundary = Vec::new();
    let mut dropped = Vec::new();
    for (tr, b, d) in pieces {
        triplets.extend(tr);
        boundary.extend(b);
        dropped.extend(d);
    }
    let m = OperatorMatrix::from_triplets(basis.len(), basis.len(), triplets).with_boundary(boundary);
    Ok((m, dropped))
}

pub fn pi_prime(g: Generator, t: Truncation, q: f64) -> Result<OperatorMatrix> {
    Ok(pi_prime_with(g, t, q, None)?.0)
}

/// `D u^n_{ij} = (2n+1) u^n_{ij}`, `D d^n_{ij} = −2n d^n_{ij}`.
pub fn dirac_dlssv(t: Truncation) -> OperatorMatrix {
    let basis = enumerate_dlssv(t);
    let values: Vec<f64> = basis
        .labels()
        .iter()
        .map(|x| match x.sector {
            Sector::Up => f64::from(x.n.twice() + 1),
            Sector::Down => -f64::from(x.n.twice()),
        })
        .collect();
    OperatorMatrix::diagonal(&values)
}

/// `π′` on all four generators.
pub struct DlssvRepresentation {
    basis: DlssvBasis,
    alpha: OperatorMatrix,
    beta: OperatorMatrix,
    alpha_star: OperatorMatrix,
    beta_star: OperatorMatrix,
}

impl DlssvRepresentation {
    pub fn new(t: Truncation, q: f64) -> Result<Self> {
        DlssvRepresentation::with_mutation(t, q, None)
    }

    pub fn with_mutation(t: Truncation, q: f64, mutation: Option<Mutation>) -> Result<Self> {
        let get = |g| pi_prime_with(g, t, q, mutation).map(|r| r.0);
        Ok(DlssvRepresentation {
            basis: enumerate_dlssv(t),
            alpha: get(Generator::Alpha)?,
            beta: get(Generator::Beta)?,
            alpha_star: get(Generator::AlphaStar)?,
            beta_star: get(Generator::BetaStar)?,
        })
    }

    pub fn basis(&self) -> &DlssvBasis {
        &self.basis
    }

    pub fn generator(&self, g: Generator) -> &OperatorMatrix {
        match g {
            Generator::Alpha => &self.alpha,
            Generator::Beta => &self.beta,
            Generator::AlphaStar => &self.alpha_star,
            Generator::BetaStar => &self.beta_star,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    /// `(relation, interior-level residual norm)`.
    pub relations: Vec<(String, f64)>,
    /// `(pair, interior-level norm of π′(x)* − π′(x*))`.
    pub adjointness: Vec<(String, f64)>,
}

impl RelationReport {
    pub fn max_relation(&self) -> f64 {
        self.relations.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn max_adjointness(&self) -> f64 {
        self.adjointness.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.max_relation().max(self.max_adjointness())
    }
}

/// Residuals of the defining relations and of adjointness, on levels
/// `n ≤ nmax − 1`.
pub fn relation_residuals(rep: &DlssvRepresentation, q: f64) -> Result<RelationReport> {
    let mask = rep.basis.interior_mask();
    let dim = rep.basis.len();
    let id = OperatorMatrix::identity(dim);
    let (a, b, a_, b_) = (&rep.alpha, &rep.beta, &rep.alpha_star, &rep.beta_star);
    let norm = |m: OperatorMatrix| m.restrict(&mask, &mask).operator_norm();
    let relations = vec![
        ("a*a + b*b = 1".to_string(), norm(a_.compose(a)?.add(&b_.compose(b)?)?.sub(&id)?)),
        ("aa* + q^2 bb* = 1".to_string(), norm(a.compose(a_)?.combine(1.0, &b.compose(b_)?, q * q)?.sub(&id)?)),
        ("ab = q ba".to_string(), norm(a.compose(b)?.combine(1.0, &b.compose(a)?, -q)?)),
        ("ab* = q b*a".to_string(), norm(a.compose(b_)?.combine(1.0, &b_.compose(a)?, -q)?)),
        ("b*b = bb*".to_string(), norm(b_.compose(b)?.sub(&b.compose(b_)?)?)),
    ];
    let adjointness =
        vec![("alpha".to_string(), norm(a.adjoint().sub(a_)?)), ("beta".to_string(), norm(b.adjoint().sub(b_)?))];
    Ok(RelationReport { relations, adjointness })
}

pub fn check_relations(t: Truncation, q: f64) -> Result<RelationReport> {
    relation_residuals(&DlssvRepresentation::new(t, q)?, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::q_number_f64;

    const Q: f64 = 0.5;

    fn hi(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn t(twice: i32) -> Truncation {
        Truncation::from_twice(twice).unwrap()
    }

    #[test]
    fn documented_values() {
        let c = coeff(CoeffKind::AMinus, hi(0), hi(0), hi(1), Q).unwrap();
        assert_eq!(c.entries, [[0.0; 2]; 2]);
        let c = coeff(CoeffKind::APlus, hi(0), hi(0), hi(1), Q).unwrap();
        let expected = Q.powf(-0.5) / q_number_f64(hi(4), Q).sqrt();
        assert!((c.entries[0][0] - expected).abs() < 1e-15);
        assert!((c.entries[0][0] - 0.894427191).abs() < 1e-9);
        let sym = coeff_symbolic(CoeffKind::APlus, hi(0), hi(0), hi(1)).unwrap();
        assert!(sym.entries[1][0].is_zero());
        assert!((sym.entries[1][1].evaluate(Q).unwrap() - 1.0).abs() < 1e-15);
        let c = coeff(CoeffKind::BPlus, hi(0), hi(0), hi(1), Q).unwrap();
        assert!((c.entries[0][0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn tilde_domain() {
        assert!(coeff_tilde(CoeffKind::AMinus, hi(1), hi(1), hi(1), Q).is_err());
        let a = coeff(CoeffKind::AMinus, hi(2), hi(0), hi(1), Q).unwrap();
        let at = coeff_tilde(CoeffKind::APlus, hi(1), hi(1), hi(2), Q).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(at.entries[r][c], a.entries[c][r]);
            }
        }
    }

    #[test]
    fn exact_squares_match_numeric_values() {
        for n2 in 0..=4 {
            for i2 in (-n2..=n2).step_by(2) {
                for j2 in (-n2 - 1..=n2 + 1).step_by(2) {
                    for kind in CoeffKind::ALL {
                        let c = coeff_symbolic(kind, hi(n2), hi(i2), hi(j2)).unwrap();
                        for r in 0..2 {
                            for s in 0..2 {
                                if !c.is_present(r, s) {
                                    continue;
                                }
                                let e = &c.entries[r][s];
                                let v = e.evaluate(Q).unwrap();
                                let sq = e.exact_square().unwrap().evaluate(Q).unwrap().get();
                                assert!((v * v.abs() - sq).abs() < 1e-12, "{kind} {e}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn action_on_lowest_vector() {
        let tt = t(2);
        let b = enumerate_dlssv(tt);
        let src = b.index_of(&DlssvIndex::from_twice(0, 0, 1, Sector::Up)).unwrap();
        let m = pi_prime(Generator::AlphaStar, tt, Q).unwrap();
        let target = b.index_of(&DlssvIndex::from_twice(1, 1, 2, Sector::Up)).unwrap();
        let expected = Q.powf(-0.5) / q_number_f64(hi(4), Q).sqrt();
        assert_eq!(m.column(src).len(), 1);
        assert!((m.get(target, src) - expected).abs() < 1e-15);
        let mb = pi_prime(Generator::Beta, tt, Q).unwrap();
        let target = b.index_of(&DlssvIndex::from_twice(1, 1, 0, Sector::Up)).unwrap();
        assert!((mb.get(target, src) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn relations_hold_on_interior() {
        let r = check_relations(t(8), Q).unwrap();
        assert!(r.max() < 1e-10, "{r:?}");
    }

    #[test]
    fn corrupted_sign_is_detected() {
        let m = Mutation { kind: CoeffKind::BMinus, row: 0, col: 0 };
        let rep = DlssvRepresentation::with_mutation(t(8), Q, Some(m)).unwrap();
        assert!(relation_residuals(&rep, Q).unwrap().max_relation() > 0.1);
    }

    #[test]
    fn dirac_spectrum() {
        let tt = t(4);
        let b = enumerate_dlssv(tt);
        let d = dirac_dlssv(tt);
        let at = |x: DlssvIndex| d.get(b.index_of(&x).unwrap(), b.index_of(&x).unwrap());
        assert_eq!(at(DlssvIndex::from_twice(0, 0, 1, Sector::Up)), 1.0);
        assert_eq!(at(DlssvIndex::from_twice(0, 0, -1, Sector::Up)), 1.0);
        assert_eq!(at(DlssvIndex::from_twice(1, 1, 0, Sector::Down)), -1.0);
        assert_eq!(at(DlssvIndex::from_twice(2, 0, 1, Sector::Down)), -2.0);
        for n in tt.levels() {
            let on_level: Vec<_> = b.labels().iter().filter(|x| x.n == n).collect();
            let up = on_level.iter().filter(|x| x.sector == Sector::Up).count() as i32;
            let down = on_level.len() as i32 - up;
            let n2 = n.twice();
            assert_eq!((up, down), ((n2 + 1) * (n2 + 2), (n2 + 1) * n2));
        }
    }
}
