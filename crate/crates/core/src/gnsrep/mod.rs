//! Truncated operators on the GNS space in the Peter–Weyl basis: the
//! approximate generators, Dirac operators and regular actions.

mod dirac;
mod regular;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coordalg::{AlgebraElement, Generator};
use crate::error::Result;
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_pw, BasisLabel, PwBasis, PwIndex, Truncation};
use crate::qarith::HalfInt;

pub use dirac::{
    commutator_norm, d1, d2, dirac_family, direct_sum, growth_bound, op_abs, op_sign, sign_compact_diff,
    summability_partial_sums, DiracSpectrum, EigenvalueModel, EquivarianceSide, GrowthBound, LevelSpectrum,
    PartialSums, SignCompactness, K2_GRID_STEP,
};
pub use regular::{
    check_dynamic_equivariance, check_structural_equivariance, regular_action, regular_action_exact,
    standard_functionals, DynamicEquivariance, ExactOperator,
};

/// A formula term whose target label is not a basis vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedTerm {
    pub source: PwIndex,
    /// Not a valid label; kept for the log.
    pub target: PwIndex,
    pub coefficient: f64,
    /// The coefficient vanishes identically, not just numerically.
    pub exact_zero: bool,
}

impl fmt::Display for DroppedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} (coefficient {:e}{})",
            self.source,
            self.target,
            self.coefficient,
            if self.exact_zero { ", exact zero" } else { "" }
        )
    }
}

/// `(1 − q^e)^{1/2}` with `e` a nonnegative integer, exactly 0 at `e = 0`.
fn sqrt_one_minus(q: f64, e: i32) -> f64 {
    if e <= 0 {
        0.0
    } else {
        (1.0 - q.powi(e)).sqrt()
    }
}

struct Term {
    dn: HalfInt,
    di: HalfInt,
    dj: HalfInt,
    coefficient: f64,
    exact_zero: bool,
}

fn assemble(t: Truncation, terms: impl Fn(PwIndex) -> [Term; 2]) -> Result<(OperatorMatrix, Vec<DroppedTerm>)> {
    let basis = enumerate_pw(t);
    let mut triplets = Vec::new();
    let mut dropped = Vec::new();
    let mut boundary = Vec::new();
    for (col, &x) in basis.labels().iter().enumerate() {
        for term in terms(x) {
            let target = PwIndex { n: x.n + term.dn, i: x.i + term.di, j: x.j + term.dj };
            if !target.is_valid() {
                dropped.push(DroppedTerm {
                    source: x,
                    target,
                    coefficient: term.coefficient,
                    exact_zero: term.exact_zero,
                });
                continue;
            }
            match basis.position(&target) {
                Some(row) => {
                    if !term.exact_zero {
                        triplets.push((row, col, term.coefficient));
                    }
                }
                None => boundary.push(col),
            }
        }
    }
    let m = OperatorMatrix::from_triplets(basis.len(), basis.len(), triplets).with_boundary(boundary);
    Ok((m, dropped))
}

fn half(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

/// ĥα together with the log of dropped terms.
pub fn hat_alpha_with_drops(t: Truncation, q: f64) -> Result<(OperatorMatrix, Vec<DroppedTerm>)> {
    assemble(t, |x| {
        let (n2, i2, j2) = (x.n.twice(), x.i.twice(), x.j.twice());
        let up = q.powi((2 * n2 + i2 + j2 + 2) / 2);
        let (ei, ej) = (n2 + i2, n2 + j2);
        [
            Term { dn: half(1), di: half(-1), dj: half(-1), coefficient: up, exact_zero: false },
            Term {
                dn: half(-1),
                di: half(-1),
                dj: half(-1),
                coefficient: sqrt_one_minus(q, ei) * sqrt_one_minus(q, ej),
                exact_zero: ei == 0 || ej == 0,
            },
        ]
    })
}

/// ĥβ together with the log of dropped terms.
pub fn hat_beta_with_drops(t: Truncation, q: f64) -> Result<(OperatorMatrix, Vec<DroppedTerm>)> {
    assemble(t, |x| {
        let (n2, i2, j2) = (x.n.twice(), x.i.twice(), x.j.twice());
        let ei = n2 + i2 + 2;
        let ej = n2 + j2;
        [
            Term {
                dn: half(1),
                di: half(1),
                dj: half(-1),
                coefficient: -q.powi((n2 + j2) / 2) * sqrt_one_minus(q, ei),
                exact_zero: false,
            },
            Term {
                dn: half(-1),
                di: half(1),
                dj: half(-1),
                coefficient: q.powi((n2 + i2) / 2) * sqrt_one_minus(q, ej),
                exact_zero: ej == 0,
            },
        ]
    })
}

pub fn hat_alpha(t: Truncation, q: f64) -> Result<OperatorMatrix> {
    Ok(hat_alpha_with_drops(t, q)?.0)
}

pub fn hat_beta(t: Truncation, q: f64) -> Result<OperatorMatrix> {
    Ok(hat_beta_with_drops(t, q)?.0)
}

/// The approximate representation `α ↦ ĥα`, `β ↦ ĥβ`, extended to words.
pub struct HatRepresentation {
    basis: PwBasis,
    q: f64,
    alpha: OperatorMatrix,
    beta: OperatorMatrix,
    alpha_star: OperatorMatrix,
    beta_star: OperatorMatrix,
}

impl HatRepresentation {
    pub fn new(t: Truncation, q: f64) -> Result<Self> {
        let basis = enumerate_pw(t);
        let alpha = hat_alpha(t, q)?;
        let beta = hat_beta(t, q)?;
        // the adjoints raise the level through the transposed down terms
        let top: Vec<usize> = (0..basis.len()).filter(|&k| basis.labels()[k].n == t.nmax()).collect();
        let alpha_star = alpha.adjoint().with_boundary(top.clone());
        let beta_star = beta.adjoint().with_boundary(top);
        Ok(HatRepresentation { basis, q, alpha, beta, alpha_star, beta_star })
    }

    pub fn basis(&self) -> &PwBasis {
        &self.basis
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn generator(&self, g: Generator) -> &OperatorMatrix {
        match g {
            Generator::Alpha => &self.alpha,
            Generator::Beta => &self.beta,
            Generator::AlphaStar => &self.alpha_star,
            Generator::BetaStar => &self.beta_star,
        }
    }

    /// `π̂(x)` for a normal-ordered element.
    pub fn pi_hat(&self, x: &AlgebraElement) -> Result<OperatorMatrix> {
        let dim = self.basis.len();
        let mut out = OperatorMatrix::zeros(dim, dim);
        for (m, c) in x.terms() {
            let a = if m.apow >= 0 { Generator::Alpha } else { Generator::AlphaStar };
            let word = std::iter::repeat_n(a, m.apow.unsigned_abs() as usize)
                .chain(std::iter::repeat_n(Generator::Beta, m.bpow as usize))
                .chain(std::iter::repeat_n(Generator::BetaStar, m.bstarpow as usize));
            let mut op = OperatorMatrix::identity(dim);
            for g in word {
                op = op.compose(self.generator(g))?;
            }
            out = out.combine(1.0, &op, c.evaluate(self.q)?.get())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordalg::Monomial;

    const Q: f64 = 0.5;

    fn t(twice: i32) -> Truncation {
        Truncation::from_twice(twice).unwrap()
    }

    fn idx(b: &PwBasis, n2: i32, i2: i32, j2: i32) -> usize {
        b.index_of(&PwIndex::from_twice(n2, i2, j2)).unwrap()
    }

    #[test]
    fn formula_values() {
        let b = enumerate_pw(t(2));
        let a = hat_alpha(t(2), Q).unwrap();
        assert_eq!(a.column(0), &[(idx(&b, 1, -1, -1), Q)]);
        let c = idx(&b, 1, 1, 1);
        assert!((a.get(idx(&b, 2, 0, 0), c) - Q.powi(3)).abs() < 1e-15);
        assert!((a.get(0, c) - (1.0 - Q * Q)).abs() < 1e-15);
        let bt = hat_beta(t(2), Q).unwrap();
        assert_eq!(bt.column(0), &[(idx(&b, 1, 1, -1), -(1.0 - Q * Q).sqrt())]);
    }

    #[test]
    fn alpha_drops_only_vanishing_terms() {
        for twice in 0..=6 {
            let (_, dropped) = hat_alpha_with_drops(t(twice), Q).unwrap();
            assert!(dropped.iter().all(|d| d.exact_zero && d.coefficient == 0.0), "{dropped:?}");
        }
    }

    #[test]
    fn beta_drops_nonzero_only_at_top_weight() {
        for twice in 0..=6 {
            let (_, dropped) = hat_beta_with_drops(t(twice), Q).unwrap();
            for d in dropped.iter().filter(|d| !d.exact_zero) {
                // down term at i = n
                assert_eq!(d.source.n, d.source.i, "{d}");
            }
        }
    }

    #[test]
    fn words_respect_the_star() {
        let rep = HatRepresentation::new(t(6), Q).unwrap();
        let basis = rep.basis();
        let keep: Vec<bool> = basis.labels().iter().map(|l| l.n.twice() <= 6 - 2 * 3).collect();
        for m in Monomial::up_to_degree(3) {
            let x = AlgebraElement::monomial(m);
            let lhs = rep.pi_hat(&x).unwrap().adjoint().restrict(&keep, &keep);
            let rhs = rep.pi_hat(&x.star()).unwrap().restrict(&keep, &keep);
            assert!(lhs.sub(&rhs).unwrap().max_abs_entry() < 1e-12, "{m}");
        }
        assert_eq!(rep.pi_hat(&AlgebraElement::one()).unwrap(), OperatorMatrix::identity(basis.len()));
    }
}
