//! The coordinate *-algebra of SU_q(2) over exact rational functions of q.
//!
//! Elements are kept in the normal form `α^k β^m β*^l` (with `k < 0` standing
//! for `α*^{-k}`). Products are normal-ordered by multiplying on the right one
//! `α` or `α*` at a time; β and β* commute with each other and are moved past
//! α-powers with a q-power.

mod gs;
mod hopf;
mod solve;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::qarith::{HalfInt, QScalar};

pub use gs::{convention_hash, gs_basis, load_or_build_gs_basis, ExactColumns, GsBasis, GsVector, CONVENTION};
pub use hopf::{
    comultiply, convolve, counit, haar, haar_invariance_oracle, hopf_axioms, inner, Functional, HopfAxioms, Side,
    TensorElement,
};
pub use solve::{exact_rank, solve_exact};

/// `α^apow β^bpow β*^bstarpow`; negative `apow` means a power of α*.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub apow: i32,
    pub bpow: u32,
    pub bstarpow: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { apow: 0, bpow: 0, bstarpow: 0 };

    pub const fn new(apow: i32, bpow: u32, bstarpow: u32) -> Self {
        Monomial { apow, bpow, bstarpow }
    }

    pub fn degree(self) -> u32 {
        self.apow.unsigned_abs() + self.bpow + self.bstarpow
    }

    /// Bi-weight `(i, j)`: α has `(−½, −½)`, β has `(½, −½)`, stars negate.
    pub fn weight(self) -> (HalfInt, HalfInt) {
        let (b, bs) = (self.bpow as i32, self.bstarpow as i32);
        (HalfInt::from_twice(-self.apow + b - bs), HalfInt::from_twice(-self.apow - b + bs))
    }

    /// All monomials of total degree at most `d`, in `Ord` order.
    pub fn up_to_degree(d: u32) -> Vec<Monomial> {
        let d = d as i32;
        let mut out = Vec::new();
        for k in -d..=d {
            let rest = (d - k.abs()) as u32;
            for m in 0..=rest {
                for l in 0..=(rest - m) {
                    out.push(Monomial::new(k, m, l));
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Monomial::ONE {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let mut push = |name: &str, p: u32| match p {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{p}")),
        };
        if self.apow >= 0 {
            push("a", self.apow as u32);
        } else {
            push("a*", self.apow.unsigned_abs());
        }
        push("b", self.bpow);
        push("b*", self.bstarpow);
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    Alpha,
    Beta,
    AlphaStar,
    BetaStar,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::Alpha, Generator::Beta, Generator::AlphaStar, Generator::BetaStar];

    pub fn monomial(self) -> Monomial {
        match self {
            Generator::Alpha => Monomial::new(1, 0, 0),
            Generator::AlphaStar => Monomial::new(-1, 0, 0),
            Generator::Beta => Monomial::new(0, 1, 0),
            Generator::BetaStar => Monomial::new(0, 0, 1),
        }
    }

    pub fn star(self) -> Generator {
        match self {
            Generator::Alpha => Generator::AlphaStar,
            Generator::AlphaStar => Generator::Alpha,
            Generator::Beta => Generator::BetaStar,
            Generator::BetaStar => Generator::Beta,
        }
    }

    pub fn weight(self) -> (HalfInt, HalfInt) {
        self.monomial().weight()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Alpha => "alpha",
            Generator::Beta => "beta",
            Generator::AlphaStar => "alpha*",
            Generator::BetaStar => "beta*",
        })
    }
}

impl std::str::FromStr for Generator {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "alpha" | "a" => Ok(Generator::Alpha),
            "beta" | "b" => Ok(Generator::Beta),
            "alpha*" | "a*" | "alpha_star" => Ok(Generator::AlphaStar),
            "beta*" | "b*" | "beta_star" => Ok(Generator::BetaStar),
            _ => Err(crate::Error::Parse(format!("unknown generator {s:?}"))),
        }
    }
}

/// A finite combination of normal-ordered monomials.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<(Monomial, QScalar)>", from = "Vec<(Monomial, QScalar)>")]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, QScalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn one() -> Self {
        AlgebraElement::scalar(QScalar::one())
    }

    pub fn scalar(c: QScalar) -> Self {
        AlgebraElement::term(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial) -> Self {
        AlgebraElement::term(m, QScalar::one())
    }

    pub fn term(m: Monomial, c: QScalar) -> Self {
        let mut out = AlgebraElement::zero();
        out.add_term(m, &c);
        out
    }

    pub fn generator(g: Generator) -> Self {
        AlgebraElement::monomial(g.monomial())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, QScalar)>) -> Self {
        let mut out = AlgebraElement::zero();
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: &QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, QScalar> {
        &self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn add_scaled(&mut self, other: &AlgebraElement, c: &QScalar) {
        for (m, x) in &other.terms {
            self.add_term(*m, &(x * c));
        }
    }

    /// Product in normal order.
    pub fn normal_multiply(&self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ca * cb;
                for (m, x) in multiply_monomials(*ma, *mb).terms {
                    out.add_term(m, &(&x * &c));
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> AlgebraElement {
        (0..k).fold(AlgebraElement::one(), |acc, _| acc.normal_multiply(self))
    }

    /// The involution. Coefficients are real, so only the words change.
    pub fn star(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in &self.terms {
            let (sm, f) = star_monomial(*m);
            out.add_term(sm, &(c * &f));
        }
        out
    }

    /// The distinct bi-weights of the terms.
    pub fn weights(&self) -> Vec<(HalfInt, HalfInt)> {
        let mut w: Vec<_> = self.terms.keys().map(|m| m.weight()).collect();
        w.sort();
        w.dedup();
        w
    }
}

impl From<AlgebraElement> for Vec<(Monomial, QScalar)> {
    fn from(x: AlgebraElement) -> Self {
        x.terms.into_iter().collect()
    }
}

impl From<Vec<(Monomial, QScalar)>> for AlgebraElement {
    fn from(terms: Vec<(Monomial, QScalar)>) -> Self {
        AlgebraElement::from_terms(terms)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*[{m}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &QScalar::one());
        out
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &QScalar::from_int(-1));
        out
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.normal_multiply(rhs)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(&QScalar::from_int(-1))
    }
}

/// `m · α` (or `m · α*` when `star`), in normal order.
fn right_mul_alpha(acc: &BTreeMap<Monomial, QScalar>, star: bool) -> BTreeMap<Monomial, QScalar> {
    let mut out = AlgebraElement::zero();
    for (m, c) in acc {
        let s = (m.bpow + m.bstarpow) as i32;
        let k = m.apow;
        // β^m β*^l α = q^{-(m+l)} α β^m β*^l, and the mirror image for α*.
        let lowered = Monomial::new(if star { k - 1 } else { k + 1 }, m.bpow, m.bstarpow);
        let bb = Monomial::new(lowered.apow, m.bpow + 1, m.bstarpow + 1);
        if !star {
            let c = c * &QScalar::q_pow_int(-s);
            out.add_term(lowered, &c);
            if k < 0 {
                // α*α = 1 − ββ*
                out.add_term(bb, &-&c);
            }
        } else {
            let c = c * &QScalar::q_pow_int(s);
            out.add_term(lowered, &c);
            if k > 0 {
                // αα* = 1 − q²ββ*
                out.add_term(bb, &-&(&c * &QScalar::q_pow_int(2)));
            }
        }
    }
    out.terms
}

/// Normal-ordered product of two monomials.
pub fn multiply_monomials(a: Monomial, b: Monomial) -> AlgebraElement {
    let mut acc: BTreeMap<Monomial, QScalar> = BTreeMap::new();
    acc.insert(a, QScalar::one());
    for _ in 0..b.apow.unsigned_abs() {
        acc = right_mul_alpha(&acc, b.apow < 0);
    }
    AlgebraElement {
        terms: acc
            .into_iter()
            .map(|(m, c)| (Monomial::new(m.apow, m.bpow + b.bpow, m.bstarpow + b.bstarpow), c))
            .collect(),
    }
}

/// `(α^k β^m β*^l)* = q^{k(m+l)} α^{-k} β^l β*^m`.
fn star_monomial(m: Monomial) -> (Monomial, QScalar) {
    let e = m.apow * (m.bpow + m.bstarpow) as i32;
    (Monomial::new(-m.apow, m.bstarpow, m.bpow), QScalar::q_pow_int(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> AlgebraElement {
        AlgebraElement::generator(Generator::Alpha)
    }
    fn b() -> AlgebraElement {
        AlgebraElement::generator(Generator::Beta)
    }
    fn q(e: i32) -> QScalar {
        QScalar::q_pow_int(e)
    }

    #[test]
    fn reordering_rules() {
        assert_eq!(&b() * &a(), AlgebraElement::term(Monomial::new(1, 1, 0), q(-1)));
        let one_minus_bb = &AlgebraElement::one() - &AlgebraElement::monomial(Monomial::new(0, 1, 1));
        assert_eq!(&a().star() * &a(), one_minus_bb);
        let expected = AlgebraElement::from_terms([(Monomial::ONE, QScalar::one()), (Monomial::new(0, 1, 1), -q(2))]);
        assert_eq!(&a() * &a().star(), expected);
    }

    #[test]
    fn defining_relations_hold() {
        let (a, b) = (a(), b());
        let (as_, bs) = (a.star(), b.star());
        let one = AlgebraElement::one();
        assert_eq!(&(&as_ * &a) + &(&bs * &b), one);
        assert_eq!(&(&a * &as_) + &(&(&b * &bs) * &AlgebraElement::scalar(q(2))), one);
        assert!((&(&a * &b) - &(&b * &a).scale(&q(1))).is_zero());
        assert!((&(&a * &bs) - &(&bs * &a).scale(&q(1))).is_zero());
        assert!((&(&bs * &b) - &(&b * &bs)).is_zero());
    }

    #[test]
    fn star_is_an_antimultiplicative_involution() {
        let ab = &a() * &b();
        assert_eq!(ab.star(), AlgebraElement::term(Monomial::new(-1, 0, 1), q(1)));
        assert_eq!(b().scale(&q(1)).star(), AlgebraElement::term(Monomial::new(0, 0, 1), q(1)));
        let monos = Monomial::up_to_degree(2);
        for &x in &monos {
            let x = AlgebraElement::monomial(x);
            assert_eq!(x.star().star(), x);
            for &y in &monos {
                let y = AlgebraElement::monomial(y);
                assert_eq!((&x * &y).star(), &y.star() * &x.star());
            }
        }
    }

    #[test]
    fn multiplication_is_associative_to_degree_four() {
        let monos: Vec<_> = Monomial::up_to_degree(2).into_iter().map(AlgebraElement::monomial).collect();
        let small: Vec<_> = Monomial::up_to_degree(1).into_iter().map(AlgebraElement::monomial).collect();
        for x in &monos {
            for y in &small {
                for z in &monos {
                    assert_eq!(&(x * y) * z, x * &(y * z), "{x:?} {y:?} {z:?}");
                }
            }
        }
    }

    #[test]
    fn weights_are_additive() {
        for x in Monomial::up_to_degree(2) {
            for y in Monomial::up_to_degree(2) {
                let (wx, wy) = (x.weight(), y.weight());
                let expected = (wx.0 + wy.0, wx.1 + wy.1);
                for m in multiply_monomials(x, y).terms().keys() {
                    assert_eq!(m.weight(), expected);
                }
            }
        }
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(Monomial::up_to_degree(0), vec![Monomial::ONE]);
        assert_eq!(Monomial::up_to_degree(1).len(), 5);
        assert!(Monomial::up_to_degree(4).iter().all(|m| m.degree() <= 4));
    }
}
