//! Comultiplication, counit, Haar state and convolution by functionals.
//!
//! The comultiplication comes from the fundamental corepresentation
//! `u = ((α, −qβ*), (β, α*))` with `Δ(u_rs) = Σ_t u_rt ⊗ u_ts`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::solve::solve_exact;
use super::{multiply_monomials, AlgebraElement, Generator, Monomial};
use crate::error::{Error, Result};
use crate::qarith::QScalar;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeMap<(Monomial, Monomial), QScalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn one() -> Self {
        TensorElement::from_terms([((Monomial::ONE, Monomial::ONE), QScalar::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((Monomial, Monomial), QScalar)>) -> Self {
        let mut out = TensorElement::zero();
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    pub fn add_term(&mut self, key: (Monomial, Monomial), c: &QScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(QScalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Monomial), QScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Product in `A ⊗ A`, normal-ordered in each leg.
    pub fn multiply(&self, rhs: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a1, a2), ca) in &self.terms {
            for ((b1, b2), cb) in &rhs.terms {
                let c = ca * cb;
                let left = multiply_monomials(*a1, *b1);
                let right = multiply_monomials(*a2, *b2);
                for (m1, x1) in left.terms() {
                    let c1 = &c * x1;
                    for (m2, x2) in right.terms() {
                        out.add_term((*m1, *m2), &(&c1 * x2));
                    }
                }
            }
        }
        out
    }

    /// Apply `f ⊗ g` leg by leg, producing `Σ c f(A) ⊗ g(B)` as a tensor.
    pub fn map_legs(
        &self,
        f: impl Fn(Monomial) -> AlgebraElement,
        g: impl Fn(Monomial) -> AlgebraElement,
    ) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a, b), c) in &self.terms {
            let (fa, gb) = (f(*a), g(*b));
            for (m1, x1) in fa.terms() {
                for (m2, x2) in gb.terms() {
                    out.add_term((*m1, *m2), &(&(c * x1) * x2));
                }
            }
        }
        out
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|((a, b), c)| format!("{c}*[{a}]⊗[{b}]")).collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

fn generator_coproduct(g: Generator) -> TensorElement {
    let a = Generator::Alpha.monomial();
    let b = Generator::Beta.monomial();
    let a_ = Generator::AlphaStar.monomial();
    let b_ = Generator::BetaStar.monomial();
    let one = QScalar::one();
    let mq = -QScalar::q();
    match g {
        Generator::Alpha => TensorElement::from_terms([((a, a), one), ((b_, b), mq)]),
        Generator::AlphaStar => TensorElement::from_terms([((a_, a_), one), ((b, b_), mq)]),
        Generator::Beta => TensorElement::from_terms([((b, a), one.clone()), ((a_, b), one)]),
        Generator::BetaStar => TensorElement::from_terms([((b_, a_), one.clone()), ((a, b_), one)]),
    }
}

fn coproduct_cache() -> &'static Mutex<HashMap<Monomial, TensorElement>> {
    static CACHE: OnceLock<Mutex<HashMap<Monomial, TensorElement>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Δ on a normal-ordered monomial, built by peeling one generator off the
/// right end and memoized.
fn monomial_coproduct(m: Monomial) -> TensorElement {
    if m == Monomial::ONE {
        return TensorElement::one();
    }
    if let Some(t) = coproduct_cache().lock().unwrap().get(&m) {
        return t.clone();
    }
    let (parent, g) = if m.bstarpow > 0 {
        (Monomial::new(m.apow, m.bpow, m.bstarpow - 1), Generator::BetaStar)
    } else if m.bpow > 0 {
        (Monomial::new(m.apow, m.bpow - 1, 0), Generator::Beta)
    } else if m.apow > 0 {
        (Monomial::new(m.apow - 1, 0, 0), Generator::Alpha)
    } else {
        (Monomial::new(m.apow + 1, 0, 0), Generator::AlphaStar)
    };
    let t = monomial_coproduct(parent).multiply(&generator_coproduct(g));
    coproduct_cache().lock().unwrap().insert(m, t.clone());
    t
}

pub fn comultiply(x: &AlgebraElement) -> TensorElement {
    let mut out = TensorElement::zero();
    for (m, c) in x.terms() {
        for (k, v) in monomial_coproduct(*m).terms() {
            out.add_term(*k, &(v * c));
        }
    }
    out
}

/// ε(α) = ε(α*) = 1, ε(β) = ε(β*) = 0.
pub fn counit(x: &AlgebraElement) -> QScalar {
    x.terms().iter().filter(|(m, _)| m.bpow == 0 && m.bstarpow == 0).map(|(_, c)| c.clone()).sum()
}

fn haar_monomial(m: Monomial) -> QScalar {
    if m.apow != 0 || m.bpow != m.bstarpow {
        return QScalar::zero();
    }
    // (1 − q²) / (1 − q^{2m+2})
    let one = QScalar::one();
    let num = &one - &QScalar::q_pow_int(2);
    let den = &one - &QScalar::q_pow_int(2 * m.bpow as i32 + 2);
    &num / &den
}

/// The Haar state, by its closed form on monomials.
pub fn haar(x: &AlgebraElement) -> QScalar {
    x.terms().iter().map(|(m, c)| c * &haar_monomial(*m)).sum()
}

/// `h(x* y)`.
pub fn inner(x: &AlgebraElement, y: &AlgebraElement) -> QScalar {
    haar(&x.star().normal_multiply(y))
}

/// Solve the invariance equations `(id⊗h)Δ(x) = h(x)·1 = (h⊗id)Δ(x)` with
/// `h(1) = 1` for the values of `h` on all monomials of degree `≤ max_degree`.
pub fn haar_invariance_oracle(max_degree: u32) -> Result<BTreeMap<Monomial, QScalar>> {
    let monos = Monomial::up_to_degree(max_degree);
    let pos: HashMap<Monomial, usize> = monos.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    let var = |m: &Monomial| {
        pos.get(m).copied().ok_or_else(|| Error::InvalidParameter(format!("monomial {m} exceeds degree {max_degree}")))
    };
    let mut rows: Vec<BTreeMap<usize, QScalar>> = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |row: BTreeMap<usize, QScalar>, b: QScalar, rows: &mut Vec<_>| {
        let row: BTreeMap<usize, QScalar> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if !row.is_empty() {
            rows.push(row);
            rhs.push(b);
        }
    };
    push(BTreeMap::from([(pos[&Monomial::ONE], QScalar::one())]), QScalar::one(), &mut rows);
    for &x in &monos {
        let dx = monomial_coproduct(x);
        for right in [true, false] {
            // collect coefficient of each free-leg monomial
            let mut eqs: BTreeMap<Monomial, BTreeMap<usize, QScalar>> = BTreeMap::new();
            eqs.entry(Monomial::ONE).or_default();
            for ((a, b), c) in dx.terms() {
                let (free, summed) = if right { (*a, *b) } else { (*b, *a) };
                let e = eqs.entry(free).or_default().entry(var(&summed)?).or_insert_with(QScalar::zero);
                *e += c;
            }
            let xv = var(&x)?;
            let e = eqs.get_mut(&Monomial::ONE).unwrap().entry(xv).or_insert_with(QScalar::zero);
            *e -= &QScalar::one();
            for (_, row) in eqs {
                push(row, QScalar::zero(), &mut rows);
            }
        }
    }
    let sol = solve_exact(&rows, &rhs, monos.len())?;
    monos
        .iter()
        .zip(sol)
        .map(|(m, v)| v.map(|v| (*m, v)).ok_or_else(|| Error::InconsistentSystem(format!("h({m}) is not determined"))))
        .collect()
}

/// A linear functional on the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    Counit,
    Haar,
    /// `a ↦ h(x* a)`.
    InnerWith(AlgebraElement),
}

impl Functional {
    pub fn apply(&self, x: &AlgebraElement) -> QScalar {
        match self {
            Functional::Counit => counit(x),
            Functional::Haar => haar(x),
            Functional::InnerWith(z) => inner(z, x),
        }
    }

    fn apply_monomial(&self, m: Monomial) -> QScalar {
        self.apply(&AlgebraElement::monomial(m))
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Counit => write!(f, "counit"),
            Functional::Haar => write!(f, "haar"),
            Functional::InnerWith(z) => write!(f, "inner[{z}]"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `(ρ ⊗ id)Δ(x)`
    Left,
    /// `(id ⊗ ρ)Δ(x)`
    Right,
}

pub fn convolve(rho: &Functional, x: &AlgebraElement, side: Side) -> AlgebraElement {
    let mut values: HashMap<Monomial, QScalar> = HashMap::new();
    let mut out = AlgebraElement::zero();
    for ((a, b), c) in comultiply(x).terms() {
        let (free, summed) = match side {
            Side::Right => (*a, *b),
            Side::Left => (*b, *a),
        };
        let v = values.entry(summed).or_insert_with(|| rho.apply_monomial(summed));
        if !v.is_zero() {
            out.add_term(free, &(c * &*v));
        }
    }
    out
}

/// Failures of the Hopf axioms and of Haar invariance on monomials of
/// degree at most `max_degree`; empty lists mean every identity holds
/// exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfAxioms {
    pub max_degree: u32,
    pub monomials: usize,
    pub coassociativity: Vec<String>,
    pub counit: Vec<String>,
    pub homomorphism: Vec<String>,
    pub invariance: Vec<String>,
}

impl HopfAxioms {
    pub fn holds(&self) -> bool {
        self.coassociativity.is_empty()
            && self.counit.is_empty()
            && self.homomorphism.is_empty()
            && self.invariance.is_empty()
    }
}

fn tensor_sum(terms: &[(&TensorElement, QScalar)]) -> TensorElement {
    let mut out = TensorElement::zero();
    for (t, c) in terms {
        for (k, v) in t.terms() {
            out.add_term(*k, &(v * c));
        }
    }
    out
}

/// Check `(Δ⊗id)Δ = (id⊗Δ)Δ`, `(ε⊗id)Δ = id = (id⊗ε)Δ`, that `Δ` respects
/// the relations, the star and products `g·x`, and that `h` is invariant
/// on both sides.
pub fn hopf_axioms(max_degree: u32) -> HopfAxioms {
    let monos = Monomial::up_to_degree(max_degree);
    let mut out = HopfAxioms { max_degree, monomials: monos.len(), ..HopfAxioms::default() };
    for &m in &monos {
        let x = AlgebraElement::monomial(m);
        let dx = monomial_coproduct(m);
        let mut left: BTreeMap<(Monomial, Monomial, Monomial), QScalar> = BTreeMap::new();
        let mut right = left.clone();
        for ((a, b), c) in dx.terms() {
            for ((a1, a2), d) in monomial_coproduct(*a).terms() {
                *left.entry((*a1, *a2, *b)).or_insert_with(QScalar::zero) += &(c * d);
            }
            for ((b1, b2), d) in monomial_coproduct(*b).terms() {
                *right.entry((*a, *b1, *b2)).or_insert_with(QScalar::zero) += &(c * d);
            }
        }
        left.retain(|_, v| !v.is_zero());
        right.retain(|_, v| !v.is_zero());
        if left != right {
            out.coassociativity.push(m.to_string());
        }
        if convolve(&Functional::Counit, &x, Side::Left) != x || convolve(&Functional::Counit, &x, Side::Right) != x {
            out.counit.push(m.to_string());
        }
        let hx = AlgebraElement::scalar(haar(&x));
        if convolve(&Functional::Haar, &x, Side::Right) != hx || convolve(&Functional::Haar, &x, Side::Left) != hx {
            out.invariance.push(m.to_string());
        }
        let star_legs = dx.map_legs(|a| AlgebraElement::monomial(a).star(), |b| AlgebraElement::monomial(b).star());
        if star_legs != comultiply(&x.star()) {
            out.homomorphism.push(format!("star on {m}"));
        }
        if m.degree() < max_degree {
            for g in Generator::ALL {
                let gx = AlgebraElement::generator(g).normal_multiply(&x);
                if comultiply(&gx) != generator_coproduct(g).multiply(&dx) {
                    out.homomorphism.push(format!("{g} * {m}"));
                }
            }
        }
    }
    let d = |g| generator_coproduct(g);
    let (a, b, a_, b_) = (d(Generator::Alpha), d(Generator::Beta), d(Generator::AlphaStar), d(Generator::BetaStar));
    let q = QScalar::q();
    let one = QScalar::one();
    let minus = -QScalar::one();
    let unit = TensorElement::one();
    let relations = [
        (
            "a*a + b*b = 1",
            tensor_sum(&[(&a_.multiply(&a), one.clone()), (&b_.multiply(&b), one.clone()), (&unit, minus.clone())]),
        ),
        (
            "aa* + q^2 bb* = 1",
            tensor_sum(&[(&a.multiply(&a_), one.clone()), (&b.multiply(&b_), &q * &q), (&unit, minus.clone())]),
        ),
        ("ab = q ba", tensor_sum(&[(&a.multiply(&b), one.clone()), (&b.multiply(&a), -&q)])),
        ("ab* = q b*a", tensor_sum(&[(&a.multiply(&b_), one.clone()), (&b_.multiply(&a), -&q)])),
        ("b*b = bb*", tensor_sum(&[(&b_.multiply(&b), one), (&b.multiply(&b_), minus)])),
    ];
    for (name, r) in relations {
        if !r.is_zero() {
            out.homomorphism.push(name.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(g: Generator) -> AlgebraElement {
        AlgebraElement::generator(g)
    }

    #[test]
    fn generator_values() {
        let a = gen(Generator::Alpha);
        let b = gen(Generator::Beta);
        assert_eq!(comultiply(&AlgebraElement::one()), TensorElement::one());
        assert_eq!(counit(&a), QScalar::one());
        assert_eq!(counit(&b), QScalar::zero());
        let h_bb = haar(&AlgebraElement::monomial(Monomial::new(0, 1, 1)));
        let expected = &(&QScalar::one() - &QScalar::q_pow_int(2)) / &(&QScalar::one() - &QScalar::q_pow_int(4));
        assert_eq!(h_bb, expected);
        assert!(haar(&a).is_zero());
        let qq = QScalar::q_pow_int(2);
        assert_eq!(inner(&a, &a), &qq / &(&QScalar::one() + &qq));
        assert!(inner(&a, &b).is_zero());
    }

    #[test]
    fn comultiplication_is_a_star_homomorphism_on_relations() {
        let one = TensorElement::one();
        let d = |g| comultiply(&gen(g));
        let (a, b, a_, b_) = (d(Generator::Alpha), d(Generator::Beta), d(Generator::AlphaStar), d(Generator::BetaStar));
        let q = QScalar::q();
        let scale =
            |t: &TensorElement, c: &QScalar| TensorElement::from_terms(t.terms().iter().map(|(k, v)| (*k, v * c)));
        let sum = |x: &TensorElement, y: &TensorElement| {
            TensorElement::from_terms(x.terms().iter().chain(y.terms()).map(|(k, v)| (*k, v.clone())))
        };
        assert_eq!(sum(&a_.multiply(&a), &b_.multiply(&b)), one);
        assert_eq!(sum(&a.multiply(&a_), &scale(&b.multiply(&b_), &(&q * &q))), one);
        assert!(sum(&a.multiply(&b), &scale(&b.multiply(&a), &-&q)).is_zero());
        assert!(sum(&a.multiply(&b_), &scale(&b_.multiply(&a), &-&q)).is_zero());
        assert!(sum(&b_.multiply(&b), &scale(&b.multiply(&b_), &QScalar::from_int(-1))).is_zero());
        // Δ(x*) = Δ(x)* legwise
        for g in Generator::ALL {
            let star_legs =
                d(g).map_legs(|m| AlgebraElement::monomial(m).star(), |m| AlgebraElement::monomial(m).star());
            assert_eq!(star_legs, d(g.star()));
        }
    }

    #[test]
    fn axioms_hold_to_degree_four() {
        let r = hopf_axioms(4);
        assert!(r.holds(), "{r:?}");
        assert!(r.monomials > 50);
    }

    #[test]
    fn closed_form_haar_matches_invariance_oracle() {
        let oracle = haar_invariance_oracle(4).unwrap();
        for (m, v) in &oracle {
            assert_eq!(*v, haar_monomial(*m), "h({m})");
        }
    }

    #[test]
    fn haar_kills_alpha() {
        assert!(convolve(&Functional::Haar, &gen(Generator::Alpha), Side::Left).is_zero());
    }

    #[test]
    fn inner_product_is_positive_on_samples() {
        let q = 0.5;
        for m in Monomial::up_to_degree(3) {
            let x = &AlgebraElement::monomial(m) + &AlgebraElement::generator(Generator::Beta);
            assert!(inner(&x, &x).evaluate(q).unwrap().get() > 0.0);
        }
    }
}
