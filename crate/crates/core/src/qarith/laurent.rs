//! Laurent polynomials with integer coefficients in the variable `s = q^{1/2}`.
//!
//! Exponents are counted in units of `s`, so `q^k` is the monomial `s^{2k}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `Σ coeffs[k] · s^{low + k}`, trimmed so that both end coefficients are
/// nonzero. The zero polynomial has no coefficients and `low == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    low: i32,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        LaurentPoly::monomial(c, 0)
    }

    /// `c · s^exp`.
    pub fn monomial(c: BigInt, exp: i32) -> Self {
        LaurentPoly::from_coeffs(exp, vec![c])
    }

    pub fn from_coeffs(low: i32, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i32;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent carrying a nonzero coefficient (0 for the zero polynomial).
    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i32) -> BigInt {
        usize::try_from(exp - self.low).ok().and_then(|k| self.coeffs.get(k).cloned()).unwrap_or_default()
    }

    /// Iterates `(exponent, coefficient)` over the nonzero terms in
    /// increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| (self.low + k as i32, c))
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { other.neg() } else { other.clone() };
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let mut coeffs = vec![BigInt::zero(); (high - low + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.low - low) as usize + k];
            if subtract {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        LaurentPoly::from_coeffs(low, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                coeffs[a + b] += ca * cb;
            }
        }
        LaurentPoly::from_coeffs(self.low + other.low, coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Nonnegative gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Evaluate at `s`.
    pub fn eval(&self, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c.to_f64().unwrap_or(f64::NAN);
        }
        acc * s.powi(self.low)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s^{}·{:?}", self.low, self.coeffs)
    }
}

// Dense polynomial helpers over ℤ. Index k holds the coefficient of x^k.

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn poly_primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    poly_trim(&mut p);
    let c = poly_content(&p);
    if !c.is_zero() && !c.is_one() {
        for x in p.iter_mut() {
            *x = &*x / &c;
        }
    }
    if p.last().is_some_and(Signed::is_negative) {
        for x in p.iter_mut() {
            *x = -&*x;
        }
    }
    p
}

/// Pseudo-remainder of `a` by `b`, scaled freely by powers of `lc(b)`.
fn poly_pseudo_rem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    poly_trim(&mut a);
    while a.len() > db {
        let da = a.len() - 1;
        let la = a[da].clone();
        for x in a.iter_mut() {
            *x *= lb;
        }
        for (k, bk) in b.iter().enumerate() {
            a[da - db + k] -= &la * bk;
        }
        poly_trim(&mut a);
    }
    a
}

/// Primitive gcd of two nonzero integer polynomials, positive leading coefficient.
pub(crate) fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = poly_primitive(a.to_vec());
    let mut b = poly_primitive(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = poly_primitive(poly_pseudo_rem(a, &b));
        a = b;
        b = r;
    }
    a
}

/// Exact quotient `a / b` in ℤ[x]; `b` must divide `a`.
pub(crate) fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lb = &b[db];
    if rem.len() <= db {
        debug_assert!(rem.is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let (c, r) = rem[dr].div_rem(lb);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        for (k, bk) in b.iter().enumerate() {
            rem[dr - db + k] -= &c * bk;
        }
        quot[dr - db] = c;
        poly_trim(&mut rem);
    }
    debug_assert!(rem.is_empty(), "inexact polynomial division");
    quot
}

/// Reduce `num/den` to lowest terms with `den.low() == 0` and a positive
/// constant term in the denominator. Panics on a zero denominator.
pub(crate) fn reduce(num: &LaurentPoly, den: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return (LaurentPoly::zero(), LaurentPoly::one());
    }
    let shift = num.low - den.low;
    let mut n = num.coeffs.clone();
    let mut d = den.coeffs.clone();
    if d.len() > 1 && n.len() > 1 {
        let g = poly_gcd(&n, &d);
        if g.len() > 1 {
            n = poly_div_exact(&n, &g);
            d = poly_div_exact(&d, &g);
        }
    }
    let c = poly_content(&n).gcd(&poly_content(&d));
    let sign_flip = d[0].is_negative();
    if !c.is_one() || sign_flip {
        let c = if sign_flip { -c } else { c };
        for x in n.iter_mut() {
            *x = &*x / &c;
        }
        for x in d.iter_mut() {
            *x = &*x / &c;
        }
    }
    (LaurentPoly::from_coeffs(shift, n), LaurentPoly::from_coeffs(0, d))
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.low, &self.coeffs).cmp(&(other.low, &other.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(low: i32, cs: &[i64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(low, cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn trimming_keeps_canonical_form() {
        let x = p(-2, &[0, 0, 3, 0]);
        assert_eq!(x, p(0, &[3]));
        assert_eq!(p(5, &[0, 0]), LaurentPoly::zero());
    }

    #[test]
    fn arithmetic() {
        let a = p(-1, &[1, 0, 1]); // s^-1 + s
        let b = p(-1, &[-1, 0, 1]); // s - s^-1
        assert_eq!(a.mul(&b), p(-2, &[-1, 0, 0, 0, 1]));
        assert_eq!(a.add(&b), p(1, &[2]));
        assert_eq!(a.sub(&a), LaurentPoly::zero());
        assert!((a.eval(2.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn gcd_and_exact_division() {
        // (1 - x^2) and (1 - x^4) share (1 - x^2)
        let a: Vec<BigInt> = [1, 0, -1].iter().map(|&c| BigInt::from(c)).collect();
        let b: Vec<BigInt> = [1, 0, 0, 0, -1].iter().map(|&c| BigInt::from(c)).collect();
        let g = poly_gcd(&a, &b);
        let expect: Vec<BigInt> = [-1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(g, expect);
        let q = poly_div_exact(&b, &g);
        let expect_q: Vec<BigInt> = [-1, 0, -1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(q, expect_q);
    }

    #[test]
    fn reduce_moves_powers_to_numerator() {
        let (n, d) = reduce(&p(3, &[2, 0, -2]), &p(1, &[4, 0, 0, 0, -4]));
        assert_eq!(n, p(2, &[1]));
        assert_eq!(d, p(0, &[2, 0, 2]));
    }
}
