use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::half_int::HalfInt;
use super::laurent::{reduce, LaurentPoly};
use crate::error::Error;

/// A finite real number produced by evaluating an exact scalar.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QReal(f64);

impl QReal {
    pub fn new(x: f64) -> Result<Self, Error> {
        if x.is_finite() {
            Ok(QReal(x))
        } else {
            Err(Error::NonFinite(x))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<QReal> for f64 {
    fn from(x: QReal) -> f64 {
        x.0
    }
}

impl fmt::Display for QReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Exact element of ℚ(q^{1/2}) with integer-coefficient numerator and
/// denominator, kept in lowest terms.
///
/// Canonical form: `gcd(num, den) = 1`, the denominator has no power of
/// `q` factored out and its constant term is positive. Structural equality
/// is therefore mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QScalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        QScalar { num: LaurentPoly::constant(BigInt::from(c)), den: LaurentPoly::one() }
    }

    pub fn from_parts(num: LaurentPoly, den: LaurentPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = reduce(&num, &den);
        Ok(QScalar { num, den })
    }

    fn from_reduced(num: LaurentPoly, den: LaurentPoly) -> Self {
        let (num, den) = reduce(&num, &den);
        QScalar { num, den }
    }

    /// The deformation parameter `q`.
    pub fn q() -> Self {
        QScalar::q_pow(HalfInt::ONE)
    }

    /// `q^e` for a half-integer exponent.
    pub fn q_pow(e: HalfInt) -> Self {
        QScalar { num: LaurentPoly::monomial(BigInt::one(), e.twice()), den: LaurentPoly::one() }
    }

    pub fn q_pow_int(e: i32) -> Self {
        QScalar::q_pow(HalfInt::from_int(e))
    }

    /// `c · q^e`.
    pub fn term(c: i64, e: HalfInt) -> Self {
        QScalar { num: LaurentPoly::monomial(BigInt::from(c), e.twice()), den: LaurentPoly::one() }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the denominator is 1, i.e. the value is a Laurent polynomial.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::from_reduced(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, Error> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(QScalar::one(), |acc, _| &acc * self)
    }

    /// Numerical value at `q`.
    pub fn evaluate(&self, q: f64) -> Result<QReal, Error> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must be positive and finite, got {q}")));
        }
        let s = q.sqrt();
        let d = self.den.eval(s);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::PoleAtQ { q });
        }
        QReal::new(self.num.eval(s) / d)
    }

    /// Square root of the value at `q`, after checking that the value is
    /// nonnegative there.
    pub fn sqrt_at(&self, q: f64) -> Result<f64, Error> {
        let v = self.evaluate(q)?.get();
        if v < 0.0 {
            return Err(Error::NegativeRadicand(format!("{self} = {v} at q = {q}")));
        }
        Ok(v.sqrt())
    }
}

/// The q-number `[m] = (q^m - q^{-m}) / (q - q^{-1})`.
pub fn q_number(m: HalfInt) -> QScalar {
    let num = LaurentPoly::monomial(BigInt::one(), m.twice()).sub(&LaurentPoly::monomial(BigInt::one(), -m.twice()));
    let den = LaurentPoly::monomial(BigInt::one(), 2).sub(&LaurentPoly::monomial(BigInt::one(), -2));
    QScalar::from_reduced(num, den)
}

/// Floating-point `[m]` at `q`, for hot loops that only need numbers.
pub fn q_number_f64(m: HalfInt, q: f64) -> f64 {
    if m.twice() == 0 {
        return 0.0;
    }
    let x = m.to_f64();
    (q.powf(x) - q.powf(-x)) / (q - 1.0 / q)
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl From<i64> for QScalar {
    fn from(c: i64) -> Self {
        QScalar::from_int(c)
    }
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return QScalar { num: self.num.add(&rhs.num), den: LaurentPoly::one() };
            }
            return QScalar::from_reduced(self.num.add(&rhs.num), self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        QScalar::from_reduced(num, self.den.mul(&rhs.den))
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar { num: self.num.mul(&rhs.num), den: LaurentPoly::one() };
        }
        QScalar::from_reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

/// Panics on division by zero, like the integer types.
impl Div for &QScalar {
    type Output = QScalar;
    fn div(self, rhs: &QScalar) -> QScalar {
        self.checked_div(rhs).expect("QScalar division by zero")
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for QScalar {
            type Output = QScalar;
            fn $f(self, rhs: QScalar) -> QScalar {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&QScalar> for QScalar {
            type Output = QScalar;
            fn $f(self, rhs: &QScalar) -> QScalar {
                (&self).$f(rhs)
            }
        }
        impl $tr<QScalar> for &QScalar {
            type Output = QScalar;
            fn $f(self, rhs: QScalar) -> QScalar {
                self.$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, rhs: &QScalar) {
        *self = &*self * rhs;
    }
}

impl Sum for QScalar {
    fn sum<I: Iterator<Item = QScalar>>(iter: I) -> QScalar {
        iter.fold(QScalar::zero(), |a, b| a + b)
    }
}

impl Product for QScalar {
    fn product<I: Iterator<Item = QScalar>>(iter: I) -> QScalar {
        iter.fold(QScalar::one(), |a, b| a * b)
    }
}

// ---- text form -------------------------------------------------------------
//
// Polynomials print as sums of `c*q^e` in increasing exponent order, with
// `e` an integer, `(-k)` or `(k/2)`; quotients print as `(num)/(den)`.

fn fmt_exp(twice: i32) -> String {
    if twice % 2 != 0 {
        format!("({twice}/2)")
    } else if twice < 0 {
        format!("({})", twice / 2)
    } else {
        format!("{}", twice / 2)
    }
}

fn fmt_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (e, mag.is_one()) {
            (0, _) => out.push_str(&mag.to_string()),
            (_, true) => out.push_str(&format!("q^{}", fmt_exp(e))),
            (_, false) => out.push_str(&format!("{mag}*q^{}", fmt_exp(e))),
        }
    }
    out
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_exp(s: &str) -> Option<i32> {
    let s = s.trim();
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    if let Some((num, den)) = inner.split_once('/') {
        if den.trim() != "2" {
            return None;
        }
        return num.trim().parse::<i32>().ok();
    }
    inner.trim().parse::<i32>().ok().map(|e| 2 * e)
}

fn parse_term(t: &str) -> Option<LaurentPoly> {
    let t = t.trim();
    let (coef, power) = match t.split_once('q') {
        None => (t, None),
        Some((c, rest)) => {
            let c = c.trim().trim_end_matches('*').trim();
            let rest = rest.trim();
            let e = if rest.is_empty() { Some(2) } else { parse_exp(rest.strip_prefix('^')?) };
            (if c.is_empty() { "1" } else { c }, Some(e?))
        }
    };
    let c: BigInt = coef.parse().ok()?;
    Some(LaurentPoly::monomial(c, power.unwrap_or(0)))
}

fn parse_poly(s: &str) -> Option<LaurentPoly> {
    let s = s.trim();
    let mut acc = LaurentPoly::zero();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut sign = 1i64;
    let bytes: Vec<char> = s.chars().collect();
    let mut terms: Vec<(i64, String)> = Vec::new();
    for (k, &ch) in bytes.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev: String = bytes[start..k].iter().collect();
                // a sign directly after '^' belongs to the exponent
                let after_caret = prev.trim_end().ends_with('^');
                if after_caret {
                    continue;
                }
                if !prev.trim().is_empty() {
                    terms.push((sign, prev));
                }
                sign = if ch == '-' { -1 } else { 1 };
                start = k + 1;
            }
            _ => {}
        }
    }
    let last: String = bytes[start..].iter().collect();
    if last.trim().is_empty() {
        return None;
    }
    terms.push((sign, last));
    for (sg, t) in terms {
        let term = parse_term(&t)?;
        acc = if sg < 0 { acc.sub(&term) } else { acc.add(&term) };
    }
    Some(acc)
}

/// Split `(a)/(b)` at the top-level slash.
fn split_quotient(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..k], &s[k + 1..])),
            _ => {}
        }
    }
    None
}

impl FromStr for QScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not an exact scalar: {s:?}"));
        let s = s.trim();
        match split_quotient(s) {
            Some((n, d)) => {
                let strip = |x: &str| -> Option<LaurentPoly> {
                    let x = x.trim();
                    let x = x.strip_prefix('(')?.strip_suffix(')')?;
                    parse_poly(x)
                };
                let num = strip(n).ok_or_else(bad)?;
                let den = strip(d).ok_or_else(bad)?;
                QScalar::from_parts(num, den)
            }
            None => Ok(QScalar { num: parse_poly(s).ok_or_else(bad)?, den: LaurentPoly::one() }),
        }
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn q_number_small_values() {
        assert!(q_number(HalfInt::ZERO).is_zero());
        assert!(q_number(HalfInt::ONE).is_one());
        assert!((q_number(h(4)).evaluate(0.5).unwrap().get() - 2.5).abs() < 1e-14);
        assert!((q_number(h(6)).evaluate(0.5).unwrap().get() - 5.25).abs() < 1e-12);
        // [2] = q + q^{-1}
        assert_eq!(q_number(h(4)), QScalar::q() + QScalar::q_pow_int(-1));
    }

    #[test]
    fn q_number_integer_expansion() {
        // [m] = q^{-(m-1)} + q^{-(m-3)} + ... + q^{m-1}
        for m in 1..=7 {
            let expansion: QScalar = (0..m).map(|k| QScalar::q_pow_int(-(m - 1) + 2 * k)).sum();
            assert_eq!(q_number(HalfInt::from_int(m)), expansion, "m = {m}");
        }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(QScalar::one().evaluate(0.3).unwrap().get(), 1.0);
        let one = QScalar::one();
        let q2 = QScalar::q_pow_int(2);
        let q4 = QScalar::q_pow_int(4);
        let x = (&one - &q2) / (&one - &q4);
        assert!((x.evaluate(0.5).unwrap().get() - 0.8).abs() < 1e-15);
        // reduced to 1/(1+q^2)
        assert_eq!(x, one.clone() / (one + q2));
    }

    #[test]
    fn pole_is_reported() {
        let one = QScalar::one();
        let x = &one / &(&one - &QScalar::q_pow_int(2));
        assert!(matches!(x.evaluate(1.0), Err(Error::PoleAtQ { .. })));
        assert!(x.evaluate(0.0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let one = QScalar::one();
        let samples = vec![
            QScalar::zero(),
            one.clone(),
            QScalar::from_int(-7),
            q_number(h(3)),
            q_number(h(5)) / q_number(h(4)),
            (&one - &QScalar::q_pow_int(2)) / (&one - &QScalar::q_pow_int(6)),
            QScalar::term(-3, h(-3)) + QScalar::term(2, h(5)),
        ];
        for x in samples {
            let s = x.to_string();
            let back: QScalar = s.parse().unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(back, x, "{s}");
        }
        assert_eq!("q".parse::<QScalar>().unwrap(), QScalar::q());
        assert!("q^".parse::<QScalar>().is_err());
    }

    #[test]
    fn sqrt_rejects_negative_values() {
        assert!(matches!(QScalar::from_int(-1).sqrt_at(0.5), Err(Error::NegativeRadicand(_))));
        assert_eq!(QScalar::from_int(4).sqrt_at(0.5).unwrap(), 2.0);
    }
}
