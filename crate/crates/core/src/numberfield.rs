//! Exact arithmetic in ℚ and in real quadratic fields ℚ(√d).
//!
//! A [`FieldElement`] stores `a + b√d` with rational `a`, `b` in lowest
//! terms. The field is embedded in ℝ by sending the generator to the positive
//! root, so every element has a well-defined [`sign`](FieldElement::signum)
//! and the type is totally ordered.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision fraction (positive denominator, reduced).
pub type Rational = BigRational;

/// Builds the rational `n / m`. Panics if `m == 0`.
pub fn rational(n: i64, m: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(m))
}

fn is_squarefree(d: u64) -> bool {
    let mut n = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The field ℚ(√d); `d = 1` encodes ℚ itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    d: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { d: 1 };

    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        Ok(FieldSpec { d })
    }

    pub fn d(self) -> u64 {
        self.d
    }

    pub fn is_rational(self) -> bool {
        self.d == 1
    }

    pub fn zero(self) -> FieldElement {
        FieldElement {
            a: Rational::zero(),
            b: Rational::zero(),
            spec: self,
        }
    }

    pub fn one(self) -> FieldElement {
        self.int(1)
    }

    pub fn int(self, n: i64) -> FieldElement {
        self.rational(Rational::from_integer(BigInt::from(n)))
    }

    /// The element `n / m`. Panics if `m == 0`.
    pub fn ratio(self, n: i64, m: i64) -> FieldElement {
        self.rational(rational(n, m))
    }

    pub fn rational(self, q: Rational) -> FieldElement {
        FieldElement {
            a: q,
            b: Rational::zero(),
            spec: self,
        }
    }

    /// The element `a + b√d`. Over ℚ the two parts are folded together.
    pub fn element(self, a: Rational, b: Rational) -> FieldElement {
        if self.is_rational() {
            FieldElement {
                a: a + b,
                b: Rational::zero(),
                spec: self,
            }
        } else {
            FieldElement { a, b, spec: self }
        }
    }

    /// `a + b√d` from small integers.
    pub fn from_ints(self, a: i64, b: i64) -> FieldElement {
        self.element(rational(a, 1), rational(b, 1))
    }

    /// The positive square root of `d` (equal to 1 over ℚ).
    pub fn sqrt_d(self) -> FieldElement {
        self.element(Rational::zero(), Rational::one())
    }

    fn d_rational(self) -> Rational {
        Rational::from_integer(BigInt::from(self.d))
    }

    /// Parses the textual element grammar, where `r` stands for √d.
    ///
    /// ```text
    /// elem     := term (('+' | '-') term)*
    /// term     := rational | rational '*' 'r' | 'r'
    /// rational := int ('/' posint)?
    /// ```
    ///
    /// Whitespace is ignored. A sign may also precede a bare `r`.
    pub fn parse(self, text: &str) -> Result<FieldElement> {
        Parser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            raw: text,
            pos: 0,
        }
        .elem(self)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    raw: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        // report the offset in the original text, whitespace included
        let mut seen = 0;
        let mut position = self.raw.chars().count();
        for (i, c) in self.raw.chars().enumerate() {
            if c.is_whitespace() {
                continue;
            }
            if seen == self.pos {
                position = i;
                break;
            }
            seen += 1;
        }
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn term(&mut self, spec: FieldSpec) -> Result<FieldElement> {
        let mut negative = false;
        if let Some(c @ ('+' | '-')) = self.peek() {
            negative = c == '-';
            self.pos += 1;
        }
        let value = if self.peek() == Some('r') {
            self.pos += 1;
            spec.sqrt_d()
        } else {
            let num = self
                .digits()
                .ok_or_else(|| self.err("expected a number or 'r'"))?;
            let mut q = Rational::from_integer(num);
            if self.peek() == Some('/') {
                self.pos += 1;
                let den = self
                    .digits()
                    .ok_or_else(|| self.err("expected a positive denominator"))?;
                if den.is_zero() {
                    return Err(self.err("denominator must be positive"));
                }
                q /= Rational::from_integer(den);
            }
            if self.peek() == Some('*') {
                self.pos += 1;
                if self.peek() != Some('r') {
                    return Err(self.err("expected 'r' after '*'"));
                }
                self.pos += 1;
                spec.element(Rational::zero(), q)
            } else {
                spec.rational(q)
            }
        };
        Ok(if negative { -value } else { value })
    }

    fn elem(mut self, spec: FieldSpec) -> Result<FieldElement> {
        if self.chars.is_empty() {
            return Err(self.err("empty element"));
        }
        let mut acc = self.term(spec)?;
        while let Some(c) = self.peek() {
            let op = match c {
                '+' | '-' => c,
                _ => return Err(self.err(format!("unexpected character '{c}'"))),
            };
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                return Err(self.err("expected a number or 'r'"));
            }
            let t = self.term(spec)?;
            acc = if op == '+' { acc + t } else { acc - t };
        }
        Ok(acc)
    }
}

/// An element `a + b√d` of a real quadratic field, or of ℚ when `d = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    a: Rational,
    b: Rational,
    spec: FieldSpec,
}

impl FieldElement {
    /// Rational part.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of √d.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Sign under the positive embedding: −1, 0 or +1.
    pub fn signum(&self) -> i8 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: the larger of a² and b²d wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * self.spec.d_rational();
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> FieldElement {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `a − b√d`.
    pub fn galois_conjugate(&self) -> FieldElement {
        FieldElement {
            a: self.a.clone(),
            b: -&self.b,
            spec: self.spec,
        }
    }

    /// Field norm `a² − d b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * self.spec.d_rational()
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.spec.d, other.spec.d))
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(FieldElement {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            spec: self.spec,
        })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(FieldElement {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            spec: self.spec,
        })
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        if self.b.is_zero() && other.b.is_zero() {
            return Ok(self.spec.rational(&self.a * &other.a));
        }
        let a = &self.a * &other.a + &self.b * &other.b * self.spec.d_rational();
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(FieldElement {
            a,
            b,
            spec: self.spec,
        })
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    /// Multiplicative inverse `(a − b√d) / (a² − d b²)`.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(self.spec.rational(self.a.recip()));
        }
        let n = self.norm();
        Ok(FieldElement {
            a: &self.a / &n,
            b: -&self.b / &n,
            spec: self.spec,
        })
    }

    pub fn square(&self) -> FieldElement {
        self * self
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Returns `q` with `self = q · y` when the quotient is rational.
    pub fn rational_ratio(&self, y: &FieldElement) -> Result<Option<Rational>> {
        let q = self.checked_div(y)?;
        Ok(q.b.is_zero().then_some(q.a))
    }

    /// Floating-point value. Cancellation between the two parts is avoided
    /// by going through the norm when they have opposite signs.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let root = (self.spec.d as f64).sqrt();
        if rat_sign(&self.a) * rat_sign(&self.b) >= 0 {
            a + b * root
        } else {
            let n = self.norm().to_f64().unwrap_or(f64::NAN);
            n / (a - b * root)
        }
    }
}

/// Returns `q` with `x = q · y` when `x / y ∈ ℚ`; errors when `y = 0`.
pub fn is_rational_ratio(x: &FieldElement, y: &FieldElement) -> Result<Option<Rational>> {
    x.rational_ratio(y)
}

fn rat_sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Elements of different fields are ordered by `d` first.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.spec != other.spec {
            return self.spec.cmp(&other.spec);
        }
        (self - other).signum().cmp(&0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            a: -&self.a,
            b: -&self.b,
            spec: self.spec,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Display for FieldElement {
    /// Writes the element in the parser's grammar, e.g. `3 - 2*r`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let mag = self.b.abs();
        let rpart = if mag.is_one() {
            "r".to_string()
        } else {
            format!("{mag}*r")
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{mag}*r")
            } else {
                write!(f, "{rpart}")
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {op} {rpart}", self.a)
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let k = q3();
        assert_eq!(k.from_ints(1, 1) * k.from_ints(1, -1), k.int(-2));
        let q = FieldSpec::RATIONALS;
        assert_eq!(q.ratio(1, 2) + q.ratio(1, 3), q.ratio(5, 6));
        assert_eq!(k.sqrt_d() * k.sqrt_d(), k.int(3));
    }

    #[test]
    fn sign_examples() {
        let k = q3();
        assert_eq!(k.from_ints(7, -4).signum(), 1);
        assert_eq!(k.zero().signum(), 0);
        assert_eq!(k.from_ints(1, -1).signum(), -1);
        assert_eq!(k.from_ints(-7, 4).signum(), -1);
    }

    #[test]
    fn conjugate_examples() {
        let k = q3();
        assert_eq!(k.from_ints(2, 1).galois_conjugate(), k.from_ints(2, -1));
        assert_eq!(k.int(5).galois_conjugate(), k.int(5));
        let x = k.element(rational(1, 2), rational(3, 1));
        assert_eq!(x.galois_conjugate().galois_conjugate(), x);
    }

    #[test]
    fn ratio_examples() {
        let k = q3();
        assert_eq!(
            is_rational_ratio(&k.int(3), &k.int(2)).unwrap(),
            Some(rational(3, 2))
        );
        assert_eq!(is_rational_ratio(&k.sqrt_d(), &k.int(1)).unwrap(), None);
        assert_eq!(
            is_rational_ratio(&k.from_ints(0, 2), &k.sqrt_d()).unwrap(),
            Some(rational(2, 1))
        );
        assert_eq!(
            is_rational_ratio(&k.int(1), &k.zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let x = q3().int(1);
        let y = FieldSpec::new(2).unwrap().int(1);
        assert_eq!(x.checked_add(&y), Err(Error::FieldMismatch(3, 2)));
    }

    #[test]
    fn non_squarefree_rejected() {
        assert!(FieldSpec::new(12).is_err());
        assert!(FieldSpec::new(0).is_err());
        assert!(FieldSpec::new(30).is_ok());
    }

    #[test]
    fn parse_and_display() {
        let k = q3();
        assert_eq!(k.parse("1 + r").unwrap(), k.from_ints(1, 1));
        assert_eq!(
            k.parse("-1/2*r - 3").unwrap(),
            k.element(rational(-3, 1), rational(-1, 2))
        );
        assert_eq!(k.parse("2 - 2*r").unwrap().to_string(), "2 - 2*r");
        assert_eq!(k.parse("-r").unwrap().to_string(), "-1*r");
        match k.parse("1+*r") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(k.parse("1/0").is_err());
        assert!(k.parse("").is_err());
        assert_eq!(
            FieldSpec::RATIONALS.parse("r").unwrap(),
            FieldSpec::RATIONALS.int(1)
        );
    }

    #[test]
    fn float_value_survives_cancellation() {
        // 7 - 4√3 ≈ 0.0718
        let x = q3().from_ints(97, -56);
        let expect = 97.0 - 56.0 * 3f64.sqrt();
        assert!((x.to_f64() - expect).abs() < 1e-12);
        assert!(x.to_f64() > 0.0);
    }
}
