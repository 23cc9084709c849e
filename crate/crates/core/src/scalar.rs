//! Exact field elements: rationals and a single quadratic extension Q(√d).
//!
//! A [`Scalar`] is either a plain [`Rational`] or an element `r + s·√d` of a
//! quadratic field. Values whose surd part vanishes always collapse back to
//! the rational variant, so structural equality and hashing agree with
//! numeric equality. Mixing two different radicands is an error; callers that
//! cannot fail (the operator impls) panic instead, which mirrors how
//! `num_rational` treats division by zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched radicands: sqrt({0}) and sqrt({1})")]
    MismatchedRadicands(u32, u32),
    #[error("radicand {0} is not a square-free integer greater than 1")]
    InvalidRadicand(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// A square-free integer `d > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u32);

impl Radicand {
    pub fn new(d: u64) -> Result<Self, ScalarError> {
        if d < 2 || d > u64::from(u32::MAX) {
            return Err(ScalarError::InvalidRadicand(d));
        }
        let mut p = 2u64;
        while p * p <= d {
            if d % (p * p) == 0 {
                return Err(ScalarError::InvalidRadicand(d));
            }
            p += 1;
        }
        Ok(Radicand(d as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn as_rational(self) -> Rational {
        Rational::from_integer(BigInt::from(self.0))
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field an arrangement lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Field {
    #[default]
    Rational,
    Quadratic(Radicand),
}

impl Field {
    pub fn radicand(self) -> Option<Radicand> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(d),
        }
    }

    /// Smallest field containing both, or an error for two distinct radicands.
    pub fn join(self, other: Field) -> Result<Field, ScalarError> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Ok(self),
            (Field::Quadratic(a), Field::Quadratic(b)) => {
                Err(ScalarError::MismatchedRadicands(a.0, b.0))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

impl FromStr for Field {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "Q" {
            return Ok(Field::Rational);
        }
        let inner = compact
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
            .ok_or_else(|| ScalarError::Parse(s.to_string()))?;
        let d: u64 = inner.parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
        Ok(Field::Quadratic(Radicand::new(d)?))
    }
}

/// `rational + surd·√radicand`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    rational: Rational,
    surd: Rational,
    radicand: Radicand,
}

impl QuadExt {
    pub fn new(rational: Rational, surd: Rational, radicand: Radicand) -> Self {
        QuadExt {
            rational,
            surd,
            radicand,
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn surd_part(&self) -> &Rational {
        &self.surd
    }

    pub fn radicand(&self) -> Radicand {
        self.radicand
    }

    /// Exact sign of `r + s√d`, decided by comparing `r²` with `d·s²`.
    pub fn sign(&self) -> Sign {
        let sr = Sign::of_rational(&self.rational);
        let ss = Sign::of_rational(&self.surd);
        if sr == ss || ss == Sign::Zero {
            return sr;
        }
        if sr == Sign::Zero {
            return ss;
        }
        let r2 = &self.rational * &self.rational;
        let ds2 = &self.surd * &self.surd * self.radicand.as_rational();
        match r2.cmp(&ds2) {
            Ordering::Greater => sr,
            Ordering::Less => ss,
            // r² = d·s² is impossible for square-free d and s ≠ 0
            Ordering::Equal => unreachable!("r^2 = d s^2 with square-free d"),
        }
    }

    /// Field norm `r² − d·s²`.
    pub fn norm(&self) -> Rational {
        &self.rational * &self.rational - &self.surd * &self.surd * self.radicand.as_rational()
    }
}

/// Exact sign of a field element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of_i128(v: i128) -> Sign {
        match v.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match self.as_i8() * other.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

/// Exact element of Q or of a quadratic extension Q(√d).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    /// Invariant: the surd part is nonzero.
    Quad(QuadExt),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Scalar::Rational(Rational::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `rational + surd·√d`, collapsing to a rational when `surd = 0`.
    pub fn quad(rational: Rational, surd: Rational, radicand: Radicand) -> Self {
        if surd.is_zero() {
            Scalar::Rational(rational)
        } else {
            Scalar::Quad(QuadExt::new(rational, surd, radicand))
        }
    }

    /// `√d` itself.
    pub fn sqrt_of(radicand: Radicand) -> Self {
        Scalar::quad(Rational::zero(), Rational::one(), radicand)
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Quad(q) => Field::Quadratic(q.radicand),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Quad(_) => None,
        }
    }

    /// Components `(rational, surd)`; the surd part is zero for rationals.
    pub fn parts(&self) -> (Rational, Rational) {
        match self {
            Scalar::Rational(q) => (q.clone(), Rational::zero()),
            Scalar::Quad(q) => (q.rational.clone(), q.surd.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_one())
    }

    pub fn sign(&self) -> Sign {
        match self {
            Scalar::Rational(q) => Sign::of_rational(q),
            Scalar::Quad(q) => q.sign(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn common_radicand(&self, other: &Scalar) -> Result<Option<Radicand>, ScalarError> {
        Ok(self.field().join(other.field())?.radicand())
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            _ => {
                let d = self.common_radicand(other)?.expect("quadratic operand");
                let (ar, asu) = self.parts();
                let (br, bsu) = other.parts();
                Ok(Scalar::quad(ar + br, asu + bsu, d))
            }
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Rational(a), Scalar::Quad(q)) | (Scalar::Quad(q), Scalar::Rational(a)) => {
                Ok(Scalar::quad(a * &q.rational, a * &q.surd, q.radicand))
            }
            (Scalar::Quad(p), Scalar::Quad(q)) => {
                if p.radicand != q.radicand {
                    return Err(ScalarError::MismatchedRadicands(p.radicand.0, q.radicand.0));
                }
                let d = p.radicand.as_rational();
                let r = &p.rational * &q.rational + &p.surd * &q.surd * d;
                let s = &p.rational * &q.surd + &p.surd * &q.rational;
                Ok(Scalar::quad(r, s, p.radicand))
            }
        }
    }

    pub fn checked_recip(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(q) if q.is_zero() => Err(ScalarError::DivisionByZero),
            Scalar::Rational(q) => Ok(Scalar::Rational(q.recip())),
            Scalar::Quad(q) => {
                let n = q.norm();
                Ok(Scalar::quad(&q.rational / &n, -&q.surd / &n, q.radicand))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.common_radicand(other)?;
        self.checked_mul(&other.checked_recip()?)
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    /// Cheap floating approximation, for diagnostics and numeric seeding only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Quad(q) => {
                q.rational.to_f64().unwrap_or(f64::NAN)
                    + q.surd.to_f64().unwrap_or(f64::NAN) * f64::from(q.radicand.0).sqrt()
            }
        }
    }

    /// Largest integer `m` with `m ≤ self`, decided exactly.
    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rational(q) => q.floor().to_integer(),
            Scalar::Quad(_) => {
                let guess = self.to_f64().floor();
                let mut m = BigInt::from(guess as i64);
                while (Scalar::from_bigint(m.clone())).cmp(self) == Ordering::Greater {
                    m -= 1;
                }
                while (Scalar::from_bigint(&m + 1)).cmp(self) != Ordering::Greater {
                    m += 1;
                }
                m
            }
        }
    }

    /// `x` such that `x² = self`, when it exists in the same field.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(q) => rational_sqrt(q).map(Scalar::Rational),
            Scalar::Quad(q) => {
                // (a + b√d)² = a² + d b² + 2ab√d; solve via the norm.
                let n = rational_sqrt(&q.norm())?;
                let two = Rational::from_integer(BigInt::from(2));
                for n_signed in [n.clone(), -n] {
                    let a2 = (&q.rational + &n_signed) / &two;
                    if let Some(a) = rational_sqrt(&a2) {
                        if a.is_zero() {
                            continue;
                        }
                        let b = &q.surd / (&two * &a);
                        let cand = Scalar::quad(a, b, q.radicand);
                        if cand.square() == *self {
                            return Some(if cand.is_negative() { -cand } else { cand });
                        }
                    }
                }
                None
            }
        }
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &n * &n == *q.numer() && &d * &d == *q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl Ord for Scalar {
    /// Exact comparison. Panics when the operands carry different radicands.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            _ => match (self - other).sign() {
                Sign::Negative => Ordering::Less,
                Sign::Zero => Ordering::Equal,
                Sign::Positive => Ordering::Greater,
            },
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Quad(q) => Scalar::Quad(QuadExt::new(-&q.rational, -&q.surd, q.radicand)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("scalar {}: {e}", stringify!($method)),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => fmt_rational(q, f),
            Scalar::Quad(q) => {
                fmt_rational(&q.rational, f)?;
                if q.surd.is_negative() {
                    write!(f, "-")?;
                } else {
                    write!(f, "+")?;
                }
                fmt_rational(&q.surd.abs(), f)?;
                write!(f, "*sqrt({})", q.radicand)
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str, signed: bool| {
        let body = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Accepts `p`, `p/q`, `p/q+r/s*sqrt(d)`, `p/q-r/s*sqrt(d)` and
    /// `r/s*sqrt(d)`; all whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let Some(idx) = compact.find("*sqrt(") else {
            return parse_rational(&compact).map(Scalar::Rational).ok_or_else(err);
        };
        let tail = &compact[idx + "*sqrt(".len()..];
        let d_str = tail.strip_suffix(')').ok_or_else(err)?;
        let d: u64 = d_str.parse().map_err(|_| err())?;
        let radicand = Radicand::new(d)?;
        let head = &compact[..idx];
        let bytes = head.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1].is_ascii_digit());
        let (rat, coef) = match split {
            Some(i) => (parse_rational(&head[..i]).ok_or_else(err)?, &head[i..]),
            None => (Rational::zero(), head),
        };
        let coef = coef.strip_prefix('+').unwrap_or(coef);
        let coef = match coef {
            "" => Rational::one(),
            "-" => -Rational::one(),
            c => parse_rational(c).ok_or_else(err)?,
        };
        Ok(Scalar::quad(rat, coef, radicand))
    }
}

/// Least common multiple of the denominators of a set of rationals.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    fn d5() -> Radicand {
        Radicand::new(5).unwrap()
    }

    #[test]
    fn rational_arith() {
        assert_eq!(s("1/2") + s("1/3"), s("5/6"));
        assert_eq!(s("3/6"), s("1/2"));
        assert_eq!(s("3/6").to_string(), "1/2");
        assert_eq!(s("4/2").to_string(), "2");
    }

    #[test]
    fn conjugate_product_collapses() {
        let a = s("1+1*sqrt(5)");
        let b = s("1-1*sqrt(5)");
        let p = &a * &b;
        assert_eq!(p, s("-4"));
        assert!(matches!(p, Scalar::Rational(_)));
    }

    #[test]
    fn signs() {
        assert_eq!(s("0/1").sign(), Sign::Zero);
        assert_eq!(s("-1+1*sqrt(5)").sign(), Sign::Positive);
        assert_eq!(s("9/4-1*sqrt(5)").sign(), Sign::Positive);
        assert_eq!(s("11/5-1*sqrt(5)").sign(), Sign::Negative);
    }

    #[test]
    fn division_errors() {
        assert_eq!(s("1").checked_div(&s("0")), Err(ScalarError::DivisionByZero));
        let r7 = Scalar::sqrt_of(Radicand::new(7).unwrap());
        let r5 = Scalar::sqrt_of(d5());
        assert_eq!(r5.checked_add(&r7), Err(ScalarError::MismatchedRadicands(5, 7)));
        // a rational operand lives in every field
        assert!(r5.checked_add(&s("1/2")).is_ok());
    }

    #[test]
    fn quad_inverse() {
        let a = s("2/3+5/7*sqrt(5)");
        assert_eq!(&a * &a.checked_recip().unwrap(), Scalar::one());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(s(" 1 / 2 + 3/4 * sqrt( 5 ) "), s("1/2+3/4*sqrt(5)"));
        assert_eq!(s("-3/4*sqrt(5)"), Scalar::quad(Rational::zero(), Rational::new((-3).into(), 4.into()), d5()));
        assert_eq!(s("1/2+-3/4*sqrt(5)"), s("1/2-3/4*sqrt(5)"));
        assert_eq!(s("1/2+0*sqrt(5)"), s("1/2"));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("1/2*sqrt(4)".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_header() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("Q(sqrt 5)".parse::<Field>().unwrap(), Field::Quadratic(d5()));
        assert_eq!(Field::Quadratic(d5()).to_string(), "Q(sqrt 5)");
        assert!("Q(sqrt 8)".parse::<Field>().is_err());
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(s("9/4").sqrt_exact(), Some(s("3/2")));
        assert_eq!(s("2").sqrt_exact(), None);
        let a = s("3/2+1/2*sqrt(5)");
        assert_eq!(a.square().sqrt_exact(), Some(a));
        assert_eq!(s("6-2*sqrt(5)").sqrt_exact(), Some(s("-1+1*sqrt(5)")));
    }

    #[test]
    fn floor_of_quad() {
        assert_eq!(s("1*sqrt(5)").floor(), BigInt::from(2));
        assert_eq!(s("-1*sqrt(5)").floor(), BigInt::from(-3));
        assert_eq!(s("-7/2").floor(), BigInt::from(-4));
    }
}
