//! Certified interval enclosures and closed-form real expressions.
//!
//! Some constructions (the max-area chain) need square roots that leave the
//! exact field. Those values are kept as [`RealExpr`] trees over exact
//! [`Scalar`] leaves and evaluated on demand into [`CertifiedInterval`]s with
//! outward rounding onto a dyadic grid of `2^-precision_bits`.
//!
//! Equality of two such values is never inferred from overlap alone: callers
//! pass a symbolic identity flag, and without it an overlap is reported as
//! [`Comparison::Undecided`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{Rational, Scalar, Sign};

/// Environment variable overriding [`PrecisionPolicy::max_bits`].
pub const PRECISION_ENV: &str = "TRIAREA_PRECISION";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval division by an enclosure containing zero at {0} bits")]
    DivisionByZero(u32),
    #[error("square root of an enclosure reaching below zero at {0} bits")]
    NegativeSqrt(u32),
}

/// Closed interval `[lower, upper]` known to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedInterval {
    lower: Rational,
    upper: Rational,
    precision_bits: u32,
}

fn scale(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn round_down(q: &Rational, bits: u32) -> Rational {
    let s = scale(bits);
    Rational::new((q * Rational::from_integer(s.clone())).floor().to_integer(), s)
}

fn round_up(q: &Rational, bits: u32) -> Rational {
    let s = scale(bits);
    Rational::new((q * Rational::from_integer(s.clone())).ceil().to_integer(), s)
}

impl CertifiedInterval {
    /// Outward-rounded enclosure of `[lo, hi]`.
    pub fn new(lo: &Rational, hi: &Rational, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        CertifiedInterval {
            lower: round_down(lo, precision_bits),
            upper: round_up(hi, precision_bits),
            precision_bits,
        }
    }

    pub fn point(q: &Rational, precision_bits: u32) -> Self {
        Self::new(q, q, precision_bits)
    }

    /// Enclosure of an exact field element.
    pub fn of_scalar(v: &Scalar, precision_bits: u32) -> Self {
        match v {
            Scalar::Rational(q) => Self::point(q, precision_bits),
            Scalar::Quad(q) => {
                let d = Rational::from_integer(BigInt::from(q.radicand().get()));
                let root = Self::point(&d, precision_bits + 8)
                    .sqrt()
                    .expect("radicand is positive");
                let s = Self::point(q.surd_part(), precision_bits + 8);
                let r = Self::point(q.rational_part(), precision_bits + 8);
                let v = r.add(&s.mul(&root));
                Self::new(&v.lower, &v.upper, precision_bits)
            }
        }
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower <= q && q <= &self.upper
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn overlaps(&self, other: &CertifiedInterval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Sign when the enclosure excludes zero (or is exactly the point zero).
    pub fn sign(&self) -> Option<Sign> {
        if self.lower.is_positive() {
            Some(Sign::Positive)
        } else if self.upper.is_negative() {
            Some(Sign::Negative)
        } else if self.lower.is_zero() && self.upper.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    /// Intersection with an earlier enclosure of the same value, so repeated
    /// refinement never widens.
    pub fn refine_with(&self, earlier: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval {
            lower: self.lower.clone().max(earlier.lower.clone()),
            upper: self.upper.clone().min(earlier.upper.clone()),
            precision_bits: self.precision_bits.max(earlier.precision_bits),
        }
    }

    fn bits_with(&self, other: &CertifiedInterval) -> u32 {
        self.precision_bits.min(other.precision_bits)
    }

    pub fn add(&self, other: &CertifiedInterval) -> CertifiedInterval {
        let bits = self.bits_with(other);
        Self::new(&(&self.lower + &other.lower), &(&self.upper + &other.upper), bits)
    }

    pub fn neg(&self) -> CertifiedInterval {
        CertifiedInterval {
            lower: -&self.upper,
            upper: -&self.lower,
            precision_bits: self.precision_bits,
        }
    }

    pub fn sub(&self, other: &CertifiedInterval) -> CertifiedInterval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CertifiedInterval) -> CertifiedInterval {
        let bits = self.bits_with(other);
        let products = [
            &self.lower * &other.lower,
            &self.lower * &other.upper,
            &self.upper * &other.lower,
            &self.upper * &other.upper,
        ];
        let lo = products.iter().min().unwrap();
        let hi = products.iter().max().unwrap();
        Self::new(lo, hi, bits)
    }

    pub fn recip(&self) -> Result<CertifiedInterval, IntervalError> {
        if self.contains_zero() {
            return Err(IntervalError::DivisionByZero(self.precision_bits));
        }
        Ok(Self::new(
            &self.upper.recip(),
            &self.lower.recip(),
            self.precision_bits,
        ))
    }

    pub fn div(&self, other: &CertifiedInterval) -> Result<CertifiedInterval, IntervalError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn sqrt(&self) -> Result<CertifiedInterval, IntervalError> {
        if self.lower.is_negative() {
            return Err(IntervalError::NegativeSqrt(self.precision_bits));
        }
        let bits = self.precision_bits;
        let s = scale(bits);
        let s2 = Rational::from_integer(&s * &s);
        let lo_n = (&self.lower * &s2).floor().to_integer();
        let hi_n = (&self.upper * &s2).ceil().to_integer();
        let lo_root = lo_n.sqrt();
        let mut hi_root = hi_n.sqrt();
        if &hi_root * &hi_root < hi_n {
            hi_root += 1;
        }
        Ok(CertifiedInterval {
            lower: Rational::new(lo_root, s.clone()),
            upper: Rational::new(hi_root, s),
            precision_bits: bits,
        })
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::ToPrimitive;
        write!(
            f,
            "[{:.12e}, {:.12e}]@{}",
            self.lower.to_f64().unwrap_or(f64::NAN),
            self.upper.to_f64().unwrap_or(f64::NAN),
            self.precision_bits
        )
    }
}

/// Working-precision schedule for certified comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 64,
            max_bits: 512,
        }
    }
}

impl PrecisionPolicy {
    /// Default schedule, with `max_bits` taken from `TRIAREA_PRECISION` when set.
    pub fn from_env() -> Self {
        let mut p = PrecisionPolicy::default();
        if let Some(bits) = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
        {
            p.max_bits = bits.max(16);
            p.initial_bits = p.initial_bits.min(p.max_bits);
        }
        p
    }

    /// Doubling sequence of working precisions, ending at `max_bits`.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut b = self.initial_bits.max(8);
        while b < self.max_bits {
            out.push(b);
            b *= 2;
        }
        out.push(self.max_bits);
        out
    }
}

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Undecided,
}

#[derive(Debug)]
enum Node {
    Exact(Scalar),
    Add(RealExpr, RealExpr),
    Sub(RealExpr, RealExpr),
    Mul(RealExpr, RealExpr),
    Div(RealExpr, RealExpr),
    Neg(RealExpr),
    Sqrt(RealExpr),
}

/// A real number given by a closed-form expression over exact scalars.
///
/// Exact subexpressions are folded eagerly, so a tree only grows once a
/// square root leaves the field.
#[derive(Clone, Debug)]
pub struct RealExpr(Arc<Node>);

impl RealExpr {
    pub fn exact(v: Scalar) -> Self {
        RealExpr(Arc::new(Node::Exact(v)))
    }

    pub fn zero() -> Self {
        Self::exact(Scalar::zero())
    }

    pub fn as_exact(&self) -> Option<&Scalar> {
        match &*self.0 {
            Node::Exact(v) => Some(v),
            _ => None,
        }
    }

    fn fold2(
        &self,
        other: &RealExpr,
        f: impl FnOnce(&Scalar, &Scalar) -> Option<Scalar>,
        node: impl FnOnce(RealExpr, RealExpr) -> Node,
    ) -> RealExpr {
        if let (Some(a), Some(b)) = (self.as_exact(), other.as_exact()) {
            if let Some(v) = f(a, b) {
                return RealExpr::exact(v);
            }
        }
        RealExpr(Arc::new(node(self.clone(), other.clone())))
    }

    pub fn add(&self, other: &RealExpr) -> RealExpr {
        if other.as_exact().is_some_and(Scalar::is_zero) {
            return self.clone();
        }
        if self.as_exact().is_some_and(Scalar::is_zero) {
            return other.clone();
        }
        self.fold2(other, |a, b| a.checked_add(b).ok(), Node::Add)
    }

    pub fn sub(&self, other: &RealExpr) -> RealExpr {
        if other.as_exact().is_some_and(Scalar::is_zero) {
            return self.clone();
        }
        self.fold2(other, |a, b| a.checked_sub(b).ok(), Node::Sub)
    }

    pub fn mul(&self, other: &RealExpr) -> RealExpr {
        if let Some(v) = other.as_exact() {
            if v.is_one() {
                return self.clone();
            }
        }
        self.fold2(other, |a, b| a.checked_mul(b).ok(), Node::Mul)
    }

    pub fn scale(&self, k: &Scalar) -> RealExpr {
        self.mul(&RealExpr::exact(k.clone()))
    }

    pub fn div(&self, other: &RealExpr) -> RealExpr {
        self.fold2(other, |a, b| a.checked_div(b).ok(), Node::Div)
    }

    pub fn neg(&self) -> RealExpr {
        match self.as_exact() {
            Some(v) => RealExpr::exact(-v),
            None => RealExpr(Arc::new(Node::Neg(self.clone()))),
        }
    }

    /// Square root; stays exact when the radicand is a square in its field.
    pub fn sqrt(&self) -> RealExpr {
        if let Some(root) = self.as_exact().and_then(Scalar::sqrt_exact) {
            return RealExpr::exact(root);
        }
        RealExpr(Arc::new(Node::Sqrt(self.clone())))
    }

    /// Enclosure at a fixed working precision.
    pub fn eval(&self, bits: u32) -> Result<CertifiedInterval, IntervalError> {
        let mut memo = HashMap::new();
        self.eval_memo(bits, &mut memo)
    }

    fn eval_memo(
        &self,
        bits: u32,
        memo: &mut HashMap<*const Node, CertifiedInterval>,
    ) -> Result<CertifiedInterval, IntervalError> {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let v = match &*self.0 {
            Node::Exact(s) => CertifiedInterval::of_scalar(s, bits),
            Node::Add(a, b) => a.eval_memo(bits, memo)?.add(&b.eval_memo(bits, memo)?),
            Node::Sub(a, b) => a.eval_memo(bits, memo)?.sub(&b.eval_memo(bits, memo)?),
            Node::Mul(a, b) => a.eval_memo(bits, memo)?.mul(&b.eval_memo(bits, memo)?),
            Node::Div(a, b) => a.eval_memo(bits, memo)?.div(&b.eval_memo(bits, memo)?)?,
            Node::Neg(a) => a.eval_memo(bits, memo)?.neg(),
            Node::Sqrt(a) => a.eval_memo(bits, memo)?.sqrt()?,
        };
        memo.insert(key, v.clone());
        Ok(v)
    }

    /// Successively tighter enclosures along the policy schedule, each
    /// intersected with the previous one.
    pub fn refinements(&self, policy: &PrecisionPolicy) -> Vec<CertifiedInterval> {
        let mut out: Vec<CertifiedInterval> = Vec::new();
        for bits in policy.schedule() {
            if let Ok(v) = self.eval(bits) {
                let v = match out.last() {
                    Some(prev) => v.refine_with(prev),
                    None => v,
                };
                out.push(v);
            }
        }
        out
    }

    /// Certified sign, or `None` when zero cannot be excluded at `max_bits`.
    pub fn sign(&self, policy: &PrecisionPolicy) -> Option<Sign> {
        if let Some(v) = self.as_exact() {
            return Some(v.sign());
        }
        for bits in policy.schedule() {
            if let Ok(Some(s)) = self.eval(bits).map(|v| v.sign()) {
                if s != Sign::Zero {
                    return Some(s);
                }
            }
        }
        None
    }

    /// Compare two values. `identity` states that a symbolic argument proves
    /// them equal; equality is reported only when that holds and the
    /// enclosures still overlap at maximum precision.
    pub fn compare(&self, other: &RealExpr, identity: bool, policy: &PrecisionPolicy) -> Comparison {
        if let (Some(a), Some(b)) = (self.as_exact(), other.as_exact()) {
            return match a.cmp(b) {
                std::cmp::Ordering::Less => Comparison::Less,
                std::cmp::Ordering::Equal => Comparison::Equal,
                std::cmp::Ordering::Greater => Comparison::Greater,
            };
        }
        let diff = self.sub(other);
        let mut overlap_at_max = false;
        for bits in policy.schedule() {
            match diff.eval(bits) {
                Ok(v) => match v.sign() {
                    Some(Sign::Negative) => return Comparison::Less,
                    Some(Sign::Positive) => return Comparison::Greater,
                    _ => overlap_at_max = bits == policy.max_bits,
                },
                Err(_) => overlap_at_max = false,
            }
        }
        if identity && overlap_at_max {
            Comparison::Equal
        } else {
            Comparison::Undecided
        }
    }

    /// Midpoint of the enclosure at `bits`, for reporting.
    pub fn approx(&self, bits: u32) -> Option<Rational> {
        self.eval(bits).ok().map(|v| v.midpoint())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self.as_exact() {
            Some(v) => v.to_f64(),
            None => self
                .approx(96)
                .and_then(|q| q.to_f64())
                .unwrap_or(f64::NAN),
        }
    }
}

impl From<Scalar> for RealExpr {
    fn from(v: Scalar) -> Self {
        RealExpr::exact(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn sqrt_two_enclosure() {
        let two = RealExpr::exact(q("2"));
        let r = two.sqrt();
        assert!(r.as_exact().is_none());
        let v = r.eval(64).unwrap();
        let sq_lo = v.lower() * v.lower();
        let sq_hi = v.upper() * v.upper();
        let two_q = Rational::from_integer(2.into());
        assert!(sq_lo <= two_q && two_q <= sq_hi);
        assert!(v.width() <= Rational::new(1.into(), BigInt::one() << 62));
    }

    #[test]
    fn refinement_never_widens() {
        let e = RealExpr::exact(q("3")).sqrt().add(&RealExpr::exact(q("1/3")));
        let steps = e.refinements(&PrecisionPolicy::default());
        for w in steps.windows(2) {
            assert!(w[1].width() <= w[0].width());
            assert!(w[1].lower() >= w[0].lower() && w[1].upper() <= w[0].upper());
        }
    }

    #[test]
    fn quad_scalar_enclosure_matches_sign() {
        let v = q("9/4-1*sqrt(5)");
        let iv = CertifiedInterval::of_scalar(&v, 80);
        assert_eq!(iv.sign(), Some(Sign::Positive));
    }

    #[test]
    fn comparison_requires_identity_for_equality() {
        let policy = PrecisionPolicy::default();
        let a = RealExpr::exact(q("2")).sqrt().mul(&RealExpr::exact(q("3")).sqrt());
        let b = RealExpr::exact(q("6")).sqrt();
        assert_eq!(a.compare(&b, false, &policy), Comparison::Undecided);
        assert_eq!(a.compare(&b, true, &policy), Comparison::Equal);
        let c = RealExpr::exact(q("5")).sqrt();
        assert_eq!(c.compare(&b, false, &policy), Comparison::Less);
        // a false identity claim cannot force equality of separated values
        assert_eq!(c.compare(&b, true, &policy), Comparison::Less);
    }

    #[test]
    fn exact_folding() {
        let e = RealExpr::exact(q("1/2")).add(&RealExpr::exact(q("1/3")));
        assert_eq!(e.as_exact(), Some(&q("5/6")));
        let s = RealExpr::exact(q("6-2*sqrt(5)")).sqrt();
        assert_eq!(s.as_exact(), Some(&q("-1+1*sqrt(5)")));
    }

    #[test]
    fn division_by_straddling_interval_fails() {
        let tiny = RealExpr::exact(q("2")).sqrt().sub(&RealExpr::exact(q("2")).sqrt());
        let one = RealExpr::exact(q("1"));
        assert!(matches!(one.div(&tiny).eval(64), Err(IntervalError::DivisionByZero(_))));
    }
}
