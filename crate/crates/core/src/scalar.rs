//! Arithmetic used by the exact solver and the recursions.
//!
//! Values are either exact rationals ([`Exact`]) or `f64`. The solver is
//! generic over [`Scalar`]; the only behavioural difference is tie detection,
//! which is exact equality for rationals and a relative tolerance for floats.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number.
pub type Exact = BigRational;

/// Relative tolerance under which two floating-point values count as tied.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-12;

pub trait Scalar:
    Clone + Debug + PartialOrd + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_exact(value: &Exact) -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;
    /// For `Exact`, the shortest decimal that round-trips to `x` is used, so
    /// `0.25` becomes exactly 1/4.
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether two values are equal for the purpose of argmax/argmin sets.
    fn ties(&self, other: &Self) -> bool;
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_exact(value: &Exact) -> Self {
        exact_to_f64(value)
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ties(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= FLOAT_TIE_TOLERANCE * scale
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_exact(value: &Exact) -> Self {
        value.clone()
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }
    fn from_f64(x: f64) -> Self {
        parse_exact(&format!("{x}")).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        exact_to_f64(self)
    }
    fn ties(&self, other: &Self) -> bool {
        self == other
    }
    fn is_exact() -> bool {
        true
    }
}

pub fn exact_to_f64(value: &Exact) -> f64 {
    ToPrimitive::to_f64(value).unwrap_or_else(|| {
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn exact_int(v: i64) -> Exact {
    BigRational::from_integer(BigInt::from(v))
}

pub fn exact_ratio(numer: i64, denom: i64) -> Exact {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"a/b"`, `"a"` or a decimal such as `"0.25"` into an exact rational.
pub fn parse_exact(text: &str) -> Option<Exact> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Some(if negative { -r } else { r });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}
