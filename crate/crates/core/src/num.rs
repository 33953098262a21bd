//! Multiprecision complex numbers and the extended complex plane.
//!
//! Every value carries its own working precision (in bits). Binary
//! operations produce a result at the larger of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Default working precision for library operations (IEEE double equivalent).
pub const DEFAULT_PRECISION: u32 = 53;
/// Default working precision for the universal-series constructions.
pub const CONSTRUCTOR_PRECISION: u32 = 256;

/// `2^(-bits)` at the given precision.
pub fn pow2_neg(prec: u32, bits: u32) -> Float {
    let mut x = Float::with_val(prec, 1);
    x >>= bits;
    x
}

/// Relative zero threshold `2^(-prec/2)` used for degree detection,
/// coprimality and Hankel singularity tests.
pub fn zero_threshold(prec: u32) -> Float {
    pow2_neg(prec, prec / 2)
}

/// Tolerance `2^(-(prec-10))` used for normalization and round-trip checks.
pub fn roundoff_tolerance(prec: u32) -> Float {
    pow2_neg(prec, prec.saturating_sub(10))
}

/// Full-precision decimal rendering of a float.
pub fn float_to_decimal(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, None)
}

/// Parse a decimal string at the given precision.
pub fn float_from_decimal(prec: u32, s: &str) -> Option<Float> {
    Float::parse(s.trim()).ok().map(|p| Float::with_val(prec, p))
}

fn max_prec(a: &Complex, b: &Complex) -> u32 {
    a.prec().max(b.prec())
}

/// A complex number with MPFR real and imaginary parts.
#[derive(Clone, PartialEq)]
pub struct Complex {
    re: Float,
    im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        Complex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn with_val(prec: u32, re: f64, im: f64) -> Self {
        Complex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn real(prec: u32, re: f64) -> Self {
        Self::with_val(prec, re, 0.0)
    }

    pub fn from_float(re: Float) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::real(prec, 1.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::with_val(prec, 0.0, 1.0)
    }

    /// `r * exp(i * theta)`.
    pub fn from_polar(r: &Float, theta: &Float) -> Self {
        let prec = r.prec().max(theta.prec());
        let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
        Complex {
            re: Float::with_val(prec, r * &c),
            im: Float::with_val(prec, r * &s),
        }
    }

    /// `exp(2 pi i * k / n)`.
    pub fn root_of_unity(prec: u32, k: usize, n: usize) -> Self {
        let pi = Float::with_val(prec, Constant::Pi);
        let theta = Float::with_val(prec, &pi * (2 * k) as u64) / n as u64;
        Self::from_polar(&Float::with_val(prec, 1), &theta)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let a = Float::with_val(prec, self.re.square_ref());
        let b = Float::with_val(prec, self.im.square_ref());
        a + b
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn recip(&self) -> Self {
        Complex::one(self.prec()) / self
    }

    pub fn scale(&self, s: &Float) -> Self {
        let prec = self.prec().max(s.prec());
        Complex {
            re: Float::with_val(prec, &self.re * s),
            im: Float::with_val(prec, &self.im * s),
        }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        Complex {
            re: Float::with_val(self.prec(), &self.re * s),
            im: Float::with_val(self.prec(), &self.im * s),
        }
    }

    pub fn div_float(&self, s: &Float) -> Self {
        let prec = self.prec().max(s.prec());
        Complex {
            re: Float::with_val(prec, &self.re / s),
            im: Float::with_val(prec, &self.im / s),
        }
    }

    pub fn powu(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Fused `self += a * b`.
    pub fn add_mul(&mut self, a: &Complex, b: &Complex) {
        let prod = a * b;
        *self += &prod;
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Exact comparison of stored values.
    pub fn exactly_equals(&self, other: &Complex) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e}{im:+e}i)")
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "{re}{im:+}i")
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let prec = max_prec(self, rhs);
        Complex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let prec = max_prec(self, rhs);
        Complex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let prec = max_prec(self, rhs);
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re -= Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        im += Float::with_val(prec, &self.im * &rhs.re);
        Complex { re, im }
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        let prec = max_prec(self, rhs);
        let den = rhs.norm_sqr();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re += Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.im * &rhs.re);
        im -= Float::with_val(prec, &self.re * &rhs.im);
        re /= &den;
        im /= &den;
        Complex { re, im }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<Complex> for Complex {
    fn add_assign(&mut self, rhs: Complex) {
        *self += &rhs;
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, rhs: &Complex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl SubAssign<Complex> for Complex {
    fn sub_assign(&mut self, rhs: Complex) {
        *self -= &rhs;
    }
}

impl MulAssign<&Complex> for Complex {
    fn mul_assign(&mut self, rhs: &Complex) {
        *self = &*self * rhs;
    }
}

/// Point of the extended complex plane `C ∪ {∞}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex),
    Infinity,
}

impl ExtendedComplex {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn finite(&self) -> Option<&Complex> {
        match self {
            ExtendedComplex::Finite(z) => Some(z),
            ExtendedComplex::Infinity => None,
        }
    }

    /// `1/z` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self, prec: u32) -> ExtendedComplex {
        match self {
            ExtendedComplex::Infinity => ExtendedComplex::Finite(Complex::zero(prec)),
            ExtendedComplex::Finite(z) if z.is_zero() => ExtendedComplex::Infinity,
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(z.recip()),
        }
    }
}

impl From<Complex> for ExtendedComplex {
    fn from(z: Complex) -> Self {
        ExtendedComplex::Finite(z)
    }
}

/// Serialized form of one real component: a JSON number, or a decimal string
/// when the working precision exceeds a double.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealRepr {
    Number(f64),
    Text(String),
}

impl RealRepr {
    pub fn from_float(x: &Float) -> Self {
        if x.prec() <= DEFAULT_PRECISION {
            RealRepr::Number(x.to_f64())
        } else {
            RealRepr::Text(float_to_decimal(x))
        }
    }

    pub fn to_float(&self, prec: u32) -> Result<Float, String> {
        match self {
            RealRepr::Number(v) => Ok(Float::with_val(prec, *v)),
            RealRepr::Text(s) => {
                float_from_decimal(prec, s).ok_or_else(|| format!("invalid decimal '{s}'"))
            }
        }
    }
}

/// `[re, im]` pair as it appears in JSON documents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexRepr(pub RealRepr, pub RealRepr);

impl ComplexRepr {
    pub fn from_complex(z: &Complex) -> Self {
        ComplexRepr(RealRepr::from_float(&z.re), RealRepr::from_float(&z.im))
    }

    pub fn to_complex(&self, prec: u32) -> Result<Complex, String> {
        let z = Complex {
            re: self.0.to_float(prec)?,
            im: self.1.to_float(prec)?,
        };
        if !z.is_finite() {
            return Err("non-finite complex value".into());
        }
        Ok(z)
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ComplexRepr::from_complex(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Complex {
    /// Standalone values are read at double precision unless given as
    /// decimal strings, which are read at the precision their digits need.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(deserializer)?;
        let digits = |r: &RealRepr| match r {
            RealRepr::Number(_) => 0,
            RealRepr::Text(s) => s.chars().filter(|c| c.is_ascii_digit()).count(),
        };
        let needed = digits(&repr.0).max(digits(&repr.1)) as f64 * std::f64::consts::LOG2_10;
        let prec = (needed.ceil() as u32).max(DEFAULT_PRECISION);
        repr.to_complex(prec).map_err(de::Error::custom)
    }
}

/// Serde helper for `Float` fields: a number at double precision, a decimal
/// string above.
pub fn serialize_float<S: Serializer>(x: &Float, serializer: S) -> Result<S::Ok, S::Error> {
    RealRepr::from_float(x).serialize(serializer)
}

/// Largest of a set of floats; `None` when empty.
pub fn max_float<'a>(values: impl IntoIterator<Item = &'a Float>) -> Option<Float> {
    let mut best: Option<&Float> = None;
    for v in values {
        match best {
            Some(b) if v.partial_cmp(b) != Some(Ordering::Greater) => {}
            _ => best = Some(v),
        }
    }
    best.cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_hand_values() {
        let a = Complex::with_val(53, 1.0, 2.0);
        let b = Complex::with_val(53, 3.0, -1.0);
        assert_eq!((&a * &b).to_f64(), (5.0, 5.0));
        assert_eq!((&a + &b).to_f64(), (4.0, 1.0));
        let q = &(&a * &b) / &b;
        let (re, im) = q.to_f64();
        assert!((re - 1.0).abs() < 1e-15 && (im - 2.0).abs() < 1e-15);
    }

    #[test]
    fn precision_propagates_to_the_larger_operand() {
        let a = Complex::one(53);
        let b = Complex::one(256);
        assert_eq!((&a + &b).prec(), 256);
    }

    #[test]
    fn powu_and_roots_of_unity() {
        let w = Complex::root_of_unity(256, 1, 8);
        let w8 = w.powu(8);
        let err = (&w8 - &Complex::one(256)).abs();
        assert!(err < pow2_neg(256, 240));
    }

    #[test]
    fn decimal_round_trip_at_high_precision() {
        let x = Float::with_val(256, Constant::Pi);
        let s = float_to_decimal(&x);
        let y = float_from_decimal(256, &s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn json_uses_numbers_at_double_precision_and_strings_above() {
        let z = Complex::with_val(53, 0.5, -2.0);
        assert_eq!(serde_json::to_string(&z).unwrap(), "[0.5,-2.0]");
        let w = Complex::with_val(256, 0.5, -2.0);
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.starts_with("[\""));
        let back: Complex = serde_json::from_str("[0.25, 1]").unwrap();
        assert_eq!(back.to_f64(), (0.25, 1.0));
    }

    #[test]
    fn extended_reciprocal_conventions() {
        let zero = ExtendedComplex::Finite(Complex::zero(53));
        assert!(zero.recip(53).is_infinite());
        assert_eq!(
            ExtendedComplex::Infinity.recip(53),
            ExtendedComplex::Finite(Complex::zero(53))
        );
    }
}
