//! Truncated power series, polynomials and rational functions about a center.

use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hadamard, Matrix};
use crate::num::{pow2_neg, zero_threshold, Complex, ComplexRepr, ExtendedComplex};

/// Something that can be evaluated on the extended plane.
pub trait Evaluable: Sync {
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex;
}

/// Evaluable with derivatives of every order.
pub trait Differentiable: Evaluable {
    fn eval_derivative(&self, z: &Complex, l: usize) -> ExtendedComplex;
}

/// Source of Taylor coefficients about arbitrary centers.
pub trait TaylorSource: Sync {
    fn taylor(&self, center: &Complex, order: usize) -> Result<PowerSeries>;
}

/// Evaluable built from a closure.
pub struct FnEval<F>(pub F);

impl<F> Evaluable for FnEval<F>
where
    F: Fn(&Complex) -> ExtendedComplex + Sync,
{
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex {
        (self.0)(z)
    }
}

impl Evaluable for ExtendedComplex {
    fn eval_ext(&self, _z: &Complex) -> ExtendedComplex {
        self.clone()
    }
}

impl<T: Evaluable + ?Sized> Evaluable for &T {
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex {
        (**self).eval_ext(z)
    }
}

fn common_prec<'a>(center: &Complex, coeffs: impl IntoIterator<Item = &'a Complex>) -> u32 {
    coeffs
        .into_iter()
        .map(|c| c.prec())
        .fold(center.prec(), u32::max)
}

fn horner(coeffs: &[Complex], center: &Complex, z: &Complex, prec: u32) -> Complex {
    let w = z - center;
    let mut acc = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &acc * &w;
        acc += c;
    }
    acc
}

fn max_abs(coeffs: &[Complex], prec: u32) -> Float {
    coeffs
        .iter()
        .map(|c| c.abs())
        .fold(Float::new(prec), |a, b| a.max(&b))
}

/// Taylor shift of monomial coefficients from `from` to `to`.
fn shift_coeffs(coeffs: &[Complex], from: &Complex, to: &Complex, prec: u32) -> Vec<Complex> {
    let s = to - from;
    let mut b: Vec<Complex> = coeffs.to_vec();
    let d = b.len();
    if s.is_zero() {
        return b;
    }
    for i in 0..d.saturating_sub(1) {
        for j in (i..d - 1).rev() {
            let t = &s * &b[j + 1];
            b[j] += &t;
        }
    }
    for c in b.iter_mut() {
        if c.prec() != prec {
            *c = c.with_prec(prec);
        }
    }
    b
}

/// Coefficients of `num / den` as a power series through `order`.
///
/// Requires `den[0] != 0`.
pub fn series_div(num: &[Complex], den: &[Complex], order: usize, prec: u32) -> Vec<Complex> {
    let inv0 = den[0].recip();
    let mut out: Vec<Complex> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = num.get(k).cloned().unwrap_or_else(|| Complex::zero(prec));
        for i in 1..=k.min(den.len().saturating_sub(1)) {
            let t = &den[i] * &out[k - i];
            acc -= &t;
        }
        out.push(&acc * &inv0);
    }
    out
}

/// Polynomial `Σ a_k (z − c)^k` in the monomial basis about `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    center: Complex,
    coeffs: Vec<Complex>,
    prec: u32,
    zero_bits: u32,
}

impl Polynomial {
    pub fn new(center: Complex, mut coeffs: Vec<Complex>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex::zero(center.prec()));
        }
        let prec = common_prec(&center, &coeffs);
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.prec() == prec { c } else { c.with_prec(prec) })
            .collect();
        Polynomial {
            center: center.with_prec(prec),
            coeffs,
            prec,
            zero_bits: prec / 2,
        }
    }

    /// Polynomial about 0 with double coefficients `(re, im)`.
    pub fn from_f64(prec: u32, coeffs: &[(f64, f64)]) -> Self {
        Polynomial::new(
            Complex::zero(prec),
            coeffs.iter().map(|&(re, im)| Complex::with_val(prec, re, im)).collect(),
        )
    }

    pub fn zero(prec: u32, center: &Complex) -> Self {
        Polynomial::new(center.with_prec(prec), vec![Complex::zero(prec)])
    }

    pub fn constant(value: Complex, center: &Complex) -> Self {
        Polynomial::new(center.clone(), vec![value])
    }

    /// `coef · (z − c)^k`.
    pub fn monomial(center: &Complex, k: usize, coef: Complex) -> Self {
        let prec = coef.prec().max(center.prec());
        let mut coeffs = vec![Complex::zero(prec); k + 1];
        coeffs[k] = coef;
        Polynomial::new(center.clone(), coeffs)
    }

    /// Override the relative zero threshold `2^(-bits)` used by `degree`.
    pub fn with_zero_threshold_bits(mut self, bits: u32) -> Self {
        self.zero_bits = bits;
        self
    }

    pub fn zero_threshold_bits(&self) -> u32 {
        self.zero_bits
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Polynomial::new(
            self.center.with_prec(prec),
            self.coeffs.iter().map(|c| c.with_prec(prec)).collect(),
        )
        .with_zero_threshold_bits(self.zero_bits.min(prec / 2).max(1))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn center(&self) -> &Complex {
        &self.center
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Coefficient of `(z − c)^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Complex::zero(self.prec))
    }

    /// Index of the last coefficient whose magnitude exceeds the relative
    /// zero threshold; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let max = max_abs(&self.coeffs, self.prec);
        if max.is_zero() {
            return None;
        }
        let thr = max * pow2_neg(self.prec, self.zero_bits);
        self.coeffs.iter().rposition(|c| c.abs() > thr)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Complex::is_zero)
    }

    /// Drop stored coefficients above `degree()`.
    pub fn trimmed(&self) -> Self {
        let mut p = self.clone();
        p.coeffs.truncate(self.degree_or_zero() + 1);
        p
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        horner(&self.coeffs, &self.center, z, self.prec)
    }

    /// Same polynomial expanded about `to`.
    pub fn recenter(&self, to: &Complex) -> Self {
        let to = to.with_prec(self.prec);
        Polynomial {
            coeffs: shift_coeffs(&self.coeffs, &self.center, &to, self.prec),
            center: to,
            prec: self.prec,
            zero_bits: self.zero_bits,
        }
    }

    pub fn derivative(&self, l: usize) -> Self {
        if l >= self.coeffs.len() {
            return Polynomial::zero(self.prec, &self.center).with_zero_threshold_bits(self.zero_bits);
        }
        let coeffs = (l..self.coeffs.len())
            .map(|k| {
                let falling: u64 = ((k - l + 1)..=k).map(|i| i as u64).product();
                self.coeffs[k].scale(&Float::with_val(self.prec, falling))
            })
            .collect();
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![Complex::zero(self.prec)];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div_float(&Float::with_val(self.prec, k + 1)));
        }
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }

    pub fn scale(&self, s: &Complex) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }

    /// Multiply by `(z − c)^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(self.prec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }

    /// Coefficients through `order` as a power series (exact zero padding).
    pub fn to_series(&self, order: usize) -> PowerSeries {
        let coeffs = (0..=order).map(|k| self.coeff(k)).collect();
        PowerSeries::new(self.center.clone(), coeffs).expect("polynomial coefficients are finite")
    }

    fn aligned(&self, other: &Polynomial) -> Polynomial {
        if other.center.exactly_equals(&self.center) {
            other.clone()
        } else {
            other.with_prec(self.prec.max(other.prec)).recenter(&self.center)
        }
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let rhs = self.aligned(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let rhs = self.aligned(rhs);
        let prec = self.prec.max(rhs.prec);
        let mut coeffs = vec![Complex::zero(prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j].add_mul(a, b);
            }
        }
        Polynomial::new(self.center.clone(), coeffs).with_zero_threshold_bits(self.zero_bits)
    }
}

impl Evaluable for Polynomial {
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex {
        ExtendedComplex::Finite(self.eval(z))
    }
}

impl Differentiable for Polynomial {
    fn eval_derivative(&self, z: &Complex, l: usize) -> ExtendedComplex {
        ExtendedComplex::Finite(self.derivative(l).eval(z))
    }
}

impl TaylorSource for Polynomial {
    fn taylor(&self, center: &Complex, order: usize) -> Result<PowerSeries> {
        Ok(self.recenter(center).to_series(order))
    }
}

/// Truncated formal power series `Σ_{k ≤ M} a_k (z − ζ)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    center: Complex,
    coeffs: Vec<Complex>,
    prec: u32,
}

impl PowerSeries {
    pub fn new(center: Complex, coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("power series needs at least one coefficient".into()));
        }
        if !center.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InfiniteValue);
        }
        let prec = common_prec(&center, &coeffs);
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.prec() == prec { c } else { c.with_prec(prec) })
            .collect();
        Ok(PowerSeries {
            center: center.with_prec(prec),
            coeffs,
            prec,
        })
    }

    pub fn from_f64(prec: u32, coeffs: &[(f64, f64)]) -> Result<Self> {
        PowerSeries::new(
            Complex::zero(prec),
            coeffs.iter().map(|&(re, im)| Complex::with_val(prec, re, im)).collect(),
        )
    }

    pub fn from_real(prec: u32, coeffs: &[f64]) -> Result<Self> {
        PowerSeries::new(
            Complex::zero(prec),
            coeffs.iter().map(|&re| Complex::real(prec, re)).collect(),
        )
    }

    /// Taylor coefficients `1/k!` of `exp` about 0.
    pub fn exp(prec: u32, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = Float::with_val(prec, 1);
        for k in 0..=order {
            if k > 0 {
                c /= k as u32;
            }
            coeffs.push(Complex::from_float(c.clone()));
        }
        PowerSeries::new(Complex::zero(prec), coeffs).expect("finite")
    }

    /// Geometric series `Σ z^k` about 0.
    pub fn geometric(prec: u32, order: usize) -> Self {
        PowerSeries::new(Complex::zero(prec), vec![Complex::one(prec); order + 1]).expect("finite")
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn center(&self) -> &Complex {
        &self.center
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Result<&Complex> {
        self.coeffs.get(k).ok_or(Error::TruncationExceeded {
            requested: k,
            available: self.order(),
        })
    }

    /// `a_k`, with `a_k = 0` for negative `k`.
    pub fn coeff_signed(&self, k: i64) -> Result<Complex> {
        if k < 0 {
            Ok(Complex::zero(self.prec))
        } else {
            self.coeff(k as usize).cloned()
        }
    }

    /// `S_k(f, ζ)`; the zero polynomial for negative `k`.
    pub fn partial_sum(&self, k: i64) -> Result<Polynomial> {
        if k < 0 {
            return Ok(Polynomial::zero(self.prec, &self.center));
        }
        let k = k as usize;
        if k > self.order() {
            return Err(Error::TruncationExceeded {
                requested: k,
                available: self.order(),
            });
        }
        Ok(Polynomial::new(self.center.clone(), self.coeffs[..=k].to_vec()))
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        Ok(PowerSeries {
            center: self.center.clone(),
            coeffs: self.partial_sum(order as i64)?.coeffs,
            prec: self.prec,
        })
    }

    /// Horner evaluation of the stored prefix.
    pub fn eval(&self, z: &Complex) -> Complex {
        horner(&self.coeffs, &self.center, z, self.prec)
    }

    /// Re-expansion about `to` through `order`.
    ///
    /// The stored prefix is shifted as a polynomial, so the result is exact
    /// only when every coefficient past the truncation order vanishes. For a
    /// series with radius `R` about the old center the neglected part is
    /// bounded by the tail of `Σ |a_k| (|to − ζ| + r)^k` on the new disk.
    pub fn recenter(&self, to: &Complex, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::TruncationExceeded {
                requested: order,
                available: self.order(),
            });
        }
        let shifted = shift_coeffs(&self.coeffs, &self.center, &to.with_prec(self.prec), self.prec);
        PowerSeries::new(to.with_prec(self.prec), shifted[..=order].to_vec())
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.center.clone(), self.coeffs.clone())
    }

    /// Coefficientwise sum; the result keeps the shorter truncation order.
    pub fn add(&self, other: &PowerSeries) -> Result<Self> {
        if !self.center.exactly_equals(&other.center) {
            return Err(Error::InvalidArgument("series have different centers".into()));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        PowerSeries::new(
            self.center.clone(),
            (0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(),
        )
    }

    /// Add a polynomial exactly (it must fit within the truncation order).
    pub fn add_polynomial(&self, p: &Polynomial) -> Result<Self> {
        let p = p.recenter(&self.center);
        let deg = p.degree_or_zero();
        if deg > self.order() {
            return Err(Error::TruncationExceeded {
                requested: deg,
                available: self.order(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a + &p.coeff(k))
            .collect();
        PowerSeries::new(self.center.clone(), coeffs)
    }

    pub fn scale(&self, s: &Complex) -> Self {
        PowerSeries::new(self.center.clone(), self.coeffs.iter().map(|c| c * s).collect())
            .expect("finite")
    }
}

impl Evaluable for PowerSeries {
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex {
        ExtendedComplex::Finite(self.eval(z))
    }
}

impl Differentiable for PowerSeries {
    fn eval_derivative(&self, z: &Complex, l: usize) -> ExtendedComplex {
        ExtendedComplex::Finite(self.to_polynomial().derivative(l).eval(z))
    }
}

impl TaylorSource for PowerSeries {
    /// Only the series' own center is supported: re-expansion of a truncated
    /// series elsewhere is inexact and must be requested via `recenter`.
    fn taylor(&self, center: &Complex, order: usize) -> Result<PowerSeries> {
        if !center.exactly_equals(&self.center) {
            return Err(Error::InvalidArgument(
                "truncated series can only be expanded about its own center".into(),
            ));
        }
        self.truncate(order)
    }
}

/// Quotient `A / B` of two polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
    coprime: bool,
}

impl RationalFunction {
    /// Build `num / den`, recentering the denominator to the numerator's
    /// center and certifying coprimality with the resultant test.
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        let mut r = Self::from_parts(numerator, denominator)?;
        r.coprime = r.resultant_ratio() > zero_threshold(r.prec());
        Ok(r)
    }

    /// Build without computing the coprimality certificate.
    pub fn from_parts(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.degree().is_none() {
            return Err(Error::ZeroDenominator);
        }
        let prec = numerator.prec().max(denominator.prec());
        let numerator = if numerator.prec() == prec { numerator } else { numerator.with_prec(prec) };
        let denominator = denominator.with_prec(prec).recenter(numerator.center());
        Ok(RationalFunction {
            numerator,
            denominator,
            coprime: false,
        })
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let den = Polynomial::constant(Complex::one(p.prec()), p.center());
        RationalFunction {
            numerator: p,
            denominator: den,
            coprime: true,
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn is_coprime(&self) -> bool {
        self.coprime
    }

    pub fn prec(&self) -> u32 {
        self.numerator.prec()
    }

    pub fn center(&self) -> &Complex {
        self.numerator.center()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        RationalFunction {
            numerator: self.numerator.with_prec(prec),
            denominator: self.denominator.with_prec(prec),
            coprime: self.coprime,
        }
    }

    pub fn recenter(&self, to: &Complex) -> Self {
        RationalFunction {
            numerator: self.numerator.recenter(to),
            denominator: self.denominator.recenter(to),
            coprime: self.coprime,
        }
    }

    /// `A(z)/B(z)`, with `∞` where `B(z) = 0`.
    pub fn eval(&self, z: &Complex) -> ExtendedComplex {
        let b = self.denominator.eval(z);
        if b.is_zero() {
            return ExtendedComplex::Infinity;
        }
        let q = &self.numerator.eval(z) / &b;
        if q.is_finite() {
            ExtendedComplex::Finite(q)
        } else {
            ExtendedComplex::Infinity
        }
    }

    /// Quotient-rule derivative `(A'B − AB') / B²` (not reduced).
    pub fn derivative(&self) -> Self {
        let a = &self.numerator;
        let b = &self.denominator;
        let num = &(&a.derivative(1) * b) - &(a * &b.derivative(1));
        RationalFunction {
            numerator: num,
            denominator: b * b,
            coprime: false,
        }
    }

    pub fn nth_derivative(&self, l: usize) -> Self {
        (0..l).fold(self.clone(), |r, _| r.derivative())
    }

    /// `|Res(A, B)|` against its Hadamard bound on the Sylvester matrix.
    /// Values near zero mean a (numerically) common root.
    pub fn resultant_ratio(&self) -> Float {
        let prec = self.prec();
        let (Some(m), Some(n)) = (self.numerator.degree(), self.denominator.degree()) else {
            return Float::with_val(prec, 1);
        };
        if m == 0 || n == 0 {
            return Float::with_val(prec, 1);
        }
        let size = m + n;
        let mut sylvester: Matrix = Vec::with_capacity(size);
        for (poly, deg, copies) in [(&self.numerator, m, n), (&self.denominator, n, m)] {
            for i in 0..copies {
                let mut row = vec![Complex::zero(prec); size];
                for k in 0..=deg {
                    row[i + k] = poly.coeff(deg - k);
                }
                sylvester.push(row);
            }
        }
        let (det, bound) = hadamard(&sylvester, prec);
        if bound.is_zero() {
            return Float::new(prec);
        }
        det.abs() / bound
    }

    /// True when `B` nearly vanishes at `z` relative to its coefficient scale.
    pub fn has_pole_at(&self, z: &Complex) -> bool {
        let prec = self.prec();
        let b = &self.denominator;
        let w = (z - b.center()).abs();
        let mut scale = Float::new(prec);
        let mut wk = Float::with_val(prec, 1);
        for c in b.coeffs() {
            scale += c.abs() * &wk;
            wk *= &w;
        }
        b.eval(z).abs() <= scale * zero_threshold(prec)
    }
}

impl Evaluable for RationalFunction {
    fn eval_ext(&self, z: &Complex) -> ExtendedComplex {
        self.eval(z)
    }
}

impl Differentiable for RationalFunction {
    fn eval_derivative(&self, z: &Complex, l: usize) -> ExtendedComplex {
        self.nth_derivative(l).eval(z)
    }
}

impl TaylorSource for RationalFunction {
    fn taylor(&self, center: &Complex, order: usize) -> Result<PowerSeries> {
        if self.has_pole_at(center) {
            return Err(Error::CenterOnPole);
        }
        let r = self.recenter(center);
        let coeffs = series_div(r.numerator.coeffs(), r.denominator.coeffs(), order, self.prec());
        PowerSeries::new(r.center().clone(), coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    center: ComplexRepr,
    coeffs: Vec<ComplexRepr>,
    precision_bits: u32,
}

impl SeriesRepr {
    fn new(center: &Complex, coeffs: &[Complex], prec: u32) -> Self {
        SeriesRepr {
            center: ComplexRepr::from_complex(center),
            coeffs: coeffs.iter().map(ComplexRepr::from_complex).collect(),
            precision_bits: prec,
        }
    }

    fn parts<E: de::Error>(self) -> std::result::Result<(Complex, Vec<Complex>), E> {
        let prec = self.precision_bits;
        if prec < 2 {
            return Err(E::custom("precision_bits must be at least 2"));
        }
        let center = self.center.to_complex(prec).map_err(E::custom)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.to_complex(prec))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(E::custom)?;
        Ok((center, coeffs))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr::new(&self.center, &self.coeffs, self.prec).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (center, coeffs) = SeriesRepr::deserialize(d)?.parts()?;
        Ok(Polynomial::new(center, coeffs))
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr::new(&self.center, &self.coeffs, self.prec).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (center, coeffs) = SeriesRepr::deserialize(d)?.parts()?;
        PowerSeries::new(center, coeffs).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    numerator: Polynomial,
    denominator: Polynomial,
    coprime: bool,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            numerator: self.numerator.clone(),
            denominator: self.denominator.clone(),
            coprime: self.coprime,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        let mut out =
            RationalFunction::from_parts(r.numerator, r.denominator).map_err(de::Error::custom)?;
        out.coprime = r.coprime;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::roundoff_tolerance;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::with_val(53, re, im)
    }

    fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
        (a - b).abs_f64() <= tol
    }

    #[test]
    fn partial_sums() {
        let f = PowerSeries::from_real(53, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let s = f.partial_sum(2).unwrap();
        assert_eq!(s.coeffs().len(), 3);
        assert_eq!(s.degree(), Some(2));
        assert_eq!(f.partial_sum(0).unwrap().coeffs(), &[c(1.0, 0.0)]);
        assert!(f.partial_sum(-1).unwrap().is_zero());
        assert!(matches!(
            f.partial_sum(4),
            Err(Error::TruncationExceeded { requested: 4, available: 3 })
        ));

        let e = PowerSeries::exp(128, 3).partial_sum(3).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (k, x) in expect.iter().enumerate() {
            assert!(close(&e.coeff(k).with_prec(53), &c(*x, 0.0), 1e-16));
        }
    }

    #[test]
    fn evaluation_on_extended_plane() {
        let p = Polynomial::from_f64(53, &[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(p.eval(&c(1.0, 0.0)).to_f64(), (2.0, 0.0));

        let one = Polynomial::from_f64(53, &[(1.0, 0.0)]);
        let r = RationalFunction::new(one, Polynomial::from_f64(53, &[(1.0, 0.0), (-1.0, 0.0)])).unwrap();
        assert!(r.eval(&c(1.0, 0.0)).is_infinite());

        let r = RationalFunction::new(
            Polynomial::from_f64(53, &[(1.0, 0.0), (0.5, 0.0)]),
            Polynomial::from_f64(53, &[(1.0, 0.0), (-0.5, 0.0)]),
        )
        .unwrap();
        assert_eq!(r.eval(&c(0.0, 0.0)).finite().unwrap().to_f64(), (1.0, 0.0));
    }

    #[test]
    fn recentering_examples() {
        let z2 = Polynomial::from_f64(53, &[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let r = z2.recenter(&c(1.0, 0.0));
        assert_eq!(r.coeffs(), &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);

        let k = Polynomial::from_f64(53, &[(3.0, -1.0)]);
        assert_eq!(k.recenter(&c(7.0, 2.0)).coeffs(), &[c(3.0, -1.0)]);

        let cube = Polynomial::from_f64(53, &[(1.0, 0.0), (3.0, 0.0), (3.0, 0.0), (1.0, 0.0)]);
        let r = cube.recenter(&c(-1.0, 0.0));
        assert_eq!(r.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);

        let f = PowerSeries::from_real(53, &[1.0, 2.0]).unwrap();
        assert!(matches!(f.recenter(&c(1.0, 0.0), 2), Err(Error::TruncationExceeded { .. })));
    }

    #[test]
    fn derivatives() {
        let z3 = Polynomial::from_f64(53, &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(z3.derivative(1).coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        assert!(Polynomial::from_f64(53, &[(5.0, 0.0)]).derivative(1).is_zero());
        let p = Polynomial::from_f64(53, &[(1.0, 0.0), (1.0, 0.0), (0.5, 0.0)]);
        assert_eq!(p.derivative(2).coeffs(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn degree_uses_relative_threshold() {
        let p = Polynomial::from_f64(53, &[(1.0, 0.0), (2.0, 0.0), (1e-12, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        let p = p.with_zero_threshold_bits(50);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Polynomial::zero(53, &c(0.0, 0.0)).degree(), None);
    }

    #[test]
    fn rational_taylor_and_quotient_rule() {
        let r = RationalFunction::new(
            Polynomial::from_f64(53, &[(1.0, 0.0)]),
            Polynomial::from_f64(53, &[(1.0, 0.0), (-1.0, 0.0)]),
        )
        .unwrap();
        let t = r.taylor(&c(0.0, 0.0), 5).unwrap();
        assert!(t.coeffs().iter().all(|a| a == &c(1.0, 0.0)));
        assert!(matches!(r.taylor(&c(1.0, 0.0), 3), Err(Error::CenterOnPole)));

        let d = r.derivative();
        let z = c(0.25, 0.5);
        let expect = (Complex::one(53) - &z).powu(2).recip();
        assert!(close(d.eval(&z).finite().unwrap(), &expect, 1e-14));
    }

    #[test]
    fn coprimality_certificate() {
        let r = RationalFunction::new(
            Polynomial::from_f64(53, &[(2.0, 0.0), (1.0, 0.0)]),
            Polynomial::from_f64(53, &[(0.0, 0.0), (-3.0, 0.0), (1.0, 0.0)]),
        )
        .unwrap();
        assert!(r.is_coprime());
        // (z − 1)(z + 2) / (z − 1)(z − 3)
        let r = RationalFunction::new(
            Polynomial::from_f64(53, &[(-2.0, 0.0), (1.0, 0.0), (1.0, 0.0)]),
            Polynomial::from_f64(53, &[(3.0, 0.0), (-4.0, 0.0), (1.0, 0.0)]),
        )
        .unwrap();
        assert!(!r.is_coprime());
        assert!(matches!(
            RationalFunction::new(Polynomial::from_f64(53, &[(1.0, 0.0)]), Polynomial::zero(53, &c(0.0, 0.0))),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn json_shape() {
        let p = Polynomial::from_f64(53, &[(1.0, 0.5), (0.0, -2.0)]);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["precision_bits"], 53);
        assert_eq!(v["center"], serde_json::json!([0.0, 0.0]));
        assert_eq!(v["coeffs"], serde_json::json!([[1.0, 0.5], [0.0, -2.0]]));
        let back: Polynomial = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);

        let f = PowerSeries::exp(256, 4);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"precision_bits\":256"));
        let back: PowerSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    fn coeff_vec() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..9)
    }

    proptest! {
        #[test]
        fn partial_sum_is_a_prefix(v in coeff_vec(), k in 0usize..9) {
            let f = PowerSeries::from_f64(64, &v).unwrap();
            let k = k.min(f.order());
            let s = f.partial_sum(k as i64).unwrap();
            for j in 0..=k {
                prop_assert!(s.coeff(j) == *f.coeff(j).unwrap());
            }
        }

        #[test]
        fn recenter_round_trip(v in coeff_vec(), re in -0.4f64..0.4, im in -0.4f64..0.4) {
            let prec = 128;
            let p = Polynomial::from_f64(prec, &v);
            let to = Complex::with_val(prec, re, im);
            let back = p.recenter(&to).recenter(&Complex::zero(prec));
            let scale = max_abs(p.coeffs(), prec).max(&Float::with_val(prec, 1));
            for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
                // Shift amplification stays well below 2^10 for these sizes.
                prop_assert!((a - b).abs() <= roundoff_tolerance(prec) * &scale);
            }
        }

        #[test]
        fn derivative_undoes_antiderivative(v in coeff_vec()) {
            let mut v = v;
            v[0] = (0.0, 0.0);
            let p = Polynomial::from_f64(128, &v);
            let q = p.derivative(1).antiderivative();
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).abs() <= roundoff_tolerance(128));
            }
        }
    }
}
