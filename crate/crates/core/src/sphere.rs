//! The chordal metric on the extended plane, the metrics `ρ_c` and `ρ_d` on
//! coefficient sequences, and supremum distances over sampled compacts.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, SampledSet};
use crate::num::{Complex, ExtendedComplex};
use crate::roots::aberth;
use crate::series::{Differentiable, Evaluable, RationalFunction};

/// `χ(a, b)` with `√(1 + |a|²)` normalization.
pub fn chordal(a: &ExtendedComplex, b: &ExtendedComplex, prec: u32) -> Float {
    let norm = |z: &Complex| (Float::with_val(prec, 1) + z.norm_sqr()).sqrt();
    match (a, b) {
        (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => Float::new(prec),
        (ExtendedComplex::Finite(z), ExtendedComplex::Infinity)
        | (ExtendedComplex::Infinity, ExtendedComplex::Finite(z)) => Float::with_val(prec, 1) / norm(z),
        (ExtendedComplex::Finite(x), ExtendedComplex::Finite(y)) => {
            let d = (x - y).abs();
            d / (norm(x) * norm(y))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Chordal,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Chordal => "chordal",
        }
    }
}

/// Sampled supremum of a pointwise distance.
#[derive(Clone, Debug, Serialize)]
pub struct SupReport {
    pub metric: Metric,
    pub value: f64,
    #[serde(skip)]
    pub exact: Float,
    pub witness: Point,
    pub witness_index: usize,
    pub n_samples: usize,
    pub mesh: f64,
}

impl SupReport {
    pub const CSV_HEADER: &'static str = "metric,value,witness_re,witness_im,n_samples,mesh";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{},{},{},{}",
            self.metric.name(),
            self.value,
            self.witness[0],
            self.witness[1],
            self.n_samples,
            self.mesh
        )
    }

    fn from_values(metric: Metric, values: Vec<Float>, set: &SampledSet) -> SupReport {
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        let exact = values[best].clone();
        SupReport {
            metric,
            value: exact.to_f64(),
            exact,
            witness: set.points[best],
            witness_index: best,
            n_samples: set.len(),
            mesh: set.mesh,
        }
    }
}

fn pointwise(a: &ExtendedComplex, b: &ExtendedComplex, metric: Metric, prec: u32) -> Result<Float> {
    match metric {
        Metric::Chordal => Ok(chordal(a, b, prec)),
        Metric::Euclidean => match (a, b) {
            (ExtendedComplex::Finite(x), ExtendedComplex::Finite(y)) => Ok((x - y).abs()),
            _ => Err(Error::InfiniteValue),
        },
    }
}

/// `max_{z ∈ S} d(f(z), g(z))`; ties resolve to the lowest sample index.
pub fn sup_distance<F, G>(f: &F, g: &G, set: &SampledSet, metric: Metric, prec: u32) -> Result<SupReport>
where
    F: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let values: Vec<Float> = set
        .points
        .par_iter()
        .map(|p| {
            let z = Complex::with_val(prec, p[0], p[1]);
            pointwise(&f.eval_ext(&z), &g.eval_ext(&z), metric, prec)
        })
        .collect::<Result<_>>()?;
    Ok(SupReport::from_values(metric, values, set))
}

/// Value of `ρ_c` on a finite prefix, with the bound on the omitted tail.
#[derive(Clone, Debug, Serialize)]
pub struct RhoC {
    pub value: f64,
    pub tail_bound: f64,
}

/// `ρ_d` on a finite prefix.
#[derive(Clone, Debug, Serialize)]
pub struct RhoD {
    pub value: f64,
    /// First index where the sequences differ.
    pub first_difference: Option<usize>,
    /// Number of coordinates compared.
    pub compared: usize,
}

/// `Σ_{n < len} 2^-n |a_n − b_n| / (1 + |a_n − b_n|)`; the omitted tail is at
/// most `2^(-len+1)`.
pub fn rho_c(a: &[Complex], b: &[Complex]) -> Result<RhoC> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let prec = a.iter().chain(b).map(Complex::prec).max().unwrap_or(53);
    let mut sum = Float::new(prec);
    for (n, (x, y)) in a.iter().zip(b).enumerate() {
        let d = (x - y).abs();
        let term = Float::with_val(prec, &d / (Float::with_val(prec, 1) + &d)) >> n as u32;
        sum += term;
    }
    Ok(RhoC {
        value: sum.to_f64(),
        tail_bound: 2f64.powi(1 - a.len() as i32),
    })
}

/// `2^(-n₀)` with `n₀` the first index where the stored values differ.
pub fn rho_d(a: &[Complex], b: &[Complex]) -> Result<RhoD> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let first = a.iter().zip(b).position(|(x, y)| !x.exactly_equals(y));
    Ok(RhoD {
        value: first.map_or(0.0, |n| 2f64.powi(-(n as i32))),
        first_difference: first,
        compared: a.len(),
    })
}

/// `sup_S |r^(l) − f^(l)|`, after checking that no pole of `r` lies in the
/// sampled region (within one mesh width of a sample).
pub fn derivative_seminorm_gap<F>(
    r: &RationalFunction,
    f: &F,
    l: usize,
    set: &SampledSet,
    prec: u32,
) -> Result<SupReport>
where
    F: Differentiable + ?Sized,
{
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let r = r.with_prec(prec.max(r.prec()));
    for pole in aberth(r.denominator())? {
        let (pr, pi) = pole.to_f64();
        let d = set
            .points
            .iter()
            .map(|p| (p[0] - pr).hypot(p[1] - pi))
            .fold(f64::INFINITY, f64::min);
        if d <= set.mesh {
            return Err(Error::PoleInRegion { distance: d });
        }
    }
    let dr = r.nth_derivative(l);
    let values: Vec<Float> = set
        .points
        .par_iter()
        .map(|p| {
            let z = Complex::with_val(prec, p[0], p[1]);
            pointwise(&dr.eval(&z), &f.eval_derivative(&z, l), Metric::Euclidean, prec)
        })
        .collect::<Result<_>>()?;
    Ok(SupReport::from_values(Metric::Euclidean, values, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample, sample_with_interior, CompactSpec};
    use crate::num::ExtendedComplex::{Finite, Infinity};
    use crate::series::{PowerSeries, Polynomial};

    fn fin(re: f64, im: f64) -> ExtendedComplex {
        Finite(Complex::with_val(53, re, im))
    }

    fn geometric_rational(prec: u32) -> RationalFunction {
        RationalFunction::new(
            Polynomial::from_f64(prec, &[(1.0, 0.0)]),
            Polynomial::from_f64(prec, &[(1.0, 0.0), (-1.0, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal(&fin(0.3, 0.2), &fin(0.3, 0.2), 53), 0.0);
        assert_eq!(chordal(&fin(0.0, 0.0), &Infinity, 53), 1.0);
        assert!((chordal(&fin(1.0, 0.0), &fin(-1.0, 0.0), 53).to_f64() - 1.0).abs() < 1e-15);
        assert_eq!(chordal(&Infinity, &Infinity, 53), 0.0);
    }

    #[test]
    fn sup_examples() {
        let r = geometric_rational(53);
        let at_one = SampledSet::from_points(vec![[1.0, 0.0]], 1.0);
        let rep = sup_distance(&r, &Infinity, &at_one, Metric::Chordal, 53).unwrap();
        assert_eq!(rep.value, 0.0);
        assert!(matches!(
            sup_distance(&r, &fin(0.0, 0.0), &at_one, Metric::Euclidean, 53),
            Err(Error::InfiniteValue)
        ));

        let z = Polynomial::from_f64(53, &[(0.0, 0.0), (1.0, 0.0)]);
        let circle = sample(&CompactSpec::disk(0.0, 0.0, 1.0), 0.1).unwrap();
        let rep = sup_distance(&z, &fin(0.0, 0.0), &circle, Metric::Euclidean, 53).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-15);
        assert_eq!(rep.witness_index, 0);
        assert_eq!(rep.csv_row().split(',').count(), 6);
    }

    #[test]
    fn rho_examples() {
        let z = |x: f64| Complex::real(53, x);
        let a = vec![z(1.0), z(2.0), z(3.0), z(4.0)];
        assert_eq!(rho_c(&a, &a).unwrap().value, 0.0);
        let mut b = a.clone();
        b[0] = z(2.0);
        assert_eq!(rho_c(&a, &b).unwrap().value, 0.5);
        assert_eq!(rho_d(&a, &b).unwrap().value, 1.0);
        let mut c = a.clone();
        c[3] = z(5.0);
        assert_eq!(rho_d(&a, &c).unwrap().value, 0.125);
        assert_eq!(rho_d(&a, &a).unwrap().value, 0.0);
        assert!(matches!(rho_c(&a, &a[..2]), Err(Error::LengthMismatch(4, 2))));

        let ones = vec![z(1.0); 60];
        let zeros = vec![z(0.0); 60];
        let r = rho_c(&ones, &zeros).unwrap();
        assert!((r.value - 1.0).abs() <= r.tail_bound);
    }

    #[test]
    fn derivative_gaps_match_tail_bounds() {
        let prec = 128;
        let r = geometric_rational(prec);
        let f = PowerSeries::geometric(prec, 10).to_polynomial();
        let set = sample_with_interior(&CompactSpec::disk(0.0, 0.0, 0.5), 0.05).unwrap();
        // 1/(1−z) − Σ_{k≤10} z^k = z^11/(1−z)
        let gap0 = derivative_seminorm_gap(&r, &f, 0, &set, prec).unwrap();
        assert!(gap0.value <= 2f64.powi(-10) * (1.0 + 1e-12));
        assert!(gap0.value > 0.9 * 2f64.powi(-10));
        // d/dz: 11 z^10/(1−z) + z^11/(1−z)²
        let gap1 = derivative_seminorm_gap(&r, &f, 1, &set, prec).unwrap();
        let bound = 11.0 * 0.5f64.powi(10) / 0.5 + 0.5f64.powi(11) / 0.25;
        assert!(gap1.value <= bound * (1.0 + 1e-12));
        assert!(gap1.value > 0.9 * bound);

        let same = derivative_seminorm_gap(&RationalFunction::from_polynomial(f.clone()), &f, 2, &set, prec).unwrap();
        assert_eq!(same.value, 0.0);

        let near_pole = sample(&CompactSpec::disk(1.0, 0.0, 0.2), 0.05).unwrap();
        let near_pole = SampledSet::from_points(
            near_pole.points.into_iter().chain([[1.0, 0.0]]).collect(),
            0.05,
        );
        assert!(matches!(
            derivative_seminorm_gap(&r, &f, 0, &near_pole, prec),
            Err(Error::PoleInRegion { .. })
        ));
    }
}
