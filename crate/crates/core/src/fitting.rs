//! Least-squares polynomial and pole-constrained rational fits on sampled
//! compacts, with degree escalation until a sampled sup-error target is met.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{sample, CompactSpec};
use crate::linalg::IncrementalQr;
use crate::num::{serialize_float, Complex};
use crate::roots::clustered_roots;
use crate::series::{Polynomial, RationalFunction};

/// Basis for the polynomial part of a fit.
#[derive(Clone, Debug)]
pub enum Basis {
    /// `(z − c)^j` about a fixed center.
    Monomial { center: Complex },
    /// `((z − c)/ρ)^j` with `c`, `ρ` from the sample bounding disk.
    Scaled,
}

#[derive(Clone, Debug)]
pub struct FitProblem {
    pub points: Vec<Complex>,
    pub values: Vec<Complex>,
    /// Optional finer sample set that must also meet the target.
    pub check: Option<(Vec<Complex>, Vec<Complex>)>,
    pub basis: Basis,
    pub budget: usize,
    pub target_error: Float,
    /// Center of the returned polynomial.
    pub output_center: Complex,
    /// Residuals are measured as `|(z − c)^e (fit(z) − v)|` when set.
    pub weight: Option<(Complex, u32)>,
    pub prec: u32,
}

impl FitProblem {
    pub fn new(points: Vec<Complex>, values: Vec<Complex>, budget: usize, target_error: f64, prec: u32) -> Self {
        FitProblem {
            points,
            values,
            check: None,
            basis: Basis::Scaled,
            budget,
            target_error: Float::with_val(prec, target_error),
            output_center: Complex::zero(prec),
            weight: None,
            prec,
        }
    }

    pub fn with_weight(mut self, center: Complex, power: u32) -> Self {
        self.weight = Some((center, power));
        self
    }

    fn weights(&self, points: &[Complex]) -> Option<Vec<Complex>> {
        self.weight
            .as_ref()
            .map(|(c, e)| points.par_iter().map(|z| (z - c).powu(*e)).collect())
    }

    fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidArgument("fit needs at least one sample".into()));
        }
        if self.points.len() != self.values.len() {
            return Err(Error::LengthMismatch(self.points.len(), self.values.len()));
        }
        if self.target_error <= 0 {
            return Err(Error::InvalidArgument("target error must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    /// Polynomial part, about the problem's output center.
    pub polynomial: Polynomial,
    /// Full rational fit when pole columns were used.
    pub rational: Option<RationalFunction>,
    pub degree: usize,
    /// `max |fit − target|` over the fitting samples.
    #[serde(serialize_with = "serialize_float")]
    pub achieved: Float,
    /// Same over the check samples, when given.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_float")]
    pub check_error: Option<Float>,
    pub condition: f64,
}

fn serialize_opt_float<S: serde::Serializer>(x: &Option<Float>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_float(v, s),
        None => s.serialize_none(),
    }
}

impl FitResult {
    /// The same fit with every number rounded to `prec` bits.
    pub fn rounded(self, prec: u32) -> Self {
        if self.achieved.prec() == prec {
            return self;
        }
        FitResult {
            polynomial: self.polynomial.with_prec(prec),
            rational: self.rational.map(|r| r.with_prec(prec)),
            achieved: Float::with_val(prec, &self.achieved),
            check_error: self.check_error.map(|e| Float::with_val(prec, &e)),
            ..self
        }
    }

    pub fn achieved_f64(&self) -> f64 {
        self.achieved.to_f64()
    }

    /// Larger of the sample and check errors.
    pub fn worst_error(&self) -> Float {
        match &self.check_error {
            Some(c) => self.achieved.clone().max(c),
            None => self.achieved.clone(),
        }
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        match &self.rational {
            Some(r) => r.eval(z).finite().cloned().unwrap_or_else(|| Complex::zero(z.prec())),
            None => self.polynomial.eval(z),
        }
    }
}

/// Sampled sup of `|f(z_i) − v_i|`.
pub fn sup_residual<F>(f: F, points: &[Complex], values: &[Complex], prec: u32) -> Float
where
    F: Fn(&Complex) -> Complex + Sync,
{
    points
        .par_iter()
        .zip(values)
        .map(|(z, v)| (f(z) - v).abs())
        .reduce(|| Float::new(prec), |a, b| a.max(&b))
}

fn weighted_residual<F>(f: F, points: &[Complex], values: &[Complex], weights: Option<&[Complex]>, prec: u32) -> Float
where
    F: Fn(&Complex) -> Complex + Sync,
{
    match weights {
        None => sup_residual(f, points, values, prec),
        Some(w) => points
            .par_iter()
            .zip(values)
            .zip(w)
            .map(|((z, v), wi)| ((f(z) - v) * wi).abs())
            .reduce(|| Float::new(prec), |a, b| a.max(&b)),
    }
}

fn bounding(points: &[Complex], prec: u32) -> (Complex, Float) {
    let (mut lo_re, mut hi_re) = (points[0].re().clone(), points[0].re().clone());
    let (mut lo_im, mut hi_im) = (points[0].im().clone(), points[0].im().clone());
    for z in points {
        lo_re.min_mut(z.re());
        hi_re.max_mut(z.re());
        lo_im.min_mut(z.im());
        hi_im.max_mut(z.im());
    }
    let c = Complex::new(
        Float::with_val(prec, &lo_re + &hi_re) / 2u32,
        Float::with_val(prec, &lo_im + &hi_im) / 2u32,
    );
    let mut rho = Float::new(prec);
    for z in points {
        rho.max_mut(&(z - &c).abs());
    }
    if rho.is_zero() {
        rho = Float::with_val(prec, 1);
    }
    (c, rho)
}

struct PoleColumn {
    pole: Complex,
    scale: Float,
    power: usize,
}

/// Shared escalation loop. `poles` columns come first, then monomials.
fn escalate(problem: &FitProblem, poles: &[PoleColumn]) -> Result<FitResult> {
    problem.validate()?;
    let prec = problem.prec;
    let (c, rho) = match &problem.basis {
        Basis::Monomial { center } => (center.with_prec(prec), Float::with_val(prec, 1)),
        Basis::Scaled => bounding(&problem.points, prec),
    };
    let w: Vec<Complex> = problem
        .points
        .iter()
        .map(|z| (z - &c).div_float(&rho))
        .collect();
    let weights = problem.weights(&problem.points);
    let check_weights = problem.check.as_ref().and_then(|(pts, _)| problem.weights(pts));
    let weighted = |col: Vec<Complex>| match &weights {
        Some(wt) => col.into_iter().zip(wt).map(|(a, b)| a * b).collect(),
        None => col,
    };
    let mut qr = IncrementalQr::new(weighted(problem.values.clone()), prec);
    for pc in poles {
        let col = problem
            .points
            .iter()
            .map(|z| (Complex::from_float(pc.scale.clone()) / (z - &pc.pole)).powu(pc.power as u32))
            .collect();
        qr.push_column(weighted(col))?;
    }
    let mut power: Vec<Complex> = match &weights {
        Some(wt) => wt.clone(),
        None => vec![Complex::one(prec); w.len()],
    };
    let mut best: Option<FitResult> = None;
    for degree in 0..=problem.budget {
        if degree > 0 {
            for (p, wi) in power.iter_mut().zip(&w) {
                *p = &*p * wi;
            }
        }
        qr.push_column(power.clone())?;
        let sol = qr.solve();
        let (pole_coefs, mono) = sol.split_at(poles.len());
        let poly = Polynomial::new(
            c.clone(),
            mono.iter()
                .enumerate()
                .map(|(j, a)| a.div_float(&Float::with_val(prec, (&rho).pow(j as u32))))
                .collect(),
        )
        .recenter(&problem.output_center);
        let rational = if poles.is_empty() {
            None
        } else {
            Some(assemble_rational(&poly, poles, pole_coefs)?)
        };
        let mut result = FitResult {
            polynomial: poly,
            rational,
            degree,
            achieved: Float::new(prec),
            check_error: None,
            condition: qr.condition_estimate(),
        };
        result.achieved = weighted_residual(
            |z| result.eval(z),
            &problem.points,
            &problem.values,
            weights.as_deref(),
            prec,
        );
        if let Some((pts, vals)) = &problem.check {
            result.check_error = Some(weighted_residual(|z| result.eval(z), pts, vals, check_weights.as_deref(), prec));
        }
        let worst = result.worst_error();
        if worst <= problem.target_error {
            return Ok(result);
        }
        if best.as_ref().is_none_or(|b| worst < b.worst_error()) {
            best = Some(result);
        }
    }
    Err(Error::BudgetExhausted(Box::new(best.expect("at least degree 0 was tried"))))
}

fn assemble_rational(poly: &Polynomial, poles: &[PoleColumn], coefs: &[Complex]) -> Result<RationalFunction> {
    let prec = poly.prec();
    let center = poly.center().clone();
    let linear = |p: &Complex| Polynomial::new(center.clone(), vec![&center - p, Complex::one(prec)]);
    // Distinct poles with their largest power.
    let mut distinct: Vec<(Complex, usize)> = Vec::new();
    for pc in poles {
        match distinct.iter_mut().find(|(p, _)| p.exactly_equals(&pc.pole)) {
            Some(entry) => entry.1 = entry.1.max(pc.power),
            None => distinct.push((pc.pole.clone(), pc.power)),
        }
    }
    let power_of = |p: &Complex, k: usize| {
        (0..k).fold(Polynomial::constant(Complex::one(prec), &center), |acc, _| &acc * &linear(p))
    };
    let den = distinct
        .iter()
        .fold(Polynomial::constant(Complex::one(prec), &center), |acc, (p, m)| &acc * &power_of(p, *m));
    let mut num = poly * &den;
    for (pc, a) in poles.iter().zip(coefs) {
        let m = distinct
            .iter()
            .find(|(p, _)| p.exactly_equals(&pc.pole))
            .map(|(_, m)| *m)
            .expect("pole is listed");
        let mut term = power_of(&pc.pole, m - pc.power);
        for (p, k) in &distinct {
            if !p.exactly_equals(&pc.pole) {
                term = &term * &power_of(p, *k);
            }
        }
        let scale = a * &Complex::from_float(Float::with_val(prec, (&pc.scale).pow(pc.power as u32)));
        num = &num + &term.scale(&scale);
    }
    RationalFunction::from_parts(num, den)
}

/// Polynomial least-squares fit, degree escalated from 0 until the sampled
/// sup error (and the check error, if any) is at most the target.
pub fn mergelyan_fit(problem: &FitProblem) -> Result<FitResult> {
    escalate(problem, &[])
}

/// Pole of a rational fit template.
#[derive(Clone, Debug)]
pub struct TemplatePole {
    pub point: Complex,
    pub multiplicity: usize,
}

/// Fit in the mixed basis `{(ρ_π/(z − π))^j}` over the template followed by
/// monomials escalated up to the budget.
pub fn runge_rational_fit(problem: &FitProblem, template: &[TemplatePole]) -> Result<FitResult> {
    problem.validate()?;
    let prec = problem.prec;
    let mut cols = Vec::new();
    for tp in template {
        let mut dist = Float::with_val(prec, f64::INFINITY);
        for z in problem.points.iter().chain(problem.check.iter().flat_map(|c| c.0.iter())) {
            dist.min_mut(&(z - &tp.point).abs());
        }
        if dist <= Float::with_val(prec, 1e-9) {
            return Err(Error::PoleInRegion { distance: dist.to_f64() });
        }
        for j in 1..=tp.multiplicity {
            cols.push(PoleColumn {
                pole: tp.point.with_prec(prec),
                scale: dist.clone(),
                power: j,
            });
        }
    }
    escalate(problem, &cols)
}

/// Sum of the principal parts of `r` at its poles inside `region`.
pub fn principal_parts(r: &RationalFunction, region: &CompactSpec) -> Result<RationalFunction> {
    let prec = r.prec();
    let center = r.center().clone();
    let den = r.denominator();
    let q = den.degree().ok_or(Error::ZeroDenominator)?;
    let one = Polynomial::constant(Complex::one(prec), &center);
    let zero = RationalFunction::from_polynomial(Polynomial::zero(prec, &center));
    if q == 0 {
        return Ok(zero);
    }
    let roots = clustered_roots(den)?;
    let lead = den.coeff(q);
    let linear = |p: &Complex| Polynomial::new(center.clone(), vec![&center - p, Complex::one(prec)]);
    let pow = |p: &Complex, k: usize| (0..k).fold(one.clone(), |acc, _| &acc * &linear(p));
    let mut total_num = Polynomial::zero(prec, &center);
    let mut total_den = one.clone();
    for (i, root) in roots.iter().enumerate() {
        let (re, im) = root.value.to_f64();
        if !region.contains([re, im], 1e-9) {
            continue;
        }
        let m = root.multiplicity;
        // B = lead · (z − c)^m · B̂
        let mut b_hat = Polynomial::constant(lead.clone(), &center);
        for (j, other) in roots.iter().enumerate() {
            if j != i {
                b_hat = &b_hat * &pow(&other.value, other.multiplicity);
            }
        }
        let c = &root.value;
        let a_c = r.numerator().recenter(c);
        let b_c = b_hat.recenter(c);
        let s = crate::series::series_div(a_c.coeffs(), b_c.coeffs(), m - 1, prec);
        let part_num = Polynomial::new(c.clone(), s).recenter(&center);
        let part_den = pow(c, m);
        total_num = &(&total_num * &part_den) + &(&part_num * &total_den);
        total_den = &total_den * &part_den;
    }
    if total_num.is_zero() {
        return Ok(zero);
    }
    RationalFunction::from_parts(total_num, total_den)
}

/// One piece of a piecewise fitting target.
pub struct PieceTarget<'a> {
    pub spec: CompactSpec,
    pub target: &'a (dyn Fn(&Complex) -> Complex + Sync),
}

/// Settings for [`adaptive_fit`].
#[derive(Clone, Debug)]
pub struct AdaptiveFit {
    pub initial_budget: usize,
    pub max_degree: usize,
    /// Samples per unknown.
    pub oversampling: usize,
}

impl Default for AdaptiveFit {
    fn default() -> Self {
        AdaptiveFit {
            initial_budget: 8,
            max_degree: 160,
            oversampling: 4,
        }
    }
}

/// Bits spanned by `|z − c|^e` over `points`; rows below the largest weight
/// by more than the working precision would be lost in the solve.
fn weight_range_bits(points: &[Complex], c: &Complex, e: u32) -> u32 {
    if e == 0 {
        return 0;
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), z| {
        let r = (z - c).abs_f64();
        (lo.min(r), hi.max(r))
    });
    if !(lo > 0.0 && hi > lo) {
        return 0;
    }
    (e as f64 * (hi / lo).log2()).ceil() as u32
}

/// Escalating stages of [`mergelyan_fit`] on boundary samples of the pieces.
/// Stage budgets double; each stage samples at least `oversampling · (B+1)`
/// points on every piece and checks on a mesh twice as fine.
pub fn adaptive_fit(
    pieces: &[PieceTarget<'_>],
    output_center: &Complex,
    target_error: &Float,
    settings: &AdaptiveFit,
    prec: u32,
) -> Result<FitResult> {
    adaptive_fit_weighted(pieces, output_center, target_error, settings, None, prec)
}

/// [`adaptive_fit`] with residuals weighted by `(z − c)^e`.
pub fn adaptive_fit_weighted(
    pieces: &[PieceTarget<'_>],
    output_center: &Complex,
    target_error: &Float,
    settings: &AdaptiveFit,
    weight: Option<(Complex, u32)>,
    prec: u32,
) -> Result<FitResult> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("no fitting pieces".into()));
    }
    // Each piece gets its own mesh: with a steep weight the other pieces'
    // rows can vanish numerically, so one piece alone must pin down the fit.
    let collect = |per_piece: usize, refine: f64| -> Result<(Vec<Complex>, Vec<Complex>)> {
        let mut pts = Vec::new();
        let mut vals = Vec::new();
        for piece in pieces {
            let mesh = piece.spec.perimeter() / (per_piece as f64 * refine);
            let s = sample(&piece.spec, mesh)?.complex_points(prec);
            vals.extend(s.par_iter().map(|z| (piece.target)(z)).collect::<Vec<_>>());
            pts.extend(s);
        }
        Ok((pts, vals))
    };
    let mut budget = settings.initial_budget.min(settings.max_degree);
    let mut best: Option<FitResult> = None;
    loop {
        let per_piece = settings.oversampling * (budget + 1);
        let (points, values) = collect(per_piece, 1.0)?;
        let (check_pts, check_vals) = collect(per_piece, 2.0)?;
        let work = prec + weight.as_ref().map_or(0, |(c, e)| weight_range_bits(&check_pts, c, *e));
        let lift = |v: Vec<Complex>| -> Vec<Complex> {
            if work == prec {
                v
            } else {
                v.iter().map(|z| z.with_prec(work)).collect()
            }
        };
        let problem = FitProblem {
            points: lift(points),
            values: lift(values),
            check: Some((lift(check_pts), lift(check_vals))),
            basis: Basis::Scaled,
            budget,
            target_error: Float::with_val(work, target_error),
            output_center: output_center.with_prec(work),
            weight: weight.as_ref().map(|(c, e)| (c.with_prec(work), *e)),
            prec: work,
        };
        match mergelyan_fit(&problem).map(|r| r.rounded(prec)) {
            Ok(r) => return Ok(r),
            Err(Error::BudgetExhausted(r)) => {
                let r = (*r).rounded(prec);
                if best.as_ref().is_none_or(|b| r.worst_error() < b.worst_error()) {
                    best = Some(r);
                }
            }
            Err(e) => return Err(e),
        }
        if budget >= settings.max_degree {
            return Err(Error::BudgetExhausted(Box::new(best.expect("one stage ran"))));
        }
        budget = (budget * 2).max(1).min(settings.max_degree);
    }
}
