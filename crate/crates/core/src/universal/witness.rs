//! Explicit elements of the approximation-and-normality sets: a polynomial
//! fit perturbed by `d·z^p`, its rational variant `P/(1 + d·z^q)`, and the
//! chordal witness `(A + d·z^t·B)/B` built around the principal parts of a
//! rational target.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::{adaptive_fit, principal_parts, AdaptiveFit, PieceTarget};
use crate::geometry::{sample, sample_with_interior, CompactSpec, Point, SampledSet};
use crate::num::{Complex, ExtendedComplex};
use crate::pade::{classify_rational, compute_pade, Membership, PadeConfig, PadeIndex};
use crate::series::{FnEval, Polynomial, RationalFunction, TaylorSource};
use crate::sphere::{sup_distance, Metric};
use crate::universal::table::{QSideTable, QTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Type1,
    Type1QSide,
    Type2,
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub prec: u32,
    pub fit: AdaptiveFit,
    /// Mesh of the samples on which margins are measured.
    pub mesh: f64,
    /// Mesh of the expansion centers sampled from `L`.
    pub center_mesh: f64,
}

impl WitnessOptions {
    pub fn new(prec: u32) -> Self {
        WitnessOptions {
            prec,
            fit: AdaptiveFit::default(),
            mesh: 0.02,
            center_mesh: 0.4,
        }
    }
}

/// Membership of the witness in `D_{p,q}(ζ)` at one center, with the
/// identity `[u; p/q]_ζ = u`.
#[derive(Clone, Debug, Serialize)]
pub struct CenterCheck {
    pub center: Point,
    pub p: usize,
    pub q: usize,
    pub member: bool,
    pub identity: bool,
    pub hankel_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub witness: RationalFunction,
    pub d: Complex,
    /// Table index used.
    pub n: usize,
    /// Numerator degree `p` (type 1, type 2) or the single `q` (q-side).
    pub index: usize,
    /// `t = p − deg B` for type 2.
    pub t: Option<usize>,
    pub fit_degree: usize,
    pub s: u32,
    pub eps: f64,
    /// `max_j sup_K d([u; p/q_j]_ζ, h)` at the first sampled center.
    pub target_margin: f64,
    /// `max_j sup_L |[u; p/q_j]_ζ − u|`.
    pub local_margin: f64,
    /// Distance of `u` itself to the piecewise target.
    pub density_margin: f64,
    pub checks: Vec<CenterCheck>,
    pub min_hankel_ratio: f64,
    /// Degree contract: numerator degree equals the chosen `p`.
    pub degree_ok: bool,
    pub coprime: bool,
    /// `(1/|d|)^{1/q} / max |z|` for the q-side witness; above 1 means no pole
    /// of `u` in the sampled union.
    pub pole_margin: Option<f64>,
    pub passed: bool,
}

impl WitnessReport {
    pub fn margins(&self) -> [f64; 3] {
        [self.target_margin, self.local_margin, self.density_margin]
    }
}

fn check_eps(s: u32, eps: f64) -> Result<()> {
    if s == 0 || !(eps > 0.0 && eps < 1.0 / s as f64) {
        return Err(Error::InvalidArgument(format!("need 0 < ε < 1/s, got ε = {eps}, s = {s}")));
    }
    Ok(())
}

fn max_modulus(specs: &[&CompactSpec]) -> f64 {
    specs
        .iter()
        .map(|s| {
            let (c, r) = s.bounding_disk();
            c[0].hypot(c[1]) + r
        })
        .fold(0.0, f64::max)
}

fn exact_degree(p: &Polynomial) -> usize {
    p.coeffs().iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn centers(l: &CompactSpec, opts: &WitnessOptions) -> Result<SampledSet> {
    sample_with_interior(l, opts.center_mesh)
}

/// Membership and identity at every sampled center for each `(p, q)`.
fn center_checks(u: &RationalFunction, centers: &SampledSet, indices: &[(usize, usize)], cfg: &PadeConfig) -> Result<Vec<CenterCheck>> {
    let mut out = Vec::new();
    for (pt, zeta) in centers.points.iter().zip(centers.complex_points(cfg.prec)) {
        for &(p, q) in indices {
            let c = classify_rational(u, &zeta, p, q, cfg)?;
            out.push(CenterCheck {
                center: *pt,
                p,
                q,
                member: c.verdict == Membership::Member && c.d_report.member,
                identity: c.identity_holds == Some(true),
                hankel_ratio: c.d_report.ratio,
            });
        }
    }
    Ok(out)
}

struct Margins {
    target: f64,
    local: f64,
}

/// Margins of the approximants `[u; p/q]` at the first center.
#[allow(clippy::too_many_arguments)]
fn pade_margins<H>(
    u: &RationalFunction,
    zeta: &Complex,
    indices: &[(usize, usize)],
    k: &SampledSet,
    h: &H,
    target_metric: Metric,
    l: &SampledSet,
    cfg: &PadeConfig,
) -> Result<Margins>
where
    H: crate::series::Evaluable + ?Sized,
{
    let mut m = Margins { target: 0.0, local: 0.0 };
    for &(p, q) in indices {
        let f = u.taylor(zeta, p + q)?;
        let r = compute_pade(&f, PadeIndex::new(p, q), cfg)?.value;
        m.target = m.target.max(sup_distance(&r, h, k, target_metric, cfg.prec)?.value);
        m.local = m.local.max(sup_distance(&r, u, l, Metric::Euclidean, cfg.prec)?.value);
    }
    Ok(m)
}

fn finite(f: impl Fn(&Complex) -> Complex + Sync) -> FnEval<impl Fn(&Complex) -> ExtendedComplex + Sync> {
    FnEval(move |z: &Complex| ExtendedComplex::Finite(f(z)))
}

fn fit_piecewise(
    k: &CompactSpec,
    h: &(dyn Fn(&Complex) -> Complex + Sync),
    l: &CompactSpec,
    g: &(dyn Fn(&Complex) -> Complex + Sync),
    eps: f64,
    opts: &WitnessOptions,
) -> Result<Polynomial> {
    let prec = opts.prec;
    let pieces = [
        PieceTarget { spec: k.clone(), target: h },
        PieceTarget { spec: l.clone(), target: g },
    ];
    let target = Float::with_val(prec, eps / 2.0);
    Ok(adaptive_fit(&pieces, &Complex::zero(prec), &target, &opts.fit, prec)?.polynomial.trimmed())
}

fn passed(report: &WitnessReport) -> bool {
    let bound = 1.0 / report.s as f64;
    report.margins().iter().all(|m| *m < bound)
        && report.checks.iter().all(|c| c.member && c.identity)
        && report.degree_ok
        && !report.d.is_zero()
        && report.pole_margin.is_none_or(|m| m > 1.0)
}

/// `u = P + d·z^p` with `P` a polynomial fit of `h` on `K` and `g` on `L` to
/// `ε/2`, `p` the first usable `p_n > deg P` and `d = (ε/4) / max |z|^p`.
#[allow(clippy::too_many_arguments)]
pub fn type1_witness(
    g: &Polynomial,
    k: &CompactSpec,
    h: &(dyn Fn(&Complex) -> Complex + Sync),
    l: &CompactSpec,
    table: &QTable,
    s: u32,
    eps: f64,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    check_eps(s, eps)?;
    let prec = opts.prec;
    let g_eval = |z: &Complex| g.eval(z);
    let poly = fit_piecewise(k, h, l, &g_eval, eps, opts)?;
    let deg = exact_degree(&poly);
    let n = table.usable().find(|&n| table.p(n) > deg).ok_or(Error::NoUsableIndex)?;
    let p = table.p(n);
    let zmax = max_modulus(&[k, l]);
    let d = Float::with_val(prec, eps / 4.0) / Float::with_val(prec, zmax).pow(p as u32);
    let d = Complex::from_float(d);
    let u_poly = &poly + &Polynomial::monomial(&Complex::zero(prec), p, d.clone());
    let u = RationalFunction::from_polynomial(u_poly.clone());

    let cfg = PadeConfig::new(prec);
    let indices: Vec<(usize, usize)> = table.qs(n).iter().map(|&q| (p, q)).collect();
    let cs = centers(l, opts)?;
    let checks = center_checks(&u, &cs, &indices, &cfg)?;
    let ks = sample(k, opts.mesh)?;
    let ls = sample(l, opts.mesh)?;
    let h_eval = finite(h);
    let m = pade_margins(&u, &cs.complex_points(prec)[0], &indices, &ks, &h_eval, Metric::Euclidean, &ls, &cfg)?;
    let density = sup_distance(&u_poly, &h_eval, &ks, Metric::Euclidean, prec)?
        .value
        .max(sup_distance(&u_poly, g, &ls, Metric::Euclidean, prec)?.value);
    let mut report = WitnessReport {
        kind: WitnessKind::Type1,
        min_hankel_ratio: checks.iter().map(|c| c.hankel_ratio).fold(f64::INFINITY, f64::min),
        degree_ok: exact_degree(&u_poly) == p,
        coprime: true,
        witness: u,
        d,
        n,
        index: p,
        t: None,
        fit_degree: deg,
        s,
        eps,
        target_margin: m.target,
        local_margin: m.local,
        density_margin: density,
        checks,
        pole_margin: None,
        passed: false,
    };
    report.passed = passed(&report);
    Ok(report)
}

/// `u = P/(1 + d·z^q)` with `q = q_n` for the first `n` whose `min_j p_j^{(n)}`
/// reaches `deg P`, and `|d|` half of the largest value keeping
/// `|d z^q P/(1 + d z^q)| ≤ ε/2` on the samples. `d_override` replaces `d`
/// (zero is rejected).
#[allow(clippy::too_many_arguments)]
pub fn type1_witness_qside(
    g: &Polynomial,
    k: &CompactSpec,
    h: &(dyn Fn(&Complex) -> Complex + Sync),
    l: &CompactSpec,
    table: &QSideTable,
    s: u32,
    eps: f64,
    opts: &WitnessOptions,
    d_override: Option<Complex>,
) -> Result<WitnessReport> {
    check_eps(s, eps)?;
    let prec = opts.prec;
    let g_eval = |z: &Complex| g.eval(z);
    let poly = fit_piecewise(k, h, l, &g_eval, eps, opts)?;
    let deg = exact_degree(&poly);
    let n = (1..=table.len())
        .find(|&n| table.q(n) >= 1 && table.p_min(n) >= deg)
        .ok_or(Error::NoUsableIndex)?;
    let q = table.q(n);
    let ks = sample(k, opts.mesh)?;
    let ls = sample(l, opts.mesh)?;
    let zmax = max_modulus(&[k, l]);
    let d = match d_override {
        Some(d) if d.is_zero() => return Err(Error::InvalidArgument("the perturbation d must be nonzero".into())),
        Some(d) => d.with_prec(prec),
        None => {
            let pmax = ks
                .union(&ls)
                .complex_points(prec)
                .iter()
                .map(|z| poly.eval(z).abs())
                .fold(Float::new(prec), |a, b| a.max(&b));
            let z_q = Float::with_val(prec, zmax).pow(q as u32);
            let half = eps / 2.0;
            Complex::from_float(Float::with_val(prec, half / 2.0) / (z_q * (pmax + half)))
        }
    };
    let zero = Complex::zero(prec);
    let den = &Polynomial::constant(Complex::one(prec), &zero) + &Polynomial::monomial(&zero, q, d.clone());
    let u = RationalFunction::new(poly.clone(), den)?;
    let pole_margin = d.abs().recip().root(q as u32).to_f64() / zmax;

    let cfg = PadeConfig::new(prec);
    let indices: Vec<(usize, usize)> = table.ps(n).iter().map(|&p| (p, q)).collect();
    let cs = centers(l, opts)?;
    let checks = center_checks(&u, &cs, &indices, &cfg)?;
    let h_eval = finite(h);
    let m = pade_margins(&u, &cs.complex_points(prec)[0], &indices, &ks, &h_eval, Metric::Euclidean, &ls, &cfg)?;
    let density = sup_distance(&u, &h_eval, &ks, Metric::Euclidean, prec)?
        .value
        .max(sup_distance(&u, g, &ls, Metric::Euclidean, prec)?.value);
    let mut report = WitnessReport {
        kind: WitnessKind::Type1QSide,
        min_hankel_ratio: checks.iter().map(|c| c.hankel_ratio).fold(f64::INFINITY, f64::min),
        degree_ok: exact_degree(u.denominator()) == q,
        coprime: u.is_coprime(),
        witness: u,
        d,
        n,
        index: q,
        t: None,
        fit_degree: deg,
        s,
        eps,
        target_margin: m.target,
        local_margin: m.local,
        density_margin: density,
        checks,
        pole_margin: Some(pole_margin),
        passed: false,
    };
    report.passed = passed(&report) && report.coprime;
    Ok(report)
}

/// `u = (A + d·z^t·B)/B` where `A/B = μ + P`, `μ` the principal parts of `h`
/// inside `K` and `P` a polynomial fit of `h − μ` on `K` and `φ − μ` on `L″`.
/// The index `n` is the first usable one with `p_n > max(deg A, deg B)` and
/// `min_j q_j^{(n)} > deg B`; `t = p_n − deg B`; `d = (ε/4) / max |z|^t`.
/// Expansion centers are sampled from `l`.
#[allow(clippy::too_many_arguments)]
pub fn type2_witness(
    phi: &(dyn Fn(&Complex) -> Complex + Sync),
    h: &RationalFunction,
    k: &CompactSpec,
    l2: &CompactSpec,
    l: &CompactSpec,
    table: &QTable,
    s: u32,
    eps: f64,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    check_eps(s, eps)?;
    let prec = opts.prec;
    let zero = Complex::zero(prec);
    let h = h.with_prec(prec).recenter(&zero);
    let ls_check = sample(l2, opts.mesh)?;
    let mu = principal_parts(&h, k)?;
    for z in ls_check.complex_points(prec) {
        if mu.has_pole_at(&z) {
            return Err(Error::PoleInRegion { distance: 0.0 });
        }
    }
    let h_rest = |z: &Complex| match (h.eval(z), mu.eval(z)) {
        (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) => &a - &b,
        _ => Complex::zero(prec),
    };
    let phi_rest = |z: &Complex| match mu.eval(z) {
        ExtendedComplex::Finite(b) => &phi(z) - &b,
        ExtendedComplex::Infinity => Complex::zero(prec),
    };
    let fit = fit_piecewise(k, &h_rest, l2, &phi_rest, eps, opts)?;
    let b = mu.denominator().recenter(&zero);
    let a = &mu.numerator().recenter(&zero) + &(&fit * &b);
    let (deg_a, deg_b) = (exact_degree(&a), exact_degree(&b));
    let n = table
        .usable()
        .find(|&n| table.p(n) > deg_a.max(deg_b) && table.q_min(n) > deg_b)
        .ok_or(Error::NoUsableIndex)?;
    let p = table.p(n);
    let t = p - deg_b;
    let zmax = max_modulus(&[k, l2]);
    let d = Complex::from_float(Float::with_val(prec, eps / 4.0) / Float::with_val(prec, zmax).pow(t as u32));
    let num = &a + &(&Polynomial::monomial(&zero, t, d.clone()) * &b);
    let u = RationalFunction::new(num, b)?;

    let cfg = PadeConfig::new(prec);
    let indices: Vec<(usize, usize)> = table.qs(n).iter().map(|&q| (p, q)).collect();
    let cs = centers(l, opts)?;
    let checks = center_checks(&u, &cs, &indices, &cfg)?;
    let ks = sample_with_interior(k, opts.mesh)?;
    let ls = sample(l, opts.mesh)?;
    let m = pade_margins(&u, &cs.complex_points(prec)[0], &indices, &ks, &h, Metric::Chordal, &ls, &cfg)?;
    let phi_eval = finite(phi);
    let density = sup_distance(&u, &h, &ks, Metric::Chordal, prec)?
        .value
        .max(sup_distance(&u, &phi_eval, &ls_check, Metric::Euclidean, prec)?.value);
    let mut report = WitnessReport {
        kind: WitnessKind::Type2,
        min_hankel_ratio: checks.iter().map(|c| c.hankel_ratio).fold(f64::INFINITY, f64::min),
        degree_ok: exact_degree(u.numerator()) == p,
        coprime: u.is_coprime(),
        witness: u,
        d,
        n,
        index: p,
        t: Some(t),
        fit_degree: exact_degree(&fit),
        s,
        eps,
        target_margin: m.target,
        local_margin: m.local,
        density_margin: density,
        checks,
        pole_margin: None,
        passed: false,
    };
    report.passed = passed(&report) && report.coprime;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn geometry() -> (CompactSpec, CompactSpec) {
        (CompactSpec::disk(2.5, 0.0, 0.25), CompactSpec::disk(0.0, 0.0, 0.5))
    }

    #[test]
    fn type1_one_on_k_zero_on_l() {
        let (k, l) = geometry();
        let one = |_: &Complex| Complex::one(P);
        let g = Polynomial::zero(P, &Complex::zero(P));
        let table = QTable::linear(200, &[1, 2]).unwrap();
        let r = type1_witness(&g, &k, &one, &l, &table, 10, 0.05, &WitnessOptions::new(P)).unwrap();
        assert!(r.passed, "{:?}", r.margins());
        assert!(r.index > r.fit_degree);
        assert!(r.target_margin < 0.1);
    }

    #[test]
    fn type1_single_polynomial_target() {
        let (k, l) = geometry();
        let g = Polynomial::from_f64(P, &[(1.0, 0.0), (0.0, 2.0)]);
        let gc = g.clone();
        let h = move |z: &Complex| gc.eval(z);
        let table = QTable::linear(50, &[1, 2, 3]).unwrap();
        let r = type1_witness(&g, &k, &h, &l, &table, 10, 0.05, &WitnessOptions::new(P)).unwrap();
        assert!(r.passed);
        assert_eq!(r.fit_degree, 1);
        assert_eq!(r.index, 2);
    }

    #[test]
    fn type1_without_usable_index() {
        let (k, l) = geometry();
        let one = |_: &Complex| Complex::one(P);
        let g = Polynomial::zero(P, &Complex::zero(P));
        let table = QTable::new(vec![1, 1, 1], vec![vec![1]; 3]).unwrap();
        assert!(matches!(
            type1_witness(&g, &k, &one, &l, &table, 10, 0.05, &WitnessOptions::new(P)),
            Err(Error::NoUsableIndex)
        ));
    }

    #[test]
    fn qside_witness_and_zero_perturbation() {
        let (k, l) = geometry();
        let one = |_: &Complex| Complex::one(P);
        let g = Polynomial::zero(P, &Complex::zero(P));
        let table = QSideTable::new(vec![3; 100], (1..=100).map(|n| vec![n, n + 1]).collect()).unwrap();
        let opts = WitnessOptions::new(P);
        let r = type1_witness_qside(&g, &k, &one, &l, &table, 10, 0.05, &opts, None).unwrap();
        assert!(r.passed, "{:?} {:?}", r.margins(), r.pole_margin);
        assert!(r.pole_margin.unwrap() > 1.0);
        assert!(matches!(
            type1_witness_qside(&g, &k, &one, &l, &table, 10, 0.05, &opts, Some(Complex::zero(P))),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn type2_pole_inside_k() {
        let (k, l) = geometry();
        let l2 = CompactSpec::disk(0.0, 0.0, 0.6);
        // h = 1/(z − 2.5)
        let h = RationalFunction::new(
            Polynomial::from_f64(P, &[(1.0, 0.0)]),
            Polynomial::from_f64(P, &[(-2.5, 0.0), (1.0, 0.0)]),
        )
        .unwrap();
        let zero = |_: &Complex| Complex::zero(P);
        let table = QTable::new((1..=120).collect(), (1..=120).map(|n| vec![n / 4 + 1, n / 4 + 2]).collect()).unwrap();
        let r = type2_witness(&zero, &h, &k, &l2, &l, &table, 10, 0.05, &WitnessOptions::new(P)).unwrap();
        assert!(r.passed, "{:?} ratio {}", r.margins(), r.min_hankel_ratio);
        assert!(r.coprime);
        assert_eq!(r.index, r.t.unwrap() + 1);
    }

    #[test]
    fn type2_polynomial_target_has_no_principal_part() {
        let (k, l) = geometry();
        let l2 = CompactSpec::disk(0.0, 0.0, 0.6);
        let h = RationalFunction::from_polynomial(Polynomial::from_f64(P, &[(0.0, 0.0), (1.0, 0.0)]));
        let zero = |_: &Complex| Complex::zero(P);
        let table = QTable::linear(120, &[1, 2]).unwrap();
        let r = type2_witness(&zero, &h, &k, &l2, &l, &table, 10, 0.05, &WitnessOptions::new(P)).unwrap();
        assert!(r.passed);
        assert_eq!(r.t, Some(r.index));
    }
}
