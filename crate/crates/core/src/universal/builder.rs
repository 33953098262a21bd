//! Step-by-step construction of a power series whose partial sums at the
//! recorded indices approximate the enumerated targets outside the domain
//! while the zero blocks after each index make the Padé approximants equal
//! those partial sums.

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{adaptive_fit_weighted, AdaptiveFit, PieceTarget};
use crate::geometry::{inner_exhaustion, sample, CompactSpec, DomainSpec, SampledSet};
use crate::num::Complex;
use crate::pade::{compute_pade, is_in_d, PadeConfig, PadeIndex};
use crate::series::{Polynomial, PowerSeries};
use crate::universal::enumeration::{Assignment, TargetEnumeration, TargetPoly};
use crate::universal::table::QTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Blocks are also kept small on the inner exhaustion `L_n` of the domain.
    Holomorphic,
    /// Only the outer compacts are constrained.
    Formal,
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub domain: DomainSpec,
    pub center: Complex,
    pub table: QTable,
    pub enumeration: TargetEnumeration,
    pub steps: usize,
    pub mode: Mode,
    pub prec: u32,
    pub fit: AdaptiveFit,
    /// Mesh of the samples on which step errors are measured.
    pub check_mesh: f64,
}

impl BuildConfig {
    pub fn new(domain: DomainSpec, table: QTable, enumeration: TargetEnumeration, steps: usize, prec: u32) -> Self {
        BuildConfig {
            domain,
            center: Complex::zero(prec),
            table,
            enumeration,
            steps,
            mode: Mode::Holomorphic,
            prec,
            fit: AdaptiveFit::default(),
            check_mesh: 0.01,
        }
    }
}

/// One step of the build.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub n: usize,
    pub pair: usize,
    pub m: usize,
    pub j: usize,
    pub target: TargetPoly,
    pub compact: CompactSpec,
    /// Inner compact where the block is kept small (holomorphic mode).
    pub inner: Option<CompactSpec>,
    pub k: usize,
    pub p: usize,
    /// Order of the zero of `H_n − c_n (z − ζ)^p` at `ζ`.
    pub shift: usize,
    pub t: usize,
    pub qs: Vec<usize>,
    pub fit_degree: usize,
    pub h: Polynomial,
    pub block: Polynomial,
    pub c: Complex,
    /// Sampled `sup |w̃_n − (z − ζ)^shift h_n|`.
    pub fit_error: f64,
    /// Sampled `sup |w̃_n − H_n|`.
    pub error: f64,
    pub budget: f64,
    /// `max |z − ζ|` over the constrained compacts.
    pub modulus_bound: f64,
}

/// Append-only record of a build.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionTranscript {
    pub center: Complex,
    pub precision_bits: u32,
    pub mode: Mode,
    pub steps: Vec<StepRecord>,
    /// `H_1 + … + H_n` after the last recorded step.
    pub partial_sum: Polynomial,
}

/// Per-index outcome of the invariant checks.
#[derive(Clone, Debug, Serialize)]
pub struct IndexCheck {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    pub pivot_nonzero: bool,
    pub zero_block: bool,
    /// `deg H_n = p` (transcript checks only).
    pub degree: Option<bool>,
    /// `S_p = H_1 + … + H_n` (transcript checks only).
    pub partial_sum: Option<bool>,
    pub pade: Vec<PadeCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PadeCheck {
    pub q: usize,
    pub hankel_ratio: f64,
    /// Max coefficient gap between `[f; p/q]` and `S_p`, `None` if the
    /// approximant could not be computed.
    pub gap: Option<f64>,
    pub holds: bool,
}

impl IndexCheck {
    pub fn holds(&self) -> bool {
        self.pivot_nonzero
            && self.zero_block
            && self.degree.unwrap_or(true)
            && self.partial_sum.unwrap_or(true)
            && self.pade.iter().all(|c| c.holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub checks: Vec<IndexCheck>,
    pub all_hold: bool,
}

/// A recorded index: `p`, the gap `t` and the `q` list.
#[derive(Clone, Debug, Serialize)]
pub struct BlockIndex {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    pub qs: Vec<usize>,
}

/// Zero-block and Padé-equals-partial-sum checks of `f` at the given indices.
pub fn check_blocks(f: &PowerSeries, indices: &[BlockIndex], cfg: &PadeConfig) -> Result<InvariantReport> {
    let mut checks = Vec::with_capacity(indices.len());
    for b in indices {
        let last = b.p + b.t - 1;
        if last > f.order() {
            return Err(Error::TruncationExceeded {
                requested: last,
                available: f.order(),
            });
        }
        let pivot_nonzero = !f.coeffs()[b.p].is_zero();
        let zero_block = f.coeffs()[b.p + 1..=last].iter().all(Complex::is_zero);
        let s = f.partial_sum(b.p as i64)?;
        let scale = s.coeffs().iter().fold(Float::with_val(f.prec(), 1), |m, c| m.max(&c.abs()));
        let tol = Float::with_val(f.prec(), &cfg.residual_tol * &scale);
        let mut pade = Vec::with_capacity(b.qs.len());
        for &q in &b.qs {
            let idx = PadeIndex::new(b.p, q);
            let hankel_ratio = if q == 0 { 1.0 } else { is_in_d(f, idx, cfg)?.ratio };
            let gap = compute_pade(f, idx, cfg).ok().map(|r| {
                let num = r.value.numerator();
                let den = r.value.denominator();
                let mut g = Float::new(f.prec());
                for k in 0..num.coeffs().len().max(b.p + 1) {
                    g.max_mut(&(num.coeff(k) - s.coeff(k)).abs());
                }
                for k in 0..den.coeffs().len() {
                    let expect = if k == 0 { Complex::one(f.prec()) } else { Complex::zero(f.prec()) };
                    g.max_mut(&(den.coeff(k) - expect).abs());
                }
                g
            });
            pade.push(PadeCheck {
                q,
                hankel_ratio,
                holds: gap.as_ref().is_some_and(|g| *g <= tol),
                gap: gap.map(|g| g.to_f64()),
            });
        }
        checks.push(IndexCheck {
            n: b.n,
            p: b.p,
            t: b.t,
            pivot_nonzero,
            zero_block,
            degree: None,
            partial_sum: None,
            pade,
        });
    }
    let all_hold = checks.iter().all(IndexCheck::holds);
    Ok(InvariantReport { checks, all_hold })
}

fn exact_degree(p: &Polynomial) -> Option<usize> {
    p.coeffs().iter().rposition(|c| !c.is_zero())
}

impl ConstructionTranscript {
    pub fn indices(&self) -> Vec<BlockIndex> {
        self.steps
            .iter()
            .map(|s| BlockIndex {
                n: s.n,
                p: s.p,
                t: s.t,
                qs: s.qs.clone(),
            })
            .collect()
    }

    /// The series `H_1 + … + H_N` through order `p_{k_N} + t_N − 1`.
    pub fn series(&self) -> Result<PowerSeries> {
        let last = self.steps.last().ok_or(Error::NoUsableIndex)?;
        Ok(self.partial_sum.to_series(last.p + last.t - 1))
    }

    /// All transcript invariants of `f` (normally `self.series()`).
    pub fn check_invariants(&self, f: &PowerSeries, cfg: &PadeConfig) -> Result<InvariantReport> {
        let mut report = check_blocks(f, &self.indices(), cfg)?;
        let mut sum = Polynomial::zero(self.precision_bits, &self.center);
        for (check, step) in report.checks.iter_mut().zip(&self.steps) {
            check.degree = Some(exact_degree(&step.block) == Some(step.p) && step.block.coeff(step.p).exactly_equals(&step.c));
            sum = &sum + &step.block;
            let s = f.partial_sum(step.p as i64)?;
            check.partial_sum = Some((0..=step.p).all(|k| s.coeff(k).exactly_equals(&sum.coeff(k))));
        }
        report.all_hold = report.checks.iter().all(IndexCheck::holds);
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub const CSV_HEADER: &'static str = "n,k_n,p_k,t_n,degree,error,budget";

    pub fn csv_summary(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{:e},{:e}\n",
                s.n, s.k, s.p, s.t, s.fit_degree, s.error, s.budget
            ));
        }
        out
    }
}

fn modulus_bound(specs: &[&CompactSpec], center: &Complex) -> f64 {
    let (cr, ci) = center.to_f64();
    specs
        .iter()
        .map(|s| {
            let (c, r) = s.bounding_disk();
            (c[0] - cr).hypot(c[1] - ci) + r
        })
        .fold(0.0, f64::max)
}

/// Smallest usable `k > after` with `p_k ≥ need + max(q_max(k), 1)`.
fn choose_index(table: &QTable, after: usize, need: usize) -> Result<usize> {
    table
        .usable()
        .find(|&k| k > after && table.p(k) >= need + table.q_max(k).max(1))
        .ok_or(Error::NoUsableIndex)
}

fn failed(step: usize, transcript: &ConstructionTranscript, source: Error) -> Error {
    Error::ConstructionFailed {
        step,
        transcript: Box::new(transcript.clone()),
        source: Box::new(source),
    }
}

/// Runs the build with an explicit per-step assignment.
pub(crate) fn build_with<A>(cfg: &BuildConfig, assign: A) -> Result<(PowerSeries, ConstructionTranscript)>
where
    A: Fn(usize) -> Result<Assignment>,
{
    if cfg.steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    cfg.table.validate()?;
    let prec = cfg.prec;
    let zeta = cfg.center.with_prec(prec);
    let (zr, zi) = zeta.to_f64();
    let mut transcript = ConstructionTranscript {
        center: zeta.clone(),
        precision_bits: prec,
        mode: cfg.mode,
        steps: Vec::with_capacity(cfg.steps),
        partial_sum: Polynomial::zero(prec, &zeta),
    };
    let mut shift = 0usize;
    let mut last_k = 0usize;
    for n in 1..=cfg.steps {
        let step = (|| -> Result<StepRecord> {
            let a = assign(n)?;
            a.compact.validate()?;
            if a.compact.contains([zr, zi], 0.0) {
                return Err(Error::InvalidArgument(format!("compact {} contains the center", a.m)));
            }
            let inner = match cfg.mode {
                Mode::Holomorphic => Some(inner_exhaustion(&cfg.domain, n + 1)?),
                Mode::Formal => None,
            };
            let budget = Float::with_val(prec, 1) / Float::with_val(prec, n * n);
            let target = a.target.to_polynomial(prec);
            let s_prev = transcript.partial_sum.clone();
            let outer = |z: &Complex| target.eval(z) - s_prev.eval(z);
            let zero = |_: &Complex| Complex::zero(prec);
            // w_n = w̃_n / (z − ζ)^shift, on sampled values.
            let shifted = |z: &Complex| &outer(z) / &(z - &zeta).powu(shift as u32);
            let mut pieces = vec![PieceTarget {
                spec: a.compact.clone(),
                target: &shifted,
            }];
            if let Some(l) = &inner {
                pieces.push(PieceTarget {
                    spec: l.clone(),
                    target: &zero,
                });
            }
            let half = Float::with_val(prec, &budget / 2u32);
            let fit = adaptive_fit_weighted(&pieces, &zeta, &half, &cfg.fit, Some((zeta.clone(), shift as u32)), prec)?;
            let sup0 = fit.worst_error();
            let h = fit.polynomial.clone();
            let k = choose_index(&cfg.table, last_k, shift + fit.degree)?;
            let p = cfg.table.p(k);
            let mut specs = vec![&a.compact];
            specs.extend(inner.iter());
            let m_bound = modulus_bound(&specs, &zeta);
            let c = Float::with_val(prec, &budget - &sup0)
                / (Float::with_val(prec, 2u32) * Float::with_val(prec, m_bound).pow(p as u32));
            let c = Complex::from_float(c);
            let block = &h.shift_up(shift) + &Polynomial::monomial(&zeta, p, c.clone());

            let mut check = sample(&a.compact, cfg.check_mesh)?;
            let n_outer = check.len();
            if let Some(l) = &inner {
                check = check.union(&sample(l, cfg.check_mesh)?);
            }
            let error = sampled_error(&check, n_outer, &outer, &block, prec);
            if error >= budget {
                return Err(Error::StepBudgetMissed {
                    error: error.to_f64(),
                    budget: budget.to_f64(),
                });
            }
            let t = 1 + cfg.table.q_max(k);
            Ok(StepRecord {
                n,
                pair: a.pair,
                m: a.m,
                j: a.j,
                target: a.target,
                compact: a.compact,
                inner,
                k,
                p,
                shift,
                t,
                qs: cfg.table.qs(k).to_vec(),
                fit_degree: fit.degree,
                h,
                block,
                c,
                fit_error: sup0.to_f64(),
                error: error.to_f64(),
                budget: budget.to_f64(),
                modulus_bound: m_bound,
            })
        })()
        .map_err(|e| failed(n, &transcript, e))?;
        transcript.partial_sum = &transcript.partial_sum + &step.block;
        shift = step.p + step.t;
        last_k = step.k;
        transcript.steps.push(step);
    }
    let f = transcript.series()?;
    Ok((f, transcript))
}

/// `sup |w̃ − H|` with `w̃` given by `outer` on the first `n_outer` samples
/// and zero on the rest.
fn sampled_error<F>(set: &SampledSet, n_outer: usize, outer: &F, block: &Polynomial, prec: u32) -> Float
where
    F: Fn(&Complex) -> Complex + Sync,
{
    use rayon::prelude::*;
    set.complex_points(prec)
        .par_iter()
        .enumerate()
        .map(|(i, z)| {
            let w = if i < n_outer { outer(z) } else { Complex::zero(prec) };
            (w - block.eval(z)).abs()
        })
        .reduce(|| Float::new(prec), |a, b| a.max(&b))
}

/// Builds `f = Σ H_n` for `steps` steps of the enumeration. A failure at step
/// `n` is reported as [`Error::ConstructionFailed`] carrying the transcript
/// of steps `1..n`.
pub fn build_universal_series(cfg: &BuildConfig) -> Result<(PowerSeries, ConstructionTranscript)> {
    cfg.enumeration.validate()?;
    build_with(cfg, |n| cfg.enumeration.step(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universal::enumeration::{CompactFamily, Repetition, TargetFamily};

    const P: u32 = 256;

    pub(crate) fn desk_config(steps: usize) -> BuildConfig {
        let enumeration = TargetEnumeration::new(
            CompactFamily::List(vec![CompactSpec::disk(2.5, 0.0, 0.25)]),
            TargetFamily::List(
                ["poly:1", "poly:0,1", "poly:0,0,1"]
                    .iter()
                    .map(|s| s.parse().unwrap())
                    .collect(),
            ),
            Repetition::InfiniteRepeat,
        );
        BuildConfig::new(DomainSpec::unit_disk(), QTable::linear(400, &[1, 2]).unwrap(), enumeration, steps, P)
    }

    #[test]
    fn first_step() {
        let (f, tr) = build_universal_series(&desk_config(1)).unwrap();
        let s = &tr.steps[0];
        assert_eq!(s.t, 3);
        assert_eq!(exact_degree(&s.block), Some(s.p));
        assert!(s.error < 1.0);
        assert_eq!(s.inner, Some(CompactSpec::disk(0.0, 0.0, 0.5)));
        assert_eq!(f.order(), s.p + 2);
    }

    #[test]
    fn zero_block_after_two_steps() {
        let (f, tr) = build_universal_series(&desk_config(2)).unwrap();
        let p = tr.steps[0].p;
        assert!(f.coeff(p + 1).unwrap().is_zero() && f.coeff(p + 2).unwrap().is_zero());
        assert!(f.coeff(p).unwrap().exactly_equals(&tr.steps[0].c));
        assert!(!tr.steps[0].c.is_zero());
        assert_eq!(tr.steps[1].shift, p + 3);
        let rep = tr.check_invariants(&f, &PadeConfig::new(P)).unwrap();
        assert!(rep.all_hold);
        assert_eq!(tr.csv_summary().lines().count(), 3);
    }

    #[test]
    fn formal_mode_drops_inner_sets() {
        let mut cfg = desk_config(3);
        cfg.mode = Mode::Formal;
        let (f, tr) = build_universal_series(&cfg).unwrap();
        assert!(tr.steps.iter().all(|s| s.inner.is_none()));
        assert!(tr.check_invariants(&f, &PadeConfig::new(P)).unwrap().all_hold);
    }

    #[test]
    fn failure_carries_partial_transcript() {
        let mut cfg = desk_config(3);
        cfg.table = QTable::linear(12, &[1, 2]).unwrap();
        match build_universal_series(&cfg) {
            Err(Error::ConstructionFailed { step, transcript, source }) => {
                assert_eq!(transcript.steps.len(), step - 1);
                assert!(matches!(*source, Error::NoUsableIndex));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compact_through_the_center_is_rejected() {
        let mut cfg = desk_config(1);
        cfg.enumeration.compacts = CompactFamily::List(vec![CompactSpec::disk(0.0, 0.0, 2.0)]);
        assert!(build_universal_series(&cfg).is_err());
    }

    #[test]
    fn builds_are_deterministic() {
        let a = build_universal_series(&desk_config(3)).unwrap().1.to_json();
        let b = build_universal_series(&desk_config(3)).unwrap().1.to_json();
        assert_eq!(a, b);
    }
}
