//! Members of the linear span of nested constructions: `g_l` is built over
//! the indices where `g_{l−1}` approximates 0, so `Σ a_l g_l` inherits the
//! approximation of `g_D` at the indices of `g_D`.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::sample;
use crate::num::Complex;
use crate::pade::PadeConfig;
use crate::series::{Polynomial, PowerSeries};
use crate::universal::builder::{build_with, check_blocks, BuildConfig, ConstructionTranscript, InvariantReport};
use crate::universal::enumeration::{GaussRat, TargetPoly};
use crate::universal::table::QTable;

#[derive(Clone, Debug, Serialize)]
pub struct SpanEntry {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub target: TargetPoly,
    /// Sampled `sup_K |S_p(g) − a_D·target|`.
    pub margin: f64,
    /// `Σ_{l<D} |a_l| e_l + |a_D| e_D` from the level transcripts.
    pub budget: f64,
    pub within_budget: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanReport {
    pub depth: usize,
    pub coefficients: Vec<Complex>,
    pub levels: Vec<ConstructionTranscript>,
    pub entries: Vec<SpanEntry>,
    pub invariants: InvariantReport,
    pub passed: bool,
}

/// Builds `g = Σ a_l g_l` for `D = systems.len()` nested levels. Levels
/// `l < D` run `2·steps` steps alternating enumerated targets (odd steps)
/// with the zero target on the same compact (even steps); level `l + 1` may
/// only use the indices of the zero steps of level `l`. The last level runs
/// `steps` steps of the enumeration.
pub fn build_span_member(
    base: &BuildConfig,
    systems: &[QTable],
    coefficients: &[Complex],
    depth_cap: usize,
) -> Result<(PowerSeries, SpanReport)> {
    let depth = systems.len();
    if depth == 0 {
        return Err(Error::InvalidArgument("need at least one system".into()));
    }
    if depth > depth_cap {
        return Err(Error::DepthCapExceeded { depth, cap: depth_cap });
    }
    if coefficients.len() != depth {
        return Err(Error::LengthMismatch(depth, coefficients.len()));
    }
    if coefficients.iter().any(Complex::is_zero) {
        return Err(Error::InvalidArgument("span coefficients must be nonzero".into()));
    }
    base.enumeration.validate()?;
    let prec = base.prec;
    let zero_target = TargetPoly {
        coeffs: vec![GaussRat::int(0, 0)],
    };
    let mut levels: Vec<ConstructionTranscript> = Vec::with_capacity(depth);
    let mut allowed: Option<Vec<usize>> = None;
    for (l, table) in systems.iter().enumerate() {
        let last = l + 1 == depth;
        let mut cfg = base.clone();
        cfg.table = match &allowed {
            Some(a) => table.clone().restricted(a.iter().copied())?,
            None => table.clone(),
        };
        cfg.steps = if last { base.steps } else { 2 * base.steps };
        let (_, tr) = if last {
            build_with(&cfg, |n| base.enumeration.step(n))?
        } else {
            build_with(&cfg, |n| {
                let mut a = base.enumeration.step(n.div_ceil(2))?;
                if n % 2 == 0 {
                    a.j = 0;
                    a.target = zero_target.clone();
                }
                Ok(a)
            })?
        };
        if !last {
            allowed = Some(tr.steps.iter().filter(|s| s.n % 2 == 0).map(|s| s.k).collect());
        }
        levels.push(tr);
    }

    let center = base.center.with_prec(prec);
    let mut sum = Polynomial::zero(prec, &center);
    let mut order = 0;
    for (tr, a) in levels.iter().zip(coefficients) {
        sum = &sum + &tr.partial_sum.scale(&a.with_prec(prec));
        let last = tr.steps.last().expect("levels have steps");
        order = order.max(last.p + last.t - 1);
    }
    let g = sum.to_series(order);

    let top = levels.last().expect("depth ≥ 1");
    let a_top = coefficients[depth - 1].with_prec(prec);
    let mut entries = Vec::new();
    for step in &top.steps {
        let mut budget = a_top.abs_f64() * step.error;
        for (tr, a) in levels[..depth - 1].iter().zip(coefficients) {
            let e = tr
                .steps
                .iter()
                .find(|s| s.k == step.k)
                .map(|s| s.error)
                .ok_or_else(|| Error::InvalidArgument(format!("index {} missing from a lower level", step.k)))?;
            budget += a.abs_f64() * e;
        }
        let s_p = g.partial_sum(step.p as i64)?;
        let target = step.target.to_polynomial(prec);
        let margin = sample(&step.compact, base.check_mesh)?
            .complex_points(prec)
            .iter()
            .map(|z| (s_p.eval(z) - &a_top * &target.eval(z)).abs())
            .fold(Float::new(prec), |m, v| m.max(&v))
            .to_f64();
        entries.push(SpanEntry {
            n: step.n,
            k: step.k,
            p: step.p,
            target: step.target.clone(),
            margin,
            budget,
            within_budget: margin <= budget * (1.0 + 1e-9),
        });
    }
    let invariants = check_blocks(&g, &top.indices(), &PadeConfig::new(prec))?;
    let passed = invariants.all_hold && entries.iter().all(|e| e.within_budget);
    Ok((
        g,
        SpanReport {
            depth,
            coefficients: coefficients.to_vec(),
            levels,
            entries,
            invariants,
            passed,
        },
    ))
}
