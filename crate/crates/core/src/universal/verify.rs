//! Search of a table prefix for an index at which every Padé approximant
//! approximates a target on `K` and the series itself on a check set.

use serde::Serialize;

use crate::geometry::SampledSet;
use crate::pade::{compute_pade, PadeConfig, PadeIndex};
use crate::series::{Evaluable, PowerSeries};
use crate::sphere::{sup_distance, Metric};
use crate::universal::table::QTable;

#[derive(Clone, Debug, Serialize)]
pub struct JMargin {
    pub q: usize,
    /// `sup_K |[f; p/q] − h|`.
    pub target_margin: f64,
    /// `sup_L |[f; p/q] − f|`.
    pub local_margin: f64,
}

impl JMargin {
    fn worst(&self) -> f64 {
        self.target_margin.max(self.local_margin)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    /// Table index `n` that passed, if any.
    pub found: Option<usize>,
    pub p: Option<usize>,
    pub s: u32,
    pub margins: Vec<JMargin>,
    /// `max_j` of both margins at the found index.
    pub max_margin: Option<f64>,
    /// Number of table indices examined.
    pub scanned: usize,
    /// Smallest `max_j` margin seen over indices where every approximant
    /// existed.
    pub best_margin: Option<(usize, f64)>,
}

impl Verdict {
    pub fn is_found(&self) -> bool {
        self.found.is_some()
    }
}

/// Margins at index `n`; `None` as soon as some `[f; p_n/q_j]` fails to exist.
#[allow(clippy::too_many_arguments)]
fn margins_at<H>(
    f: &PowerSeries,
    table: &QTable,
    n: usize,
    k: &SampledSet,
    h: &H,
    l_check: &SampledSet,
    cfg: &PadeConfig,
    bound: f64,
) -> Option<(Vec<JMargin>, bool)>
where
    H: Evaluable + ?Sized,
{
    let p = table.p(n);
    let mut out = Vec::new();
    let mut ok = true;
    for &q in table.qs(n) {
        let r = compute_pade(f, PadeIndex::new(p, q), cfg).ok()?;
        let prec = f.prec();
        let target_margin = sup_distance(&r.value, h, k, Metric::Euclidean, prec).ok()?.value;
        let local_margin = sup_distance(&r.value, f, l_check, Metric::Euclidean, prec).ok()?.value;
        let m = JMargin {
            q,
            target_margin,
            local_margin,
        };
        ok &= m.worst() < bound;
        out.push(m);
        if !ok {
            break;
        }
    }
    Some((out, ok))
}

/// Scans the usable table indices `n` with `p_n + max_j q_j ≤ order(f)` in
/// increasing order and stops at the first one where, for every `j`,
/// `[f; p_n/q_j]` exists, `sup_K |[f; p_n/q_j] − h| < 1/s` and
/// `sup_L |[f; p_n/q_j] − f| < 1/s`. Exhausting the prefix is a verdict.
pub fn verify_universality<H>(
    f: &PowerSeries,
    table: &QTable,
    k: &SampledSet,
    h: &H,
    l_check: &SampledSet,
    s: u32,
    cfg: &PadeConfig,
) -> Verdict
where
    H: Evaluable + ?Sized,
{
    let bound = 1.0 / s as f64;
    let mut verdict = Verdict {
        found: None,
        p: None,
        s,
        margins: Vec::new(),
        max_margin: None,
        scanned: 0,
        best_margin: None,
    };
    for n in table.usable() {
        if table.p(n) + table.q_max(n) > f.order() {
            continue;
        }
        verdict.scanned += 1;
        let Some((margins, ok)) = margins_at(f, table, n, k, h, l_check, cfg, bound) else {
            continue;
        };
        let worst = margins.iter().map(JMargin::worst).fold(0.0, f64::max);
        if margins.len() == table.count(n) && verdict.best_margin.is_none_or(|(_, b)| worst < b) {
            verdict.best_margin = Some((n, worst));
        }
        if ok {
            verdict.found = Some(n);
            verdict.p = Some(table.p(n));
            verdict.max_margin = Some(worst);
            verdict.margins = margins;
            break;
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample, CompactSpec};
    use crate::num::Complex;
    use crate::series::Polynomial;

    #[test]
    fn polynomial_is_found_with_zero_margins() {
        let prec = 128;
        let f = Polynomial::from_f64(prec, &[(1.0, 0.0), (2.0, 0.0), (0.0, 1.0)]).to_series(12);
        let table = QTable::new((1..=10).collect(), vec![vec![0]; 10]).unwrap();
        let k = sample(&CompactSpec::disk(2.5, 0.0, 0.25), 0.05).unwrap();
        let l = sample(&CompactSpec::disk(0.0, 0.0, 0.5), 0.05).unwrap();
        // p = 1 drops the z² term, which is large on K; p = 2 reproduces f.
        let v = verify_universality(&f, &table, &k, &f, &l, 1000, &PadeConfig::new(prec));
        assert_eq!(v.found, Some(2));
        assert_eq!(v.max_margin, Some(0.0));
    }

    #[test]
    fn geometric_series_is_exhausted() {
        let prec = 128;
        let f = crate::series::PowerSeries::geometric(prec, 30);
        let table = QTable::linear(25, &[0]).unwrap();
        let k = sample(&CompactSpec::disk(2.5, 0.0, 0.25), 0.05).unwrap();
        let l = sample(&CompactSpec::disk(0.0, 0.0, 0.5), 0.05).unwrap();
        let zero = crate::num::ExtendedComplex::Finite(Complex::zero(prec));
        let v = verify_universality(&f, &table, &k, &zero, &l, 100, &PadeConfig::new(prec));
        assert!(!v.is_found());
        assert_eq!(v.scanned, 25);
        assert!(v.best_margin.unwrap().1 > 1.0);
    }
}
