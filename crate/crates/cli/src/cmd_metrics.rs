use std::path::Path;

use serde_json::json;

use universal_pade::geometry::sample_with_interior;
use universal_pade::pade::compute_pade;
use universal_pade::sphere::{chordal as chi, rho_c, rho_d, sup_distance, Metric, SupReport};
use universal_pade::universal::build_universal_series;
use universal_pade::PadeIndex;

use crate::config::ExperimentConfig;
use crate::output::Written;
use crate::{parse, CliError};

fn check_prec(prec: u32) -> Result<(), CliError> {
    if prec < 53 {
        return Err(CliError::Usage(format!("precision must be at least 53 bits, got {prec}")));
    }
    Ok(())
}

pub fn chordal(a: &str, b: &str, prec: u32) -> Result<(), CliError> {
    check_prec(prec)?;
    let d = chi(&parse::extended(prec, a)?, &parse::extended(prec, b)?, prec);
    println!("{}", json!({ "chordal": d.to_f64() }));
    Ok(())
}

pub fn sequences(a: &str, b: &str, prec: u32) -> Result<(), CliError> {
    check_prec(prec)?;
    let (a, b) = (parse::complex_list(prec, a)?, parse::complex_list(prec, b)?);
    let c = rho_c(&a, &b).map_err(|e| CliError::Usage(e.to_string()))?;
    let d = rho_d(&a, &b).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{}", json!({ "rho_c": c, "rho_d": d }));
    Ok(())
}

pub fn sup(path: &Path, p: usize, q: usize, target: &str, m: usize, chordal: bool) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let h = parse::target(target)?.to_polynomial(cfg.precision);
    let k = cfg
        .enumeration
        .compact(m)
        .map_err(|e| CliError::Usage(format!("compact {m}: {e}")))?;
    let samples = sample_with_interior(&k, cfg.tolerances.mesh)?;
    let (f, _) = build_universal_series(&cfg.build_config()?)?;
    let r = compute_pade(&f, PadeIndex::new(p, q), &cfg.pade_config())?;
    let metric = if chordal { Metric::Chordal } else { Metric::Euclidean };
    let report = sup_distance(&r.value, &h, &samples, metric, cfg.precision)?;
    let mut out = Written::default();
    out.write(
        &cfg.output_dir(),
        "sup.csv",
        &format!("{}\n{}\n", SupReport::CSV_HEADER, report.csv_row()),
    )?;
    out.report();
    println!("sup {} distance {:e}", metric.name(), report.value);
    Ok(())
}
