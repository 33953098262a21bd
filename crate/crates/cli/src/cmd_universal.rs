use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use universal_pade::geometry::{inner_exhaustion, sample, sample_with_interior, CompactSpec};
use universal_pade::universal::{
    build_span_member, build_universal_series, schedule_systems, type1_witness, type1_witness_qside,
    type2_witness, verify_universality, SystemCount, WitnessOptions, WitnessReport,
};
use universal_pade::{Complex, Error, PowerSeries, RationalFunction};

use crate::config::ExperimentConfig;
use crate::output::Written;
use crate::{parse, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Type1,
    Qside,
    Type2,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub const COEFFICIENT_HEADER: &str = "k,abs,re,im";

fn coefficient_csv(f: &PowerSeries) -> String {
    let mut out = format!("{COEFFICIENT_HEADER}\n");
    for (k, c) in f.coeffs().iter().enumerate() {
        let (re, im) = c.to_f64();
        out.push_str(&format!("{k},{:e},{re:e},{im:e}\n", c.abs_f64()));
    }
    out
}

fn load(path: &Path, steps: Option<usize>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = steps {
        cfg.steps = s;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn series(cfg: &ExperimentConfig) -> Result<PowerSeries, CliError> {
    Ok(build_universal_series(&cfg.build_config()?)?.0)
}

fn compact(cfg: &ExperimentConfig, m: usize) -> Result<CompactSpec, CliError> {
    cfg.enumeration
        .compact(m)
        .map_err(|e| CliError::Usage(format!("compact {m}: {e}")))
}

pub fn build(path: &Path, steps: Option<usize>) -> Result<(), CliError> {
    let cfg = load(path, steps)?;
    let dir = cfg.output_dir();
    let mut out = Written::default();
    match build_universal_series(&cfg.build_config()?) {
        Ok((f, tr)) => {
            let report = tr.check_invariants(&f, &cfg.pade_config())?;
            out.write(&dir, "transcript.json", &tr.to_json())?;
            out.write(&dir, "summary.csv", &tr.csv_summary())?;
            out.write(&dir, "coefficients.csv", &coefficient_csv(&f))?;
            out.write(&dir, "invariants.json", &json(&report))?;
            out.report();
            println!(
                "{} steps, series order {}, invariants {}",
                tr.steps.len(),
                f.order(),
                if report.all_hold { "hold" } else { "FAIL" }
            );
            if report.all_hold {
                Ok(())
            } else {
                Err(CliError::Check("block invariants failed".into()))
            }
        }
        Err(Error::ConstructionFailed {
            step,
            transcript,
            source,
        }) => {
            out.write(&dir, "transcript.partial.json", &transcript.to_json())?;
            out.write(&dir, "summary.partial.csv", &transcript.csv_summary())?;
            out.report();
            Err(Error::ConstructionFailed {
                step,
                transcript,
                source,
            }
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn verify(path: &Path, target: &str, s: u32, m: usize, steps: Option<usize>) -> Result<(), CliError> {
    if s == 0 {
        return Err(CliError::Usage("s must be positive".into()));
    }
    let cfg = load(path, steps)?;
    let h = parse::target(target)?.to_polynomial(cfg.precision);
    let mesh = cfg.tolerances.mesh;
    let k = sample_with_interior(&compact(&cfg, m)?, mesh)?;
    let l = sample(&cfg.check_set()?, mesh)?;
    let f = series(&cfg)?;
    let table = cfg.table.resolve()?;
    let v = verify_universality(&f, &table, &k, &h, &l, s, &cfg.pade_config());
    let mut csv = String::from("q,target_margin,local_margin\n");
    for j in &v.margins {
        csv.push_str(&format!("{},{:e},{:e}\n", j.q, j.target_margin, j.local_margin));
    }
    let dir = cfg.output_dir();
    let mut out = Written::default();
    out.write(&dir, "verdict.json", &json(&v))?;
    out.write(&dir, "margins.csv", &csv)?;
    out.report();
    match (v.found, v.max_margin) {
        (Some(n), Some(margin)) => {
            println!("found n = {n}, p = {}, max margin {margin:e} < 1/{s}", table.p(n));
            Ok(())
        }
        _ => Err(CliError::Exhausted(format!(
            "no index among {} scanned approximates {target} within 1/{s}",
            v.scanned
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn witness(
    path: &Path,
    kind: Kind,
    target: &str,
    local: &str,
    s: u32,
    eps: f64,
    m: usize,
) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let prec = cfg.precision;
    let k = compact(&cfg, m)?;
    let l = cfg.check_set()?;
    let mut opts = WitnessOptions::new(prec);
    opts.fit = cfg.tolerances.fit();
    let g = parse::target(local)?.to_polynomial(prec);
    let report: WitnessReport = match kind {
        Kind::Type1 | Kind::Qside => {
            let t = parse::target(target)?.to_polynomial(prec);
            let h = move |z: &Complex| t.eval(z);
            if kind == Kind::Type1 {
                type1_witness(&g, &k, &h, &l, &cfg.table.resolve()?, s, eps, &opts)?
            } else {
                let table = cfg
                    .qside_table
                    .as_ref()
                    .ok_or_else(|| CliError::Config("qside witness needs qside_table".into()))?;
                type1_witness_qside(&g, &k, &h, &l, table, s, eps, &opts, None)?
            }
        }
        Kind::Type2 => {
            let h = if target.starts_with("rational:") {
                parse::rational(prec, target)?
            } else {
                RationalFunction::from_polynomial(parse::target(target)?.to_polynomial(prec))
            };
            let l2 = inner_exhaustion(&cfg.domain, 3)?;
            let phi = move |z: &Complex| g.eval(z);
            type2_witness(&phi, &h, &k, &l2, &l, &cfg.table.resolve()?, s, eps, &opts)?
        }
    };
    let mut out = Written::default();
    out.write(&cfg.output_dir(), "witness.json", &json(&report))?;
    out.report();
    let [t, loc, density] = report.margins();
    println!("index n = {}, margins {t:e} {loc:e} {density:e} against 1/{s}", report.index);
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Check("witness checks failed".into()))
    }
}

pub fn span(path: &Path, coefficients: &str, depth_cap: usize, steps: Option<usize>) -> Result<(), CliError> {
    let cfg = load(path, steps)?;
    let coeffs = coefficients
        .split(';')
        .map(|c| parse::complex(cfg.precision, c))
        .collect::<Result<Vec<_>, _>>()?;
    let table = cfg.table.resolve()?;
    let systems = vec![table; coeffs.len()];
    let (_, report) = build_span_member(&cfg.build_config()?, &systems, &coeffs, depth_cap)?;
    let mut out = Written::default();
    out.write(&cfg.output_dir(), "span.json", &json(&report))?;
    out.report();
    println!("depth {}, {} checked indices, passed {}", report.depth, report.entries.len(), report.passed);
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Check("span margins exceed their budget".into()))
    }
}

pub fn schedule(systems: &str, steps: usize) -> Result<(), CliError> {
    let count = match systems {
        "countable" => SystemCount::Countable,
        n => SystemCount::Finite(
            n.parse()
                .map_err(|_| CliError::Usage(format!("systems must be a count or 'countable', got '{n}'")))?,
        ),
    };
    let plan = schedule_systems(count, steps).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match count {
        SystemCount::Finite(_) => serde_json::to_string(&plan.iter().map(|v| v[0]).collect::<Vec<_>>()),
        SystemCount::Countable => serde_json::to_string(&plan),
    }
    .expect("serializable");
    println!("{text}");
    Ok(())
}
