use universal_pade::pade::{compute_pade, is_in_d};
use universal_pade::series::TaylorSource;
use universal_pade::{Complex, PadeConfig, PadeIndex, PowerSeries};

use crate::output::emit;
use crate::{parse, CliError, PadeArgs};

/// Header of the normality table CSV.
pub fn table_header(q_max: usize) -> String {
    let mut h = String::from("p");
    for q in 0..=q_max {
        h.push_str(&format!(",q={q}"));
    }
    h
}

fn series(args: &PadeArgs, order: usize) -> Result<PowerSeries, CliError> {
    let prec = args.prec;
    if let Some(path) = &args.coeffs {
        return parse::coefficient_file(prec, path);
    }
    if let Some(list) = &args.series {
        let coeffs = parse::complex_list(prec, list)?;
        return PowerSeries::new(Complex::zero(prec), coeffs).map_err(|e| CliError::Usage(e.to_string()));
    }
    match args.function.as_deref() {
        Some("exp") => Ok(PowerSeries::exp(prec, order)),
        Some("geometric") => Ok(PowerSeries::geometric(prec, order)),
        Some(lit) if lit.starts_with("rational:") => {
            let r = parse::rational(prec, lit)?;
            Ok(r.taylor(&Complex::zero(prec), order)?)
        }
        Some(other) => Err(CliError::Usage(format!("unknown function '{other}'"))),
        None => Err(CliError::Usage("give --fn, --coeffs or --series".into())),
    }
}

pub fn run(args: &PadeArgs) -> Result<(), CliError> {
    if args.prec < 53 {
        return Err(CliError::Usage(format!("precision must be at least 53 bits, got {}", args.prec)));
    }
    let mut cfg = PadeConfig::new(args.prec);
    if let Some(bits) = args.tol_d_bits {
        cfg = cfg.with_tol_d_bits(bits);
    }
    match (&args.table, args.p, args.q) {
        (Some(pq), _, _) => {
            let (p_max, q_max) = (pq[0], pq[1]);
            let f = series(args, p_max + q_max)?;
            let mut csv = table_header(q_max);
            csv.push('\n');
            for p in 0..=p_max {
                csv.push_str(&p.to_string());
                for q in 0..=q_max {
                    let member = is_in_d(&f, PadeIndex::new(p, q), &cfg)?.member;
                    csv.push_str(if member { ",true" } else { ",false" });
                }
                csv.push('\n');
            }
            emit(args.out.as_deref(), &csv)
        }
        (None, Some(p), Some(q)) => {
            let f = series(args, p + q)?;
            let result = compute_pade(&f, PadeIndex::new(p, q), &cfg)?;
            let json = serde_json::to_string_pretty(&result).expect("serializable");
            emit(args.out.as_deref(), &json)
        }
        _ => Err(CliError::Usage("give --p and --q, or --table P Q".into())),
    }
}
