//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use universal_pade::fitting::AdaptiveFit;
use universal_pade::geometry::{inner_exhaustion, CompactSpec, DomainSpec};
use universal_pade::pade::PadeConfig;
use universal_pade::universal::{BuildConfig, CompactFamily, Mode, QSideTable, QTable, TargetEnumeration};
use universal_pade::Complex;

use crate::CliError;

/// Overrides `outputs.dir`.
pub const OUTPUT_DIR_ENV: &str = "UPADE_OUTPUT_DIR";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    /// Expansion center `ζ`.
    #[serde(default)]
    pub center: [f64; 2],
    pub table: TableSpec,
    pub enumeration: TargetEnumeration,
    pub steps: usize,
    pub precision: u32,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Table for q-side witnesses.
    #[serde(default)]
    pub qside_table: Option<QSideTable>,
    /// Check set for `verify`; defaults to the second inner exhaustion set.
    #[serde(default)]
    pub check_set: Option<CompactSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TableSpec {
    Literal(QTable),
    Generator(Generator),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: GeneratorName,
    pub len: usize,
    /// The same q list at every n.
    pub qs: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    /// `p_n = n`.
    Linear,
    /// `p_n = n²`.
    Squares,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `tol_D = 2^-bits`; default half the precision.
    pub tol_d_bits: Option<u32>,
    /// Mesh of the builder's error check on `K`.
    pub check_mesh: f64,
    /// Mesh of the samples used by `verify` and `metrics sup`.
    pub mesh: f64,
    pub fit_initial_budget: usize,
    pub fit_max_degree: usize,
    pub fit_oversampling: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let fit = AdaptiveFit::default();
        Tolerances {
            tol_d_bits: None,
            check_mesh: 0.01,
            mesh: 0.05,
            fit_initial_budget: fit.initial_budget,
            fit_max_degree: fit.max_degree,
            fit_oversampling: fit.oversampling,
        }
    }
}

impl Tolerances {
    pub fn fit(&self) -> AdaptiveFit {
        AdaptiveFit {
            initial_budget: self.fit_initial_budget,
            max_degree: self.fit_max_degree,
            oversampling: self.fit_oversampling,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { dir: PathBuf::from(".") }
    }
}

impl TableSpec {
    pub fn resolve(&self) -> Result<QTable, CliError> {
        match self {
            TableSpec::Literal(t) => {
                t.validate().map_err(|e| CliError::Config(format!("table: {e}")))?;
                Ok(t.clone())
            }
            TableSpec::Generator(g) => {
                if g.len == 0 || g.qs.is_empty() {
                    return Err(CliError::Config("table generator needs len ≥ 1 and a q list".into()));
                }
                let p = match g.name {
                    GeneratorName::Linear => (1..=g.len).collect(),
                    GeneratorName::Squares => (1..=g.len).map(|n| n * n).collect(),
                };
                QTable::new(p, vec![g.qs.clone(); g.len]).map_err(|e| CliError::Config(format!("table: {e}")))
            }
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.precision < 53 {
            return bad(format!("precision must be at least 53 bits, got {}", self.precision));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        // The builder starts at L_2.
        inner_exhaustion(&self.domain, 2).map_err(|e| CliError::Config(format!("domain: {e}")))?;
        if !self.domain.contains(self.center) {
            return bad(format!("center {:?} is outside the domain", self.center));
        }
        self.table.resolve()?;
        self.enumeration
            .validate()
            .map_err(|e| CliError::Config(format!("enumeration: {e}")))?;
        if let CompactFamily::Outer(d) = &self.enumeration.compacts {
            if *d != self.domain {
                return bad("outer compact family must use the configured domain".into());
            }
        }
        if let Some(t) = &self.qside_table {
            if t.is_empty() {
                return bad("qside_table is empty".into());
            }
        }
        if let Some(c) = &self.check_set {
            c.validate().map_err(|e| CliError::Config(format!("check_set: {e}")))?;
        }
        let t = &self.tolerances;
        if !(t.check_mesh > 0.0 && t.mesh > 0.0) {
            return bad("meshes must be positive".into());
        }
        if t.tol_d_bits.is_some_and(|b| b == 0 || b >= self.precision) {
            return bad("tol_d_bits must lie in 1..precision".into());
        }
        if t.fit_initial_budget == 0 || t.fit_max_degree < t.fit_initial_budget || t.fit_oversampling == 0 {
            return bad("fit settings need 1 ≤ initial budget ≤ max degree and oversampling ≥ 1".into());
        }
        Ok(())
    }

    pub fn center(&self) -> Complex {
        Complex::with_val(self.precision, self.center[0], self.center[1])
    }

    pub fn pade_config(&self) -> PadeConfig {
        let cfg = PadeConfig::new(self.precision);
        match self.tolerances.tol_d_bits {
            Some(bits) => cfg.with_tol_d_bits(bits),
            None => cfg,
        }
    }

    pub fn build_config(&self) -> Result<BuildConfig, CliError> {
        let mut cfg = BuildConfig::new(
            self.domain.clone(),
            self.table.resolve()?,
            self.enumeration.clone(),
            self.steps,
            self.precision,
        );
        cfg.center = self.center();
        cfg.mode = self.mode.unwrap_or(Mode::Holomorphic);
        cfg.fit = self.tolerances.fit();
        cfg.check_mesh = self.tolerances.check_mesh;
        Ok(cfg)
    }

    pub fn check_set(&self) -> Result<CompactSpec, CliError> {
        match &self.check_set {
            Some(c) => Ok(c.clone()),
            None => inner_exhaustion(&self.domain, 2).map_err(|e| CliError::Config(format!("domain: {e}"))),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.outputs.dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DESK: &str = r#"{
        "domain": {"domain": "disk", "center": [0, 0], "radius": 1},
        "table": {"generator": {"name": "linear", "len": 400, "qs": [1, 2]}},
        "enumeration": {
            "compacts": {"list": [{"shape": "disk", "center": [2.5, 0], "radius": 0.25}]},
            "targets": {"list": ["poly:1", "poly:0,1", "poly:0,0,1"]},
            "repetition": "infinite_repeat"
        },
        "steps": 6,
        "precision": 256
    }"#;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn desk_config_resolves() {
        let cfg = parse(DESK).unwrap();
        let table = cfg.table.resolve().unwrap();
        assert_eq!(table.p(3), 3);
        assert_eq!(table.qs(7), &[1, 2]);
        assert_eq!(cfg.check_set().unwrap(), CompactSpec::disk(0.0, 0.0, 0.5));
        assert_eq!(cfg.build_config().unwrap().mode, Mode::Holomorphic);
    }

    #[test]
    fn schema_violations_are_config_errors() {
        let low = DESK.replace("\"precision\": 256", "\"precision\": 24");
        assert!(matches!(parse(&low), Err(CliError::Config(m)) if m.contains("53")));
        let unknown = DESK.replace("\"steps\": 6", "\"steps\": 6, \"stpes\": 2");
        assert!(matches!(parse(&unknown), Err(CliError::Config(_))));
        let outside = DESK.replace("\"steps\": 6", "\"steps\": 6, \"center\": [3, 0]");
        assert!(matches!(parse(&outside), Err(CliError::Config(m)) if m.contains("outside")));
        let shape = DESK.replace("\"shape\": \"disk\"", "\"shape\": \"annulus\"");
        assert!(matches!(parse(&shape), Err(CliError::Config(_))));
    }

    #[test]
    fn squares_generator() {
        let g = TableSpec::Generator(Generator {
            name: GeneratorName::Squares,
            len: 4,
            qs: vec![0],
        });
        let t = g.resolve().unwrap();
        assert_eq!((1..=4).map(|n| t.p(n)).collect::<Vec<_>>(), vec![1, 4, 9, 16]);
    }
}
