//! Suite configuration: a JSON document with every field optional and
//! unknown fields rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, DEFAULT_R, DEFAULT_REL_TOL, DEFAULT_SERIES_ORDER, DEFAULT_X};
use crate::report::ReportHeader;

/// Environment variable that replaces `output.dir`.
pub const OUT_DIR_ENV: &str = "FUSION21_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
}

impl Grid {
    pub fn points(&self, rel_tol: f64) -> Result<Vec<ModelParams>> {
        let mut out = Vec::new();
        for &x in &self.x {
            for &r in &self.r {
                out.push(ModelParams::from_x(x, r)?.with_rel_tol(rel_tol));
            }
        }
        if out.is_empty() {
            return Err(Error::Config("parameter grid is empty".into()));
        }
        Ok(out)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid { x: vec![0.2, 0.3, 0.45], r: vec![4.0, 5.0, 7.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    pub ybe: usize,
    pub vertex_face: usize,
    pub inversion: usize,
    pub l_operator: usize,
    pub residue: usize,
    pub theta: usize,
    pub commutation: usize,
    pub projector_points: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            ybe: 50,
            vertex_face: 50,
            inversion: 100,
            l_operator: 50,
            residue: 20,
            theta: 100,
            commutation: 10,
            projector_points: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Tolerance of the residue limits (two-point extrapolation).
    pub residue: f64,
    pub sum_rule: f64,
    pub ope: f64,
    /// Relative width allowed for fitted low-temperature exponents.
    pub lowtemp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residue: 1e-6, sum_rule: 1e-8, ope: 1e-9, lowtemp: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LowTemp {
    pub x: [f64; 2],
    pub zeta: [f64; 2],
    pub r: f64,
}

impl Default for LowTemp {
    fn default() -> Self {
        LowTemp { x: [1e-2, 1e-3], zeta: [0.5, 0.25], r: DEFAULT_R }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    pub json: String,
    pub csv: String,
}

impl Default for Output {
    fn default() -> Self {
        Output { dir: PathBuf::from("reports"), json: "report.json".into(), csv: "report.csv".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Single parameter point used by the point checks.
    pub x: f64,
    pub r: f64,
    pub rel_tol: f64,
    pub seed: u64,
    pub e_max: usize,
    pub n: usize,
    pub k_max: i64,
    /// Grid for sampled weight identities.
    pub grid: Grid,
    pub sum_rule_grid: Grid,
    pub ope_points: Vec<[f64; 2]>,
    pub samples: SampleCounts,
    pub tolerances: Tolerances,
    pub lowtemp: LowTemp,
    pub output: Output,
    /// Check-id prefixes to run; empty means all.
    pub only: Vec<String>,
    /// Check-id prefixes to skip.
    pub exclude: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            x: DEFAULT_X,
            r: DEFAULT_R,
            rel_tol: DEFAULT_REL_TOL,
            seed: 1,
            e_max: 12,
            n: DEFAULT_SERIES_ORDER,
            k_max: 20,
            grid: Grid::default(),
            sum_rule_grid: Grid { x: vec![0.2, 0.3, 0.4], r: vec![4.0, 5.0, 7.0] },
            ope_points: vec![[0.3, 4.5], [0.45, 6.0]],
            samples: SampleCounts::default(),
            tolerances: Tolerances::default(),
            lowtemp: LowTemp::default(),
            output: Output::default(),
            only: Vec::new(),
            exclude: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.params().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.rel_tol > 0.0) {
            return bad(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if self.n == 0 || self.e_max == 0 {
            return bad("n and e_max must be >= 1".into());
        }
        if self.k_max < 1 {
            return bad("k_max must be >= 1".into());
        }
        for (name, g) in [("grid", &self.grid), ("sum_rule_grid", &self.sum_rule_grid)] {
            g.points(self.rel_tol).map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        for pt in &self.ope_points {
            ModelParams::from_x(pt[0], pt[1]).map_err(|e| Error::Config(format!("ope_points: {e}")))?;
        }
        let lt = &self.lowtemp;
        if lt.x.iter().chain(&lt.zeta).any(|v| !(*v > 0.0 && *v < 1.0)) || lt.zeta[0] == lt.zeta[1] {
            return bad("lowtemp.x and lowtemp.zeta must be distinct values in (0,1)".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::from_x(self.x, self.r)?.with_rel_tol(self.rel_tol))
    }

    pub fn header(&self) -> ReportHeader {
        ReportHeader {
            x: self.x,
            r: self.r,
            epsilon: -self.x.ln(),
            rel_tol: self.rel_tol,
            e_max: self.e_max,
            n: self.n,
            seed: self.seed,
        }
    }

    /// Output directory, honoring the environment override.
    pub fn out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.dir.clone(),
        }
    }

    /// Whether a check id passes the include/exclude prefix filters.
    pub fn selects(&self, id: &str) -> bool {
        (self.only.is_empty() || self.only.iter().any(|o| id.starts_with(o.as_str())))
            && !self.exclude.iter().any(|o| id.starts_with(o.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let c = SuiteConfig::default();
        let back = SuiteConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
        assert_eq!(SuiteConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn unknown_fields_rejected() {
        let e = SuiteConfig::from_json(r#"{"seed": 3, "sede": 4}"#).unwrap_err();
        assert!(matches!(e, Error::Config(ref m) if m.contains("sede")), "{e}");
        assert!(SuiteConfig::from_json(r#"{"samples": {"ybe": 2, "foo": 1}}"#).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(SuiteConfig::from_json(r#"{"r": 1.5}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"grid": {"x": [], "r": [4]}}"#).is_err());
    }

    #[test]
    fn filters() {
        let c =
            SuiteConfig { only: vec!["check_ybe".into()], exclude: vec!["check_ybe_R21".into()], ..Default::default() };
        assert!(c.selects("check_ybe_R8"));
        assert!(!c.selects("check_ybe_R21"));
        assert!(!c.selects("check_ope_AA"));
    }
}
