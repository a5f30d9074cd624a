//! Check reports and their JSON/CSV serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// The parameter sample a check was evaluated at.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub epsilon: f64,
    pub x: f64,
    pub r: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub heights: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ints: Vec<i64>,
}

impl Sample {
    pub fn at(p: &ModelParams) -> Self {
        Sample { epsilon: p.epsilon, x: p.x, r: p.r, ..Default::default() }
    }

    pub fn with_u(mut self, u: &[f64]) -> Self {
        self.u = u.to_vec();
        self
    }

    pub fn with_heights(mut self, h: &[f64]) -> Self {
        self.heights = h.to_vec();
        self
    }

    pub fn with_ints(mut self, n: &[i64]) -> Self {
        self.ints = n.to_vec();
        self
    }

    fn compact(&self) -> String {
        let mut s = format!("x={};r={}", self.x, self.r);
        let join = |v: Vec<String>| v.join(" ");
        if !self.u.is_empty() {
            let _ = write!(s, ";u={}", join(self.u.iter().map(|v| v.to_string()).collect()));
        }
        if !self.heights.is_empty() {
            let _ = write!(s, ";k={}", join(self.heights.iter().map(|v| v.to_string()).collect()));
        }
        if !self.ints.is_empty() {
            let _ = write!(s, ";n={}", join(self.ints.iter().map(|v| v.to_string()).collect()));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub sample_index: usize,
    pub params: Sample,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational checks never fail the run.
    pub gating: bool,
    pub notes: String,
}

impl CheckReport {
    pub fn new(id: &str, index: usize, params: Sample, residual: f64, tolerance: f64) -> Self {
        // JSON has no infinity; a non-finite residual is stored as f64::MAX
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        CheckReport {
            check_id: id.to_string(),
            sample_index: index,
            params,
            residual,
            tolerance,
            pass: residual < tolerance,
            gating: true,
            notes: String::new(),
        }
    }

    /// A report for an evaluation that hit a pole or domain error.
    pub fn failed(id: &str, index: usize, params: Sample, tolerance: f64, err: &crate::Error) -> Self {
        let mut r = CheckReport::new(id, index, params, f64::INFINITY, tolerance);
        r.notes = err.to_string();
        r
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// Header values repeated at the top of every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub x: f64,
    pub r: f64,
    pub epsilon: f64,
    pub rel_tol: f64,
    pub e_max: usize,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub header: ReportHeader,
    pub all_gating_pass: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(header: ReportHeader, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.check_id.cmp(&b.check_id).then(a.sample_index.cmp(&b.sample_index)));
        let all_gating_pass = checks.iter().all(|c| c.pass || !c.gating);
        SuiteReport { header, all_gating_pass, checks }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let h = &self.header;
        let mut s = format!(
            "# x={} r={} epsilon={} rel_tol={:e} e_max={} n={} seed={}\n",
            h.x, h.r, h.epsilon, h.rel_tol, h.e_max, h.n, h.seed
        );
        s.push_str("check_id,sample_index,params,residual,tolerance,pass,gating,notes\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{},{},\"{}\"",
                c.check_id,
                c.sample_index,
                c.params.compact(),
                c.residual,
                c.tolerance,
                c.pass,
                c.gating,
                c.notes.replace('"', "'")
            );
        }
        s
    }

    /// Per check id: (samples, failures, worst residual, gating).
    pub fn summary(&self) -> Vec<(String, usize, usize, f64, bool)> {
        let mut out: Vec<(String, usize, usize, f64, bool)> = Vec::new();
        for c in &self.checks {
            match out.last_mut() {
                Some(last) if last.0 == c.check_id => {
                    last.1 += 1;
                    last.2 += usize::from(!c.pass);
                    last.3 = last.3.max(c.residual);
                }
                _ => out.push((c.check_id.clone(), 1, usize::from(!c.pass), c.residual, c.gating)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_sort_canonically() {
        let p = ModelParams::default();
        let h = ReportHeader { x: 0.3, r: 4.5, epsilon: p.epsilon, rel_tol: 1e-10, e_max: 12, n: 12, seed: 1 };
        let a = CheckReport::new("b", 1, Sample::at(&p), 0.0, 1.0);
        let b = CheckReport::new("b", 0, Sample::at(&p), 2.0, 1.0).informational();
        let c = CheckReport::new("a", 3, Sample::at(&p), 0.0, 1.0);
        let rep = SuiteReport::new(h, vec![a, b, c]);
        let ids: Vec<_> = rep.checks.iter().map(|c| (c.check_id.as_str(), c.sample_index)).collect();
        assert_eq!(ids, vec![("a", 3), ("b", 0), ("b", 1)]);
        assert!(rep.all_gating_pass);
        assert!(rep.to_csv().starts_with("# x=0.3 r=4.5"));
        let back: SuiteReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }
}
