//! Serialized reports.

use enttime::{ComplexMatrix, CurvaturePrediction, TimescaleReport};
use serde::{Deserialize, Serialize};

use crate::spec::ModelSpecFile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&enttime::C64) -> f64| {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimescaleJson {
    pub t_ent_inv_sq: f64,
    pub raw_t_ent_inv_sq: f64,
    pub imag_residual: f64,
    pub scale: f64,
    pub degenerate: bool,
    /// `null` when the timescale is infinite.
    pub t_ent: Option<f64>,
    pub reference_time: f64,
    pub cov_a: MatrixJson,
    pub cov_b: MatrixJson,
}

impl From<&TimescaleReport> for TimescaleJson {
    fn from(r: &TimescaleReport) -> Self {
        Self {
            t_ent_inv_sq: r.t_ent_inv_sq,
            raw_t_ent_inv_sq: r.raw_t_ent_inv_sq,
            imag_residual: r.imag_residual,
            scale: r.scale,
            degenerate: r.degenerate,
            t_ent: r.t_ent,
            reference_time: r.reference_time(),
            cov_a: (&r.cov_a).into(),
            cov_b: (&r.cov_b).into(),
        }
    }
}

/// Output of `enttime timescale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub degenerate: bool,
    pub spec: ModelSpecFile,
    pub natural_rate: f64,
    /// `rate * t_ent`, e.g. `lambda * T_ent` for the JCM.
    pub t_ent_natural: Option<f64>,
    pub timescale: TimescaleJson,
    pub predictions: Vec<CurvaturePrediction>,
    pub wall_time_s: Option<f64>,
    pub timestamp_unix: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Info => "INFO",
        })
    }
}

/// One line of the verification table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    /// `curvature`, `curvature_degenerate`, `first_derivative`, `sixth_order` or `log_divergence`.
    pub check: String,
    /// Entropy order; 1 is von Neumann.
    pub alpha: u32,
    pub expected: f64,
    pub measured: f64,
    pub error: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

/// Output of `enttime verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: String,
    pub version: String,
    pub degenerate: bool,
    pub spec: ModelSpecFile,
    pub natural_rate: f64,
    pub timescale: TimescaleJson,
    pub checks: Vec<CheckRow>,
    pub all_pass: bool,
    pub wall_time_s: Option<f64>,
    pub timestamp_unix: Option<f64>,
}

impl VerifyReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<22} {:>5} {:>16} {:>16} {:>10} {:>9}  {}\n",
            "check", "alpha", "expected", "measured", "error", "tol", "status"
        );
        for r in &self.checks {
            out.push_str(&format!(
                "{:<22} {:>5} {:>16.8e} {:>16.8e} {:>10.2e} {:>9.1e}  {}{}\n",
                r.check,
                if r.alpha == 1 { "vn".to_string() } else { r.alpha.to_string() },
                r.expected,
                r.measured,
                r.error,
                r.tolerance,
                r.status,
                if r.note.is_empty() { String::new() } else { format!("  ({})", r.note) }
            ));
        }
        out
    }
}
