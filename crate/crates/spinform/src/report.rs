//! Report types emitted by the CLI as JSON.
//!
//! Field order is fixed by the struct declarations; identical configurations
//! produce byte-identical reports apart from the wall-time field.

use crate::spin_calculus::ResidualStats;
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtaOut {
    pub re: f64,
    pub im: f64,
}

/// Context shared by the residual reports of one run.
#[derive(Clone, Debug)]
pub struct CheckContext {
    pub surface: String,
    pub eta: EtaOut,
    pub grid: Vec<usize>,
}

/// Residual of one identity on one surface with its tolerance verdict —
/// the per-identity JSON object.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub identity: String,
    pub surface: String,
    pub eta: EtaOut,
    pub grid: Vec<usize>,
    pub sup_residual: f64,
    pub l2_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckContext {
    pub fn from_stats(&self, identity: &str, stats: &ResidualStats, tolerance: f64) -> CheckResult {
        CheckResult {
            identity: identity.to_string(),
            surface: self.surface.clone(),
            eta: self.eta,
            grid: self.grid.clone(),
            sup_residual: stats.sup,
            l2_residual: stats.l2,
            tolerance,
            pass: stats.sup <= tolerance,
        }
    }

    pub fn from_sup(&self, identity: &str, sup: f64, tolerance: f64) -> CheckResult {
        CheckResult {
            identity: identity.to_string(),
            surface: self.surface.clone(),
            eta: self.eta,
            grid: self.grid.clone(),
            sup_residual: sup,
            l2_residual: sup,
            tolerance,
            pass: sup <= tolerance,
        }
    }
}

/// Echo of the configuration a report was produced from.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub surface: String,
    pub space: String,
    pub grid: Vec<usize>,
    pub eta: EtaOut,
    pub steps_per_cell: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

/// Full verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(config: ConfigEcho, checks: Vec<CheckResult>, wall_time_ms: u64) -> Report {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            config,
            checks,
            pass,
            wall_time_ms,
        }
    }

    /// JSON with the wall-time zeroed, the determinism-comparable form.
    pub fn canonical_json(&self) -> serde_json::Result<String> {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        serde_json::to_string_pretty(&clone)
    }
}

/// One refinement study of the convergence command.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub study: String,
    /// Grid sizes or stencil steps, coarse to fine.
    pub levels: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of log residual against log step; absent when
    /// the residuals sit at the rounding floor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_order: Option<f64>,
    pub floor: bool,
}

impl ConvergenceStudy {
    /// Fit the convergence order from (step, residual) ladders. Residuals
    /// below 1e-12 are treated as rounding floor.
    pub fn fit(study: &str, steps: &[f64], residuals: &[f64]) -> ConvergenceStudy {
        let floor = residuals.iter().all(|r| *r < 1e-12);
        let fitted_order = if floor {
            None
        } else {
            let n = steps.len() as f64;
            let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
            let ys: Vec<f64> = residuals.iter().map(|r| r.max(1e-300).ln()).collect();
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            Some(sxy / sxx)
        };
        ConvergenceStudy {
            study: study.to_string(),
            levels: steps.to_vec(),
            residuals: residuals.to_vec(),
            fitted_order,
            floor,
        }
    }
}

/// Report of the convergence command.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub config: ConfigEcho,
    pub studies: Vec<ConvergenceStudy>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_fit_recovers_slope() {
        let steps: [f64; 3] = [0.1, 0.05, 0.025];
        let residuals: Vec<f64> = steps.iter().map(|h| 3.0 * h.powi(4)).collect();
        let s = ConvergenceStudy::fit("synthetic", &steps, &residuals);
        assert!((s.fitted_order.unwrap() - 4.0).abs() < 1e-12);
        assert!(!s.floor);
    }

    #[test]
    fn floor_detection() {
        let s = ConvergenceStudy::fit("flat", &[0.1, 0.05], &[1e-15, 2e-15]);
        assert!(s.floor);
        assert!(s.fitted_order.is_none());
    }

    #[test]
    fn canonical_json_strips_wall_time() {
        let echo = ConfigEcho {
            command: "verify".into(),
            surface: "plane".into(),
            space: "R3".into(),
            grid: vec![8, 8],
            eta: EtaOut { re: 0.0, im: 0.0 },
            steps_per_cell: 4,
            param: None,
        };
        let a = Report::new(echo.clone(), vec![], 120);
        let b = Report::new(echo, vec![], 350);
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }
}
