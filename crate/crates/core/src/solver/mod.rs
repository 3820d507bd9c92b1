//! Exact solution of [`MilpModel`]s at desk scale.
//!
//! [`solve`] runs best-first branch-and-bound over an LP relaxation with
//! deterministic pseudocost or lowest-index branching. [`check_feasibility`] re-evaluates a solution row by row
//! without touching the LP code, and [`enumerate_oracle`] brute-forces tiny
//! instances through the power model for independent cross-checks.

mod bnb;
mod check;
pub mod lp;
pub mod lp_format;
mod oracle;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MilpModel;
use crate::power::Assignment;

pub use bnb::{solve, solve_with_start};
pub use check::{check_feasibility, FeasibilityReport, Tolerances, Violation, ViolationKind};
pub use lp_format::{export_lp, to_lp_string};
pub use oracle::{enumerate_oracle, OracleSolution, ORACLE_MAX_CHUNKS, ORACLE_MAX_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branching {
    /// First fractional integer variable in declaration order.
    LowestIndex,
    /// Product of estimated down/up objective gains; variables without
    /// history on both sides are strong-branched first.
    Pseudocost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Relative gap at which the incumbent is declared optimal.
    pub optimality_gap: f64,
    pub integrality_tol: f64,
    pub lp_feas_tol: f64,
    pub node_limit: Option<u64>,
    pub time_limit_s: Option<f64>,
    /// Open nodes that keep their LP state (about 1 MB each at desk scale);
    /// the rest are re-solved from scratch when selected.
    pub max_stored_states: usize,
    pub branching: Branching,
    /// Variables strong-branched per node under [`Branching::Pseudocost`].
    pub strong_candidates: usize,
    /// Nodes between rounding dives; 0 disables the heuristic.
    pub heuristic_interval: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            optimality_gap: 1e-6,
            integrality_tol: 1e-6,
            lp_feas_tol: 1e-7,
            node_limit: None,
            time_limit_s: None,
            max_stored_states: 256,
            branching: Branching::Pseudocost,
            strong_candidates: 16,
            heuristic_interval: 100,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.optimality_gap) && positive(self.integrality_tol) && positive(self.lp_feas_tol)) {
            return Err(Error::Invalid("solver tolerances must be positive".into()));
        }
        if self.integrality_tol >= 0.5 {
            return Err(Error::Invalid("integrality tolerance must be below 0.5".into()));
        }
        if let Some(t) = self.time_limit_s {
            if !(t > 0.0) {
                return Err(Error::Invalid("time limit must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Optimal,
    /// A limit was hit with an incumbent; `gap` is its relative bound gap.
    Feasible { gap: f64 },
    Infeasible,
    Unbounded,
    /// A limit was hit before any integer-feasible point was found.
    Timeout,
}

impl Status {
    pub fn has_solution(self) -> bool {
        matches!(self, Status::Optimal | Status::Feasible { .. })
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Feasible { .. } => "feasible",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::Timeout => "timeout",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Feasible { gap } => write!(f, "feasible({gap:.3e})"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    /// Nodes whose LP state had to be re-solved from scratch.
    pub rebuilds: u64,
    /// Rounding dives run.
    pub dives: u64,
    /// Node relaxations abandoned after numerical failures; their bounds
    /// still count towards the reported lower bound.
    pub lp_failures: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    #[serde(flatten)]
    pub status: Status,
    /// Objective in watts, including the constant term (NaN without a solution).
    pub objective: f64,
    /// Best proven lower bound.
    pub bound: f64,
    /// Relative gap between `objective` and `bound`.
    pub gap: f64,
    /// Values in model declaration order; empty without a solution.
    #[serde(skip)]
    pub values: Vec<f64>,
    /// Non-zero values by name.
    pub nonzero: Assignment,
    pub stats: SolveStats,
}

impl Solution {
    pub(crate) fn without_values(status: Status, bound: f64, stats: SolveStats) -> Solution {
        Solution {
            status,
            objective: f64::NAN,
            bound,
            gap: f64::INFINITY,
            values: Vec::new(),
            nonzero: Assignment::new(),
            stats,
        }
    }

    pub(crate) fn with_values(model: &MilpModel, status: Status, values: Vec<f64>, bound: f64, stats: SolveStats) -> Solution {
        let objective = model.objective.evaluate(&values);
        let nonzero = model
            .variables
            .iter()
            .zip(&values)
            .filter(|(_, &x)| x != 0.0)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect();
        Solution { status, objective, bound, gap: relative_gap(objective, bound), values, nonzero, stats }
    }

    /// Full named assignment as consumed by the power model.
    pub fn assignment(&self, model: &MilpModel) -> Assignment {
        model.assignment(&self.values)
    }

    /// Rebuilds a solution from a JSON dump (status, objective, non-zero
    /// values); variables absent from the dump are zero.
    pub fn from_json(model: &MilpModel, text: &str) -> Result<Solution> {
        let mut s: Solution = serde_json::from_str(text)?;
        for (name, _) in s.nonzero.iter() {
            model.require(name)?;
        }
        s.values = model.variables.iter().map(|v| s.nonzero.get(&v.name).unwrap_or(0.0)).collect();
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialises")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(model: &MilpModel, path: impl AsRef<Path>) -> Result<Solution> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Solution::from_json(model, &text)
    }
}

pub(crate) fn relative_gap(objective: f64, bound: f64) -> f64 {
    if objective == bound {
        return 0.0;
    }
    ((objective - bound) / objective.abs().max(1.0)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_json_and_display() {
        let s = Status::Feasible { gap: 0.0125 };
        assert_eq!(s.to_string(), "feasible(1.250e-2)");
        assert_eq!(serde_json::to_string(&Status::Optimal).unwrap(), r#"{"status":"optimal"}"#);
        assert!(!Status::Timeout.has_solution());
    }

    #[test]
    fn options_validation() {
        assert!(SolveOptions::default().validate().is_ok());
        let bad = SolveOptions { optimality_gap: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
