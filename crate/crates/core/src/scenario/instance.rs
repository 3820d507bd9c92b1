use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_model, MilpModel, ModeFlags};
use crate::power::{objective_value, PowerBreakdown, PowerParams};
use crate::solver::{check_feasibility, FeasibilityReport, Solution, Tolerances};
use crate::topology::Topology;
use crate::workload::WorkloadInstance;

use super::run::OBJECTIVE_TOL;

/// A self-contained instance: rebuilding the model from it reproduces the
/// solved model exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    /// Topology in its file schema.
    pub topology: serde_json::Value,
    pub workload: WorkloadInstance,
    pub flags: ModeFlags,
    pub params: PowerParams,
}

/// Outcome of auditing a stored solution against its instance.
#[derive(Debug, Clone)]
pub struct Verification {
    pub report: FeasibilityReport,
    pub breakdown: PowerBreakdown,
    /// Objective recomputed from the power model (TNRE for renewable models).
    pub recomputed_w: f64,
    pub objective_w: f64,
}

impl Verification {
    pub fn objective_matches(&self) -> bool {
        (self.recomputed_w - self.objective_w).abs() <= OBJECTIVE_TOL * self.objective_w.abs().max(1.0)
    }

    pub fn passed(&self) -> bool {
        self.report.is_feasible() && self.objective_matches()
    }
}

impl InstanceFile {
    pub fn new(topology: &Topology, workload: &WorkloadInstance, flags: &ModeFlags, params: &PowerParams) -> Result<Self> {
        Ok(InstanceFile {
            topology: serde_json::from_str(&topology.to_json()?)?,
            workload: workload.clone(),
            flags: flags.clone(),
            params: params.clone(),
        })
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::from_json(&self.topology.to_string())
    }

    pub fn build(&self) -> Result<(Topology, MilpModel)> {
        let topology = self.topology()?;
        let model = build_model(&topology, &self.workload, &self.params, &self.flags)?;
        Ok((topology, model))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<InstanceFile> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Row-by-row feasibility plus objective recomputation of `solution`.
    pub fn verify(&self, solution: &Solution) -> Result<Verification> {
        if !solution.status.has_solution() {
            return Err(Error::Verification(format!("solution has status {}", solution.status)));
        }
        let (topology, model) = self.build()?;
        let report = check_feasibility(&model, &solution.values, &Tolerances::default())?;
        let assignment = solution.assignment(&model);
        let breakdown = objective_value(&assignment, &topology, &self.workload, &self.params, self.flags.switching)?;
        let recomputed_w = if self.flags.renewable {
            let per_node = crate::power::node_network_power(&assignment, &topology, &self.params)?;
            crate::power::non_renewable_w(&per_node, &self.flags.solar_kw)
        } else {
            breakdown.objective_w
        };
        Ok(Verification { report, breakdown, recomputed_w, objective_w: solution.objective })
    }
}
