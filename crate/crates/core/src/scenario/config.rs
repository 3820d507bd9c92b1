use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Approach, ModeFlags};
use crate::power::{PowerParams, SwitchingReading};
use crate::solver::SolveOptions;
use crate::topology::{NodeId, Topology};
use crate::workload::{generate_workload, scenario_profiles, ProfileRanges, StorageScenario, WorkloadInstance, WorkloadRanges};

/// Model switches shared by every row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    pub dcn: u32,
    pub integer_ports: bool,
    pub same_volumes: bool,
    pub switching: SwitchingReading,
}

impl Default for ModelOptions {
    fn default() -> Self {
        let flags = ModeFlags::default();
        ModelOptions {
            dcn: flags.dcn,
            integer_ports: flags.integer_ports,
            same_volumes: flags.same_volumes,
            switching: flags.switching,
        }
    }
}

/// Solar sweep over one mode. Every node receives the same solar power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenewableConfig {
    /// Solar power per node (kW).
    pub solar_kw: Vec<f64>,
    pub scenario: StorageScenario,
    pub approach: Approach,
    pub backup: bool,
    /// Defaults to the sweep's betas.
    pub betas: Option<Vec<u32>>,
    /// Defaults to the sweep's seeds.
    pub seeds: Option<Vec<u64>>,
}

impl Default for RenewableConfig {
    fn default() -> Self {
        RenewableConfig {
            solar_kw: vec![0.0, 20.0, 40.0, 60.0, 80.0],
            scenario: StorageScenario::A1,
            approach: Approach::Green,
            backup: false,
            betas: None,
            seeds: None,
        }
    }
}

/// One explicit (scenario, approach, backup) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub scenario: StorageScenario,
    pub approach: Approach,
    pub backup: bool,
}

/// Everything a sweep needs. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: PathBuf,
    pub scenarios: Vec<StorageScenario>,
    pub betas: Vec<u32>,
    pub seeds: Vec<u64>,
    pub approaches: Vec<Approach>,
    pub backup: Vec<bool>,
    /// Explicit combinations replacing the scenarios x approaches x backup
    /// product.
    pub modes: Option<Vec<ModeSpec>>,
    pub renewable: Option<RenewableConfig>,
    pub workload: WorkloadRanges,
    pub profiles: ProfileRanges,
    pub params: PowerParams,
    pub model: ModelOptions,
    /// Nodes that generate chunks; all nodes when absent.
    pub sources: Option<Vec<NodeId>>,
    /// Nodes that may not host a data centre.
    pub dc_excluded: Vec<NodeId>,
    /// Nodes that may not host the backup node.
    pub bn_excluded: Vec<NodeId>,
    /// Write one LP file per row next to the CSV output.
    pub export_lp: bool,
    pub solver: SolveOptions,
    pub out_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            topology: PathBuf::new(),
            scenarios: vec![StorageScenario::A1],
            betas: (10..=60).step_by(10).collect(),
            seeds: vec![1],
            approaches: vec![Approach::Green, Approach::Classical],
            backup: vec![false, true],
            modes: None,
            renewable: None,
            workload: WorkloadRanges::default(),
            profiles: ProfileRanges::default(),
            params: PowerParams::default(),
            model: ModelOptions::default(),
            sources: None,
            dc_excluded: Vec::new(),
            bn_excluded: Vec::new(),
            export_lp: false,
            solver: SolveOptions::default(),
            out_dir: None,
        }
    }
}

fn non_empty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Invalid(format!("{what} list is empty")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = ScenarioConfig::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.topology.is_relative() {
            config.topology = base.join(&config.topology);
        }
        if let Some(out) = &config.out_dir {
            if out.is_relative() {
                config.out_dir = Some(base.join(out));
            }
        }
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Combinations solved in every (beta, seed) cell, sorted and unique.
    pub fn mode_specs(&self) -> Vec<ModeSpec> {
        let mut out = match &self.modes {
            Some(m) => m.clone(),
            None => {
                let mut out = Vec::new();
                for &scenario in &self.scenarios {
                    for &approach in &self.approaches {
                        for &backup in &self.backup {
                            out.push(ModeSpec { scenario, approach, backup });
                        }
                    }
                }
                out
            }
        };
        out.sort();
        out.dedup();
        out
    }

    /// Checks list contents and option ranges, then loads the topology.
    pub fn validate(&self) -> Result<Topology> {
        match &self.modes {
            Some(m) => non_empty(m, "mode")?,
            None => {
                non_empty(&self.scenarios, "scenario")?;
                non_empty(&self.approaches, "approach")?;
                non_empty(&self.backup, "backup mode")?;
            }
        }
        non_empty(&self.betas, "beta")?;
        non_empty(&self.seeds, "seed")?;
        if self.betas.contains(&0) {
            return Err(Error::Invalid("beta must be at least 1".into()));
        }
        if let Some(r) = &self.renewable {
            non_empty(&r.solar_kw, "solar")?;
            if r.solar_kw.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
                return Err(Error::Invalid("solar power must be finite and non-negative".into()));
            }
            if r.betas.as_ref().is_some_and(|b| b.is_empty() || b.contains(&0)) {
                return Err(Error::Invalid("renewable beta list must be non-empty and positive".into()));
            }
            if r.seeds.as_ref().is_some_and(|s| s.is_empty()) {
                return Err(Error::Invalid("renewable seed list is empty".into()));
            }
        }
        self.params.validate()?;
        self.solver.validate()?;
        if self.topology.as_os_str().is_empty() {
            return Err(Error::Invalid("config does not name a topology".into()));
        }
        let topology = Topology::load(&self.topology)?;
        let known = |list: &[NodeId], what: &str| -> Result<()> {
            match list.iter().find(|n| !topology.contains(**n)) {
                Some(n) => Err(Error::Invalid(format!("{what} names unknown node {n}"))),
                None => Ok(()),
            }
        };
        known(self.sources.as_deref().unwrap_or(&[]), "sources")?;
        known(&self.dc_excluded, "dc_excluded")?;
        known(&self.bn_excluded, "bn_excluded")?;
        Ok(topology)
    }

    /// Workload of one (scenario, beta, seed) cell.
    pub fn workload(&self, topology: &Topology, scenario: StorageScenario, beta: u32, seed: u64) -> Result<WorkloadInstance> {
        let mut work = generate_workload(&self.workload, beta, seed, topology)?
            .with_profiles(scenario_profiles(scenario, seed, topology, &self.profiles)?);
        if let Some(sources) = &self.sources {
            work.chunks.retain(|c| sources.contains(&c.source));
        }
        for p in &mut work.profiles {
            if self.dc_excluded.contains(&p.node) {
                p.dc_candidate = false;
            }
            if self.bn_excluded.contains(&p.node) {
                p.bn_candidate = false;
            }
        }
        Ok(work)
    }

    pub fn flags(&self, approach: Approach, backup: bool) -> ModeFlags {
        ModeFlags {
            approach,
            backup,
            dcn: self.model.dcn,
            integer_ports: self.model.integer_ports,
            same_volumes: self.model.same_volumes,
            switching: self.model.switching,
            ..ModeFlags::default()
        }
    }

    pub fn renewable_flags(&self, renewable: &RenewableConfig, topology: &Topology, solar_kw: f64) -> ModeFlags {
        let solar: BTreeMap<NodeId, f64> = topology.nodes().iter().map(|&n| (n, solar_kw)).collect();
        ModeFlags { renewable: true, solar_kw: solar, ..self.flags(renewable.approach, renewable.backup) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_fields() {
        let c = ScenarioConfig::from_json(r#"{"topology": "t.json", "betas": [2]}"#).unwrap();
        assert_eq!(c.betas, vec![2]);
        assert_eq!(c.approaches, vec![Approach::Green, Approach::Classical]);
        assert!(ScenarioConfig::from_json(r#"{"topolgy": "t.json"}"#).is_err());
        assert_eq!(ScenarioConfig::default().betas, vec![10, 20, 30, 40, 50, 60]);
        assert_eq!(ScenarioConfig::default().mode_specs().len(), 4);
        let c = ScenarioConfig::from_json(
            r#"{"modes": [{"scenario": "a2", "approach": "green", "backup": true}, {"scenario": "a2", "approach": "green", "backup": true}]}"#,
        )
        .unwrap();
        assert_eq!(c.mode_specs().len(), 1);
    }

    #[test]
    fn validation_rejects_empty_lists() {
        let c = ScenarioConfig { betas: vec![], ..Default::default() };
        assert!(c.validate().is_err());
        let c = ScenarioConfig::default();
        assert!(c.validate().is_err(), "missing topology");
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"topology": "net.json", "out_dir": "out"}"#).unwrap();
        let c = ScenarioConfig::load(&path).unwrap();
        assert_eq!(c.topology, dir.path().join("net.json"));
        assert_eq!(c.out_dir, Some(dir.path().join("out")));
    }
}
