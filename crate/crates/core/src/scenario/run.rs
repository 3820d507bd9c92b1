use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Serialize, Serializer};

use super::config::{RenewableConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::model::{build_model, Approach, MilpModel, ModeFlags};
use crate::names;
use crate::power::{node_network_power, non_renewable_w, objective_value, Assignment, PowerBreakdown};
use crate::solver::{check_feasibility, solve, solve_with_start, to_lp_string, Solution, Tolerances};
use crate::topology::{NodeId, Topology};
use crate::workload::{StorageScenario, WorkloadInstance};

/// Relative tolerance for the objective recomputation.
pub const OBJECTIVE_TOL: f64 = 1e-6;

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "GREENPLAN_THREADS";

/// One cell of the sweep matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Job {
    pub scenario: StorageScenario,
    pub beta: u32,
    pub seed: u64,
    pub approach: Approach,
    pub backup: bool,
}

impl Job {
    /// File-name friendly label, e.g. `a1_b2_s1_green_off`.
    pub fn label(&self) -> String {
        format!("{}_b{}_s{}_{}_{}", self.scenario, self.beta, self.seed, self.approach, on_off_str(self.backup))
    }
}

fn on_off_str(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn on_off<S: Serializer>(b: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(on_off_str(*b))
}

fn node_list<S: Serializer>(nodes: &[NodeId], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
    s.serialize_str(&text.join(";"))
}

/// One line of `results.csv`. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub scenario: StorageScenario,
    pub beta: u32,
    pub seed: u64,
    pub approach: Approach,
    #[serde(serialize_with = "on_off")]
    pub backup: bool,
    pub status: String,
    pub gap: Option<f64>,
    pub objective_w: Option<f64>,
    pub bound_w: Option<f64>,
    pub router_ports_w: Option<f64>,
    pub transponders_w: Option<f64>,
    pub regenerators_w: Option<f64>,
    pub edfas_w: Option<f64>,
    pub optical_switches_w: Option<f64>,
    pub internal_switch_router_w: Option<f64>,
    pub servers_w: Option<f64>,
    pub pn_dc_storage_w: Option<f64>,
    pub bn_storage_w: Option<f64>,
    pub network_w: Option<f64>,
    pub processing_w: Option<f64>,
    /// `100 (classical - green) / classical` against the classical row with
    /// the same scenario, beta, seed and backup mode.
    pub savings_pct: Option<f64>,
    #[serde(serialize_with = "node_list")]
    pub dc_nodes: Vec<NodeId>,
    pub bn_node: Option<NodeId>,
    /// Solution passed the row-by-row check and the objective recomputation.
    pub verified: bool,
    pub note: String,
    pub bb_nodes: u64,
    pub lp_iterations: u64,
}

impl ExperimentRow {
    pub fn job(&self) -> Job {
        Job { scenario: self.scenario, beta: self.beta, seed: self.seed, approach: self.approach, backup: self.backup }
    }

    pub fn proven_optimal(&self) -> bool {
        self.status == "optimal"
    }
}

/// Per-node usage of one solved row (`storage.csv`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageRow {
    pub scenario: StorageScenario,
    pub beta: u32,
    pub seed: u64,
    pub approach: Approach,
    #[serde(serialize_with = "on_off")]
    pub backup: bool,
    pub node: NodeId,
    pub workload_ghz: f64,
    pub stored_gb: f64,
    pub backup_stored_gb: f64,
    pub storage_capacity_gb: f64,
    pub dc: bool,
    pub bn: bool,
}

/// One solar level of one (beta, seed) cell (`renewable.csv`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewableRow {
    pub scenario: StorageScenario,
    pub approach: Approach,
    #[serde(serialize_with = "on_off")]
    pub backup: bool,
    pub beta: u32,
    pub seed: u64,
    pub solar_kw: f64,
    pub status: String,
    pub gap: Option<f64>,
    pub tnre_w: Option<f64>,
    pub bound_w: Option<f64>,
    /// Network power of the same solution without solar.
    pub network_w: Option<f64>,
    /// TNRE reduction against the lowest solar level of the cell.
    pub reduction_pct: Option<f64>,
    pub verified: bool,
    pub note: String,
    pub bb_nodes: u64,
}

/// Result of solving one job, with the full assignment kept for warm starts.
pub struct JobResult {
    pub row: ExperimentRow,
    pub storage: Vec<StorageRow>,
    pub model: MilpModel,
    pub solution: Solution,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    /// Sorted by scenario, beta, seed, approach, backup.
    pub rows: Vec<ExperimentRow>,
    pub storage: Vec<StorageRow>,
    /// Sorted by beta, seed, solar level.
    pub renewable: Vec<RenewableRow>,
    /// Wall-clock seconds per row label; not part of the CSV output.
    pub timings: Vec<(String, f64)>,
}

/// Worker count from `GREENPLAN_THREADS` (default 1).
pub fn worker_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Invalid(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

/// Runs `work` over `items` on up to `threads` workers. Results come back in
/// item order regardless of scheduling.
fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, work: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= items.len() {
                    break;
                }
                let out = work(&items[k]);
                slots.lock().expect("result lock")[k] = Some(out);
            });
        }
    });
    slots.into_inner().expect("result lock").into_iter().map(|r| r.expect("every item processed")).collect()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Values for `model` taken by name from `from`; absent names are zero.
fn mapped_values(model: &MilpModel, from: &Assignment) -> Vec<f64> {
    model.variables.iter().map(|v| from.get(&v.name).unwrap_or(0.0)).collect()
}

/// Cheapest candidate that is feasible for `model`.
fn best_start(model: &MilpModel, candidates: &[&Assignment]) -> Result<Option<Vec<f64>>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for a in candidates {
        let values = mapped_values(model, a);
        if check_feasibility(model, &values, &Tolerances::default())?.is_feasible() {
            let obj = model.objective.evaluate(&values);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, values));
            }
        }
    }
    Ok(best.map(|(_, v)| v))
}

fn solve_model(config: &ScenarioConfig, model: &MilpModel, starts: &[&Assignment]) -> Result<Solution> {
    match best_start(model, starts)? {
        Some(start) => solve_with_start(model, &config.solver, &start),
        None => solve(model, &config.solver),
    }
}

fn chosen(values: &Assignment, nodes: &[NodeId], name: fn(NodeId) -> String) -> Vec<NodeId> {
    nodes.iter().copied().filter(|&n| values.get(&name(n)).unwrap_or(0.0) > 0.5).collect()
}

/// Feasibility audit plus objective recomputation. Returns the breakdown and
/// a note that is empty when both checks pass.
fn audit(
    model: &MilpModel,
    solution: &Solution,
    topology: &Topology,
    work: &WorkloadInstance,
    config: &ScenarioConfig,
    flags: &ModeFlags,
) -> Result<(PowerBreakdown, Assignment, String)> {
    let report = check_feasibility(model, &solution.values, &Tolerances::default())?;
    let assignment = solution.assignment(model);
    let breakdown = objective_value(&assignment, topology, work, &config.params, flags.switching)?;
    let mut note = String::new();
    if let Some(v) = report.violations.first() {
        note = format!("{} violation(s), first: {v}", report.violations.len());
    } else if flags.renewable {
        let per_node = node_network_power(&assignment, topology, &config.params)?;
        let tnre = non_renewable_w(&per_node, &flags.solar_kw);
        if relative(tnre, solution.objective) > OBJECTIVE_TOL {
            note = format!("recomputed TNRE {tnre} differs from solver objective {}", solution.objective);
        }
    } else if relative(breakdown.objective_w, solution.objective) > OBJECTIVE_TOL {
        note = format!("recomputed objective {} differs from solver objective {}", breakdown.objective_w, solution.objective);
    }
    Ok((breakdown, assignment, note))
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Builds, solves and audits one job. `starts` are assignments of related
/// rows tried as incumbents; the first feasible, cheapest one is used.
pub fn solve_job(
    config: &ScenarioConfig,
    topology: &Topology,
    job: Job,
    starts: &[&Assignment],
    lp_dir: Option<&Path>,
) -> Result<JobResult> {
    let clock = Instant::now();
    let work = config.workload(topology, job.scenario, job.beta, job.seed)?;
    let flags = config.flags(job.approach, job.backup);
    let model = build_model(topology, &work, &config.params, &flags)?;
    if let Some(dir) = lp_dir {
        let path = dir.join(format!("{}.lp", job.label()));
        fs::write(&path, to_lp_string(&model)).map_err(|e| Error::io(&path, e))?;
    }
    let solution = solve_model(config, &model, starts)?;
    let mut row = ExperimentRow {
        scenario: job.scenario,
        beta: job.beta,
        seed: job.seed,
        approach: job.approach,
        backup: job.backup,
        status: solution.status.label().to_string(),
        gap: finite(solution.gap),
        objective_w: None,
        bound_w: finite(solution.bound),
        router_ports_w: None,
        transponders_w: None,
        regenerators_w: None,
        edfas_w: None,
        optical_switches_w: None,
        internal_switch_router_w: None,
        servers_w: None,
        pn_dc_storage_w: None,
        bn_storage_w: None,
        network_w: None,
        processing_w: None,
        savings_pct: None,
        dc_nodes: Vec::new(),
        bn_node: None,
        verified: false,
        note: String::new(),
        bb_nodes: solution.stats.nodes,
        lp_iterations: solution.stats.lp_iterations,
    };
    let mut storage = Vec::new();
    if !solution.status.has_solution() {
        row.note = "no solution".into();
    } else {
        let (b, values, note) = audit(&model, &solution, topology, &work, config, &flags)?;
        row.objective_w = Some(solution.objective);
        row.router_ports_w = Some(b.router_ports_w);
        row.transponders_w = Some(b.transponders_w);
        row.regenerators_w = Some(b.regenerators_w);
        row.edfas_w = Some(b.edfas_w);
        row.optical_switches_w = Some(b.optical_switches_w);
        row.internal_switch_router_w = Some(b.internal_switch_router_w);
        row.servers_w = Some(b.servers_w);
        row.pn_dc_storage_w = Some(b.pn_dc_storage_w);
        row.bn_storage_w = Some(b.bn_storage_w);
        row.network_w = Some(b.network_total_w);
        row.processing_w = Some(b.processing_total_w);
        let nodes = topology.nodes();
        row.dc_nodes = chosen(&values, nodes, names::dc);
        row.bn_node = if job.backup { chosen(&values, nodes, names::bn).first().copied() } else { None };
        row.verified = note.is_empty();
        row.note = note;
        for p in &work.profiles {
            let get = |name: String| values.get(&name).unwrap_or(0.0);
            storage.push(StorageRow {
                scenario: job.scenario,
                beta: job.beta,
                seed: job.seed,
                approach: job.approach,
                backup: job.backup,
                node: p.node,
                workload_ghz: get(names::pnw(p.node)),
                stored_gb: get(names::sch(p.node)),
                backup_stored_gb: get(names::sbch(p.node)),
                storage_capacity_gb: p.storage_gb,
                dc: row.dc_nodes.contains(&p.node),
                bn: row.bn_node == Some(p.node),
            });
        }
    }
    Ok(JobResult { row, storage, model, solution, seconds: clock.elapsed().as_secs_f64() })
}

/// Jobs of one (beta, seed) cell in solve order: backup before no-backup and
/// limited storage before large storage, so each solution can seed the
/// relaxed variants that follow it.
fn cell_jobs(config: &ScenarioConfig, beta: u32, seed: u64) -> Vec<Job> {
    let mut jobs: Vec<Job> = config
        .mode_specs()
        .into_iter()
        .map(|m| Job { scenario: m.scenario, beta, seed, approach: m.approach, backup: m.backup })
        .collect();
    jobs.sort_by_key(|j| (j.approach, std::cmp::Reverse(j.scenario), std::cmp::Reverse(j.backup)));
    jobs
}

/// Earlier jobs in the cell whose solutions stay feasible for `job`.
fn relaxes(job: &Job, earlier: &Job) -> bool {
    job.approach == earlier.approach
        && job.beta == earlier.beta
        && job.seed == earlier.seed
        && ((job.scenario == earlier.scenario && earlier.backup && !job.backup)
            || (job.backup == earlier.backup
                && earlier.scenario == StorageScenario::A2
                && job.scenario == StorageScenario::A1))
}

fn cells(betas: &[u32], seeds: &[u64]) -> Vec<(u32, u64)> {
    let mut betas = betas.to_vec();
    betas.sort();
    betas.dedup();
    let mut seeds = seeds.to_vec();
    seeds.sort();
    seeds.dedup();
    betas.iter().flat_map(|&b| seeds.iter().map(move |&s| (b, s))).collect()
}

type CellOutput = (Vec<ExperimentRow>, Vec<StorageRow>, Vec<(String, f64)>);

fn run_cell(config: &ScenarioConfig, topology: &Topology, beta: u32, seed: u64, lp_dir: Option<&Path>) -> Result<CellOutput> {
    let mut done: Vec<(Job, Assignment)> = Vec::new();
    let mut out: CellOutput = Default::default();
    for job in cell_jobs(config, beta, seed) {
        let starts: Vec<&Assignment> = done.iter().filter(|(j, _)| relaxes(&job, j)).map(|(_, a)| a).collect();
        let result = solve_job(config, topology, job, &starts, lp_dir)?;
        if result.solution.status.has_solution() {
            done.push((job, result.solution.assignment(&result.model)));
        }
        out.2.push((job.label(), result.seconds));
        out.0.push(result.row);
        out.1.extend(result.storage);
    }
    Ok(out)
}

/// Fills `savings_pct` on green rows from the matched classical rows.
pub fn fill_savings(rows: &mut [ExperimentRow]) {
    let classical: BTreeMap<(StorageScenario, u32, u64, bool), f64> = rows
        .iter()
        .filter(|r| r.approach == Approach::Classical)
        .filter_map(|r| r.objective_w.map(|o| ((r.scenario, r.beta, r.seed, r.backup), o)))
        .collect();
    for r in rows.iter_mut().filter(|r| r.approach == Approach::Green) {
        r.savings_pct = match (r.objective_w, classical.get(&(r.scenario, r.beta, r.seed, r.backup))) {
            (Some(g), Some(&c)) if c != 0.0 => Some(100.0 * (c - g) / c),
            _ => None,
        };
    }
}

/// Solves every (scenario, beta, seed, approach, backup) row, audits each
/// solution and, when `out_dir` is given, writes the CSV and plot files.
/// Runs the renewable sweep too when the config enables it.
pub fn run_sweep(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<SweepOutput> {
    let topology = config.validate()?;
    let threads = worker_count()?;
    let lp_dir = match (out_dir, config.export_lp) {
        (Some(dir), true) => {
            let lp = dir.join("lp");
            fs::create_dir_all(&lp).map_err(|e| Error::io(&lp, e))?;
            Some(lp)
        }
        _ => None,
    };
    let cells = cells(&config.betas, &config.seeds);
    let outputs = parallel_map(&cells, threads, |&(beta, seed)| run_cell(config, &topology, beta, seed, lp_dir.as_deref()))?;
    let mut out = SweepOutput::default();
    for (rows, storage, timings) in outputs {
        out.rows.extend(rows);
        out.storage.extend(storage);
        out.timings.extend(timings);
    }
    out.rows.sort_by_key(|r| r.job());
    out.storage.sort_by_key(|s| {
        (Job { scenario: s.scenario, beta: s.beta, seed: s.seed, approach: s.approach, backup: s.backup }, s.node)
    });
    fill_savings(&mut out.rows);
    if let Some(dir) = out_dir {
        super::output::write_results(dir, &out)?;
    }
    if config.renewable.is_some() {
        let (renewable, timings) = renewable_rows(config, &topology, threads)?;
        out.renewable = renewable;
        out.timings.extend(timings);
        if let Some(dir) = out_dir {
            super::output::write_renewable(dir, &out.renewable)?;
        }
    }
    if let Some(dir) = out_dir {
        super::output::write_timings(dir, &out.timings)?;
    }
    Ok(out)
}

/// Solar sweep only; `config.renewable` must be set.
pub fn run_renewable_sweep(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<Vec<RenewableRow>> {
    let topology = config.validate()?;
    let (rows, timings) = renewable_rows(config, &topology, worker_count()?)?;
    if let Some(dir) = out_dir {
        super::output::write_renewable(dir, &rows)?;
        super::output::write_timings(dir, &timings)?;
    }
    Ok(rows)
}

fn renewable_rows(config: &ScenarioConfig, topology: &Topology, threads: usize) -> Result<(Vec<RenewableRow>, Vec<(String, f64)>)> {
    let renewable = config.renewable.as_ref().ok_or_else(|| Error::Invalid("config has no renewable section".into()))?;
    let cells = cells(renewable.betas.as_deref().unwrap_or(&config.betas), renewable.seeds.as_deref().unwrap_or(&config.seeds));
    let outputs = parallel_map(&cells, threads, |&(beta, seed)| renewable_cell(config, renewable, topology, beta, seed))?;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in outputs {
        rows.extend(r);
        timings.extend(t);
    }
    Ok((rows, timings))
}

/// Solves each solar level in increasing order, seeding every level with the
/// previous solution (more solar only relaxes the solar cap).
pub fn renewable_cell(
    config: &ScenarioConfig,
    renewable: &RenewableConfig,
    topology: &Topology,
    beta: u32,
    seed: u64,
) -> Result<(Vec<RenewableRow>, Vec<(String, f64)>)> {
    let mut levels = renewable.solar_kw.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let work = config.workload(topology, renewable.scenario, beta, seed)?;
    let mut previous: Option<Assignment> = None;
    let mut rows: Vec<RenewableRow> = Vec::new();
    let mut timings = Vec::new();
    for &solar in &levels {
        let clock = Instant::now();
        let flags = config.renewable_flags(renewable, topology, solar);
        let model = build_model(topology, &work, &config.params, &flags)?;
        let starts: Vec<&Assignment> = previous.iter().collect();
        let solution = solve_model(config, &model, &starts)?;
        let mut row = RenewableRow {
            scenario: renewable.scenario,
            approach: renewable.approach,
            backup: renewable.backup,
            beta,
            seed,
            solar_kw: solar,
            status: solution.status.label().to_string(),
            gap: finite(solution.gap),
            tnre_w: None,
            bound_w: finite(solution.bound),
            network_w: None,
            reduction_pct: None,
            verified: false,
            note: "no solution".into(),
            bb_nodes: solution.stats.nodes,
        };
        if solution.status.has_solution() {
            let (b, values, note) = audit(&model, &solution, topology, &work, config, &flags)?;
            row.tnre_w = Some(solution.objective);
            row.network_w = Some(b.network_total_w);
            row.verified = note.is_empty();
            row.note = note;
            previous = Some(values);
        }
        if let (Some(base), Some(t)) = (rows.first().and_then(|r| r.tnre_w), row.tnre_w) {
            row.reduction_pct = Some(if base != 0.0 { 100.0 * (base - t) / base } else { 0.0 });
        } else if rows.is_empty() && row.tnre_w.is_some() {
            row.reduction_pct = Some(0.0);
        }
        timings.push((format!("{}_b{beta}_s{seed}_solar{solar}", renewable.scenario), clock.elapsed().as_secs_f64()));
        rows.push(row);
    }
    Ok((rows, timings))
}

/// TNRE never increases with solar power within each (beta, seed) cell.
pub fn tnre_non_increasing(rows: &[RenewableRow]) -> bool {
    let mut by_cell: BTreeMap<(u32, u64), Vec<&RenewableRow>> = BTreeMap::new();
    for r in rows {
        by_cell.entry((r.beta, r.seed)).or_default().push(r);
    }
    by_cell.values_mut().all(|cell| {
        cell.sort_by(|a, b| a.solar_kw.total_cmp(&b.solar_kw));
        cell.windows(2).all(|w| match (w[0].tnre_w, w[1].tnre_w) {
            (Some(a), Some(b)) => b <= a + OBJECTIVE_TOL * a.abs().max(1.0),
            _ => false,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_order_puts_restricted_variants_first() {
        let config = ScenarioConfig {
            scenarios: vec![StorageScenario::A1, StorageScenario::A2],
            approaches: vec![Approach::Classical, Approach::Green],
            ..Default::default()
        };
        let jobs = cell_jobs(&config, 2, 1);
        assert_eq!(jobs.len(), 8);
        assert_eq!(jobs[0], Job { scenario: StorageScenario::A2, beta: 2, seed: 1, approach: Approach::Green, backup: true });
        assert!(relaxes(&jobs[1], &jobs[0]));
        assert!(relaxes(&jobs[2], &jobs[0]));
        assert!(!relaxes(&jobs[0], &jobs[1]));
        assert!(!relaxes(&jobs[4], &jobs[0]), "approaches never seed each other");
    }

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u32> = (0..20).collect();
        let out = parallel_map(&items, 4, |&x| Ok(x * 2)).unwrap();
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
        let err = parallel_map(&items, 3, |&x| if x == 7 { Err(Error::Invalid("x".into())) } else { Ok(x) });
        assert!(err.is_err());
    }

    fn row(approach: Approach, objective: f64) -> ExperimentRow {
        ExperimentRow {
            scenario: StorageScenario::A1,
            beta: 2,
            seed: 1,
            approach,
            backup: false,
            status: "optimal".into(),
            gap: Some(0.0),
            objective_w: Some(objective),
            bound_w: Some(objective),
            router_ports_w: None,
            transponders_w: None,
            regenerators_w: None,
            edfas_w: None,
            optical_switches_w: None,
            internal_switch_router_w: None,
            servers_w: None,
            pn_dc_storage_w: None,
            bn_storage_w: None,
            network_w: None,
            processing_w: None,
            savings_pct: None,
            dc_nodes: vec![1, 4],
            bn_node: None,
            verified: true,
            note: String::new(),
            bb_nodes: 1,
            lp_iterations: 1,
        }
    }

    #[test]
    fn savings_use_matched_rows() {
        let mut rows = vec![row(Approach::Green, 60.0), row(Approach::Classical, 100.0)];
        let mut other_seed = row(Approach::Green, 10.0);
        other_seed.seed = 2;
        rows.push(other_seed);
        fill_savings(&mut rows);
        assert_eq!(rows[0].savings_pct, Some(40.0));
        assert_eq!(rows[1].savings_pct, None);
        assert_eq!(rows[2].savings_pct, None, "no classical row for seed 2");
    }

    fn solar_row(solar: f64, tnre: f64) -> RenewableRow {
        RenewableRow {
            scenario: StorageScenario::A1,
            approach: Approach::Green,
            backup: false,
            beta: 2,
            seed: 1,
            solar_kw: solar,
            status: "optimal".into(),
            gap: Some(0.0),
            tnre_w: Some(tnre),
            bound_w: Some(tnre),
            network_w: None,
            reduction_pct: None,
            verified: true,
            note: String::new(),
            bb_nodes: 0,
        }
    }

    #[test]
    fn monotonicity_check() {
        assert!(tnre_non_increasing(&[solar_row(0.0, 10.0), solar_row(20.0, 9.0), solar_row(40.0, 9.0)]));
        assert!(!tnre_non_increasing(&[solar_row(20.0, 11.0), solar_row(0.0, 10.0)]));
    }
}
