//! Solves one desk-scale instance, then audits the solution row by row and
//! recomputes its objective through the power model.
//!
//! `cargo run --release --example solve -- 2 1 green off`

use greenplan::model::{build_model, Approach};
use greenplan::names;
use greenplan::power::objective_value;
use greenplan::scenario::ScenarioConfig;
use greenplan::solver::{check_feasibility, solve, Tolerances};
use greenplan::workload::StorageScenario;

fn main() -> greenplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let beta: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let approach: Approach = args.next().unwrap_or_else(|| "green".into()).parse()?;
    let backup = args.next().is_some_and(|a| a == "on");

    let config = ScenarioConfig::load("configs/desk.json")?;
    let topo = config.validate()?;
    let work = config.workload(&topo, StorageScenario::A1, beta, seed)?;
    let flags = config.flags(approach, backup);
    let model = build_model(&topo, &work, &config.params, &flags)?;
    let solution = solve(&model, &config.solver)?;
    println!(
        "{}: objective {:.2} W, bound {:.2} W, {} nodes, {} LP iterations, {:.2} s",
        solution.status,
        solution.objective,
        solution.bound,
        solution.stats.nodes,
        solution.stats.lp_iterations,
        solution.stats.wall_time_s
    );
    if !solution.status.has_solution() {
        return Ok(());
    }
    let report = check_feasibility(&model, &solution.values, &Tolerances::default())?;
    println!("feasibility check: {}", if report.is_feasible() { "passed".to_string() } else { report.to_string() });
    let assignment = solution.assignment(&model);
    let b = objective_value(&assignment, &topo, &work, &config.params, flags.switching)?;
    println!("power model: network {:.2} W + processing {:.2} W = {:.2} W", b.network_total_w, b.processing_total_w, b.objective_w);
    let dcs: Vec<_> = topo.nodes().iter().filter(|&&n| assignment.get(&names::dc(n)).is_ok_and(|v| v > 0.5)).collect();
    println!("data centres at {dcs:?}");
    Ok(())
}
