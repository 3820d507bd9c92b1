//! Cross-checks the solver against exhaustive enumeration on random tiny
//! instances and on the hand-computed two-node instance.
//!
//! `cargo run --release --example oracle -- 25`

use greenplan::model::build_model;
use greenplan::power::PowerParams;
use greenplan::scenario::{golden_instance, tiny_instance, TinyInstance};
use greenplan::solver::{enumerate_oracle, solve, SolveOptions};

fn compare(t: &TinyInstance) -> greenplan::Result<()> {
    let params = PowerParams::default();
    let model = build_model(&t.topology, &t.workload, &params, &t.flags)?;
    let milp = solve(&model, &SolveOptions::default())?;
    let oracle = enumerate_oracle(&t.topology, &t.workload, &params, &t.flags)?;
    let milp_obj = milp.status.has_solution().then_some(milp.objective);
    let oracle_obj = oracle.as_ref().map(|o| o.objective);
    println!(
        "seed {:>3} n={} chunks={} {:<9} backup={:<5} dcn={} single={:<5} milp {:<10} {:>12} oracle {:>12} nodes {}",
        t.seed,
        t.topology.node_count(),
        t.workload.chunks.len(),
        t.flags.approach,
        t.flags.backup,
        t.flags.dcn,
        t.single_demand(),
        milp.status,
        milp_obj.map_or("-".into(), |v| format!("{v:.3}")),
        oracle_obj.map_or("-".into(), |v| format!("{v:.3}")),
        milp.stats.nodes,
    );
    Ok(())
}

fn main() -> greenplan::Result<()> {
    let count: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(25);
    compare(&golden_instance()?)?;
    for seed in 1..=count {
        compare(&tiny_instance(seed)?)?;
    }
    Ok(())
}
