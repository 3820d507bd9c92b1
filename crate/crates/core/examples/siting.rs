//! Runs the star sweep and reports where data centres and the backup node
//! were placed.
//!
//! `cargo run --release --example siting -- configs/star.json`

use greenplan::scenario::{report_siting, run_sweep, ScenarioConfig};

fn main() -> greenplan::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/star.json".into());
    let config = ScenarioConfig::load(&path)?;
    let out = run_sweep(&config, config.out_dir.as_deref())?;
    for row in &out.rows {
        println!("{:<22} {:<9} dc {:?} bn {:?}", row.job().label(), row.status, row.dc_nodes, row.bn_node);
    }
    let siting = report_siting(&out.rows)?;
    print!("{}", siting.to_csv());
    for n in config.validate()?.nodes() {
        println!("node {n}: backup node in {:.0}% of backup rows", 100.0 * siting.bn_share(*n));
    }
    Ok(())
}
