//! Runs a sweep from a JSON config and prints one line per row.
//!
//! `cargo run --release --example sweep -- configs/desk.json out/desk`

use std::collections::HashMap;
use std::path::PathBuf;

use greenplan::scenario::{run_sweep, ScenarioConfig};

fn main() -> greenplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args.next().unwrap_or_else(|| "configs/desk.json".into());
    let config = ScenarioConfig::load(&config_path)?;
    let out_dir = args.next().map(PathBuf::from).or(config.out_dir.clone());
    let out = run_sweep(&config, out_dir.as_deref())?;
    let timings: HashMap<&str, f64> = out.timings.iter().map(|(l, t)| (l.as_str(), *t)).collect();
    for row in &out.rows {
        let label = row.job().label();
        println!(
            "{:<24} {:<9} obj {:>14} savings {:>7} dc {:?} bn {:?} {:.1}s",
            label,
            row.status,
            row.objective_w.map_or("-".into(), |o| format!("{o:.2}")),
            row.savings_pct.map_or("-".into(), |s| format!("{s:.2}%")),
            row.dc_nodes,
            row.bn_node,
            timings.get(label.as_str()).copied().unwrap_or(0.0)
        );
    }
    Ok(())
}
