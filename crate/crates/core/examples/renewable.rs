//! Sweeps the solar power available at every node and reports the
//! non-renewable network power.
//!
//! `cargo run --release --example renewable -- configs/renewable.json`

use greenplan::scenario::{run_renewable_sweep, tnre_non_increasing, ScenarioConfig};

fn main() -> greenplan::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/renewable.json".into());
    let config = ScenarioConfig::load(&path)?;
    let rows = run_renewable_sweep(&config, config.out_dir.as_deref())?;
    for r in &rows {
        println!(
            "beta {} seed {} solar {:>4} kW: {:<9} TNRE {:>12} W  network {:>12} W  reduction {:>6}",
            r.beta,
            r.seed,
            r.solar_kw,
            r.status,
            r.tnre_w.map_or("-".into(), |v| format!("{v:.2}")),
            r.network_w.map_or("-".into(), |v| format!("{v:.2}")),
            r.reduction_pct.map_or("-".into(), |v| format!("{v:.2}%")),
        );
    }
    println!("TNRE non-increasing in solar power: {}", tnre_non_increasing(&rows));
    Ok(())
}
