//! Draws a seeded workload and shows how the two storage scenarios differ
//! only in per-node storage.
//!
//! `cargo run --example workload -- 3 1`

use greenplan::topology::Topology;
use greenplan::workload::{generate_workload, info_volume, scenario_profiles, ProfileRanges, StorageScenario, WorkloadRanges};

fn main() -> greenplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let beta: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let topo = Topology::load("data/desk6.json")?;
    let work = generate_workload(&WorkloadRanges::default(), beta, seed, &topo)?;
    println!("beta {beta}, seed {seed}: {} chunks", work.chunks.len());
    for c in &work.chunks {
        println!(
            "  node {} chunk {}: raw {:>6.1} Gb, cleansed {:>6.1} Gb, PRR {:.3}, info {:>6.2} Gb, {:.2} GHz",
            c.source, c.index, c.raw_volume_gb, c.clean_volume_gb, c.prr, info_volume(c), c.cpu_ghz
        );
    }
    let regular: f64 = work.regular_traffic.iter().map(|d| d.gbps).sum();
    println!("regular traffic: {} demands, {:.1} Gb/s in total", work.regular_traffic.len(), regular);
    let ranges = ProfileRanges::default();
    let a1 = scenario_profiles(StorageScenario::A1, seed, &topo, &ranges)?;
    let a2 = scenario_profiles(StorageScenario::A2, seed, &topo, &ranges)?;
    for (p, q) in a1.iter().zip(&a2) {
        println!(
            "  node {}: {} servers ({} GHz max), storage A1 {:.3e} Gb, A2 {:.0} Gb",
            p.node,
            p.servers,
            p.max_workload_ghz(),
            p.storage_gb,
            q.storage_gb
        );
    }
    Ok(())
}
