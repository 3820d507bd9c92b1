//! Loads a topology and prints its links, amplifier counts and degree table.
//!
//! `cargo run --example topology -- data/nsfnet.json`

use greenplan::topology::Topology;

fn main() -> greenplan::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/nsfnet.json".into());
    let topo = Topology::load(&path)?;
    println!(
        "{}: {} nodes, {} directed links, {} wavelengths x {} Gb/s per fibre, span {} km, tree: {}",
        path,
        topo.node_count(),
        topo.links().len(),
        topo.wavelengths_per_fiber(),
        topo.wavelength_gbps(),
        topo.span_km(),
        topo.is_tree()
    );
    for link in topo.links().iter().filter(|l| l.from < l.to) {
        println!("  {:>2} - {:<2} {:>6} km  {:>3} EDFAs  {} regenerators", link.from, link.to, link.km, link.edfas, link.regenerators);
    }
    for &n in topo.nodes() {
        println!("  node {:>2}: degree {}, optical switch {} W", n, topo.neighbors(n).len(), topo.optical_switch_w(n));
    }
    Ok(())
}
