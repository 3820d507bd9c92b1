//! Evaluates the power model on a hand-built assignment: one 100 Gb chunk
//! carried 80 km from node 1 to a data centre at node 2.
//!
//! `cargo run --example power_model`

use greenplan::names;
use greenplan::power::{objective_value, Assignment, PowerParams};
use greenplan::scenario::golden_instance;

fn main() -> greenplan::Result<()> {
    let t = golden_instance()?;
    let params = PowerParams::default();
    let nodes = [1, 2];
    let mut a = Assignment::new();
    for &i in &nodes {
        for name in [names::ar(i), names::ai(i), names::ab(i), names::sbch(i)] {
            a.set(name, 0.0);
        }
        for &j in &nodes {
            a.set(names::cht(i, j), 0.0);
            a.set(names::inf(i, j), 0.0);
            a.set(names::bch(i, j), 0.0);
            if i != j {
                a.set(names::c(i, j), 0.0);
                a.set(names::w(i, j), 0.0);
                a.set(names::f(i, j), 0.0);
            }
        }
    }
    a.set(names::dc(1), 0.0);
    a.set(names::dc(2), 1.0);
    // 100 Gb over 40 Gb/s wavelengths: 2.5 aggregation ports, 3 lightpaths.
    a.set(names::cht(1, 2), 100.0);
    a.set(names::ach(1), 2.5);
    a.set(names::ach(2), 0.0);
    a.set(names::c(1, 2), 3.0);
    a.set(names::w(1, 2), 3.0);
    a.set(names::f(1, 2), 1.0);
    a.set(names::pnw(1), 0.0);
    a.set(names::pnw(2), 2.0);
    a.set(names::sch(1), 0.0);
    a.set(names::sch(2), 100.0);
    // PRR 0.05: 5 Gb of information extracted inside the data centre.
    a.set(names::inf(2, 2), 5.0);

    let b = objective_value(&a, &t.topology, &t.workload, &params, t.flags.switching)?;
    println!("router ports      {:>10.2} W", b.router_ports_w);
    println!("transponders      {:>10.2} W", b.transponders_w);
    println!("regenerators      {:>10.2} W", b.regenerators_w);
    println!("EDFAs             {:>10.2} W", b.edfas_w);
    println!("optical switches  {:>10.2} W", b.optical_switches_w);
    println!("network x PUE     {:>10.2} W", b.network_total_w);
    println!("internal switching{:>10.2} W", b.internal_switch_router_w);
    println!("servers           {:>10.2} W", b.servers_w);
    println!("storage           {:>10.2} W", b.pn_dc_storage_w);
    println!("processing x PUE  {:>10.2} W", b.processing_total_w);
    println!("objective         {:>10.2} W", b.objective_w);
    Ok(())
}
