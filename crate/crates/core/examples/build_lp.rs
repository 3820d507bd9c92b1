//! Builds the model for one desk-scale instance, prints its size per
//! constraint family and writes it in LP format.
//!
//! `cargo run --example build_lp -- classical on /tmp/desk.lp`

use greenplan::model::{build_model, Annotation};
use greenplan::scenario::ScenarioConfig;
use greenplan::solver::export_lp;
use greenplan::workload::StorageScenario;

fn main() -> greenplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let approach = args.next().unwrap_or_else(|| "green".into()).parse()?;
    let backup = args.next().is_some_and(|a| a == "on");
    let out = args.next().unwrap_or_else(|| "desk.lp".into());
    let config = ScenarioConfig::load("configs/desk.json")?;
    let topo = config.validate()?;
    let work = config.workload(&topo, StorageScenario::A1, 2, 1)?;
    let flags = config.flags(approach, backup);
    let model = build_model(&topo, &work, &config.params, &flags)?;
    let integral = model.variables.iter().filter(|v| v.kind.is_integral()).count();
    println!("{} variables ({} integral), {} constraints", model.num_vars(), integral, model.constraints.len());
    let families = (12..=44).map(Annotation::Equation).chain([Annotation::Classical, Annotation::Plumbing]);
    for eq in families {
        let n = model.rows_annotated(eq);
        if n > 0 {
            println!("  {:<10} {:>5} rows", eq.to_string(), n);
        }
    }
    export_lp(&model, &out)?;
    println!("wrote {out} (digest {})", model.digest());
    Ok(())
}
