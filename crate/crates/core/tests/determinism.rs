//! Repeated solves and sweeps give identical results.

use std::fs;
use std::path::Path;

use greenplan::model::{build_model, Approach};
use greenplan::scenario::{run_sweep, ScenarioConfig};
use greenplan::solver::{solve, SolveOptions};
use greenplan::workload::StorageScenario;

fn config(out: &Path) -> ScenarioConfig {
    let text = format!(
        r#"{{
            "topology": "{}/data/desk6.json",
            "betas": [1],
            "seeds": [1, 2],
            "modes": [
                {{"scenario": "a1", "approach": "green", "backup": false}},
                {{"scenario": "a1", "approach": "classical", "backup": false}}
            ],
            "workload": {{"regular_gbps": [0, 5]}},
            "export_lp": true,
            "solver": {{"node_limit": 40}},
            "out_dir": "{}"
        }}"#,
        env!("CARGO_MANIFEST_DIR"),
        out.display()
    );
    ScenarioConfig::from_json(&text).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files(&path));
        } else if path.file_name().unwrap() != "timings.log" {
            out.push((path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn solver_is_repeatable() {
    let c = config(Path::new("unused"));
    let topo = c.validate().unwrap();
    let work = c.workload(&topo, StorageScenario::A1, 2, 3).unwrap();
    let model = build_model(&topo, &work, &c.params, &c.flags(Approach::Green, true)).unwrap();
    let opts = SolveOptions { node_limit: Some(30), ..SolveOptions::default() };
    let a = solve(&model, &opts).unwrap();
    let b = solve(&model, &opts).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.values, b.values);
    assert_eq!(a.bound.to_bits(), b.bound.to_bits());
    assert_eq!((a.stats.nodes, a.stats.lp_iterations), (b.stats.nodes, b.stats.lp_iterations));
}

#[test]
fn sweep_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    run_sweep(&config(&first), Some(&first)).unwrap();
    run_sweep(&config(&second), Some(&second)).unwrap();
    let (a, b) = (files(&first), files(&second));
    assert!(a.iter().any(|(name, _)| name.ends_with(".lp")));
    assert!(a.iter().any(|(name, _)| name == "results.csv"));
    assert_eq!(a.len(), b.len());
    for ((na, da), (nb, db)) in a.iter().zip(&b) {
        assert_eq!(na, nb);
        assert!(da == db, "{na} differs between runs");
    }
}
