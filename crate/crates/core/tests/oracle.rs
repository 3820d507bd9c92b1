//! The branch-and-bound solver against exhaustive enumeration.

use greenplan::model::build_model;
use greenplan::power::{objective_value, PowerParams};
use greenplan::scenario::{golden_instance, tiny_instance, GOLDEN_NETWORK_W};
use greenplan::solver::{check_feasibility, enumerate_oracle, solve, SolveOptions, Status, Tolerances};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn solver_never_exceeds_the_oracle() {
    let params = PowerParams::default();
    let mut singles = 0;
    for seed in 1..=25 {
        let t = tiny_instance(seed).unwrap();
        let model = build_model(&t.topology, &t.workload, &params, &t.flags).unwrap();
        let s = solve(&model, &SolveOptions::default()).unwrap();
        let o = enumerate_oracle(&t.topology, &t.workload, &params, &t.flags).unwrap();
        match (&o, s.status) {
            (Some(o), Status::Optimal) => {
                assert!(s.objective <= o.objective * (1.0 + 1e-6), "seed {seed}: {} > {}", s.objective, o.objective);
                if t.single_demand() {
                    singles += 1;
                    assert!(rel(s.objective, o.objective) <= 1e-6, "seed {seed}: {} vs {}", s.objective, o.objective);
                }
            }
            (None, Status::Optimal | Status::Infeasible) => {}
            (_, status) => panic!("seed {seed}: solver {status} with oracle {:?}", o.map(|o| o.objective)),
        }
        if s.status.has_solution() {
            assert!(check_feasibility(&model, &s.values, &Tolerances::default()).unwrap().is_feasible());
        }
    }
    assert!(singles >= 5);
}

#[test]
fn golden_two_node_instance() {
    let t = golden_instance().unwrap();
    let params = PowerParams::default();
    let model = build_model(&t.topology, &t.workload, &params, &t.flags).unwrap();
    let s = solve(&model, &SolveOptions::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    let b = objective_value(&s.assignment(&model), &t.topology, &t.workload, &params, t.flags.switching).unwrap();
    assert!((b.network_total_w - GOLDEN_NETWORK_W).abs() < 1e-9, "{}", b.network_total_w);
    assert!(rel(b.objective_w, s.objective) <= 1e-6);
    let o = enumerate_oracle(&t.topology, &t.workload, &params, &t.flags).unwrap().unwrap();
    assert!(rel(o.objective, s.objective) <= 1e-6);
}
