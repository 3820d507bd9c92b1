//! The LP relaxation against brute-force vertex enumeration on small boxed
//! linear programs.

use greenplan::model::{Annotation, MilpModel, ModeFlags, Relation, VarId, VarKind};
use greenplan::solver::lp::{LpStatus, Relaxation};
use proptest::prelude::*;

const TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
struct Lp {
    cost: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn lp() -> impl Strategy<Value = Lp> {
    (2usize..=5, 1usize..=4).prop_flat_map(|(n, m)| {
        let coef = || (-4i32..=4).prop_map(f64::from);
        (
            prop::collection::vec(coef(), n),
            prop::collection::vec((1i32..=6).prop_map(f64::from), n),
            prop::collection::vec((prop::collection::vec(coef(), n), relation(), (-6i32..=12).prop_map(f64::from)), m),
        )
            .prop_map(|(cost, upper, rows)| Lp { cost, upper, rows })
    })
}

fn to_model(lp: &Lp) -> MilpModel {
    let mut m = MilpModel::new(ModeFlags::default());
    let vars: Vec<VarId> = lp.upper.iter().enumerate().map(|(i, &u)| m.add_var(format!("x{i}"), VarKind::Continuous, 0.0, u)).collect();
    for (k, (a, rel, b)) in lp.rows.iter().enumerate() {
        let terms = vars.iter().zip(a).map(|(&v, &c)| (v, c)).collect();
        m.add_constraint(format!("r{k}"), terms, *rel, *b, Annotation::Plumbing);
    }
    m.objective.terms = vars.iter().zip(&lp.cost).map(|(&v, &c)| (v, c)).collect();
    m
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn feasible(lp: &Lp, x: &[f64]) -> bool {
    let boxed = x.iter().zip(&lp.upper).all(|(&v, &u)| v >= -TOL && v <= u + TOL);
    boxed
        && lp.rows.iter().all(|(a, rel, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(c, v)| c * v).sum();
            match rel {
                Relation::Le => lhs <= b + TOL,
                Relation::Ge => lhs >= b - TOL,
                Relation::Eq => (lhs - b).abs() <= TOL,
            }
        })
}

/// Minimum over all basic solutions; `None` when no vertex is feasible.
fn vertex_optimum(lp: &Lp) -> Option<f64> {
    let n = lp.cost.len();
    let mut hyperplanes: Vec<(Vec<f64>, f64)> = lp.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for i in 0..n {
        let unit: Vec<f64> = (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
        hyperplanes.push((unit.clone(), 0.0));
        hyperplanes.push((unit, lp.upper[i]));
    }
    let mut best: Option<f64> = None;
    let total = hyperplanes.len();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a = pick.iter().map(|&k| hyperplanes[k].0.clone()).collect();
        let b = pick.iter().map(|&k| hyperplanes[k].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x) {
                let z: f64 = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(z, |b: f64| b.min(z)));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn relaxation_matches_vertex_enumeration(lp in lp()) {
        let model = to_model(&lp);
        let relax = Relaxation::new(&model).unwrap();
        let expected = vertex_optimum(&lp);
        match (relax.solve().unwrap(), expected) {
            (LpStatus::Optimal(state), Some(z)) => {
                let x = state.values(&relax);
                prop_assert!(feasible(&lp, &x), "returned point infeasible: {x:?}");
                prop_assert!((state.objective() - z).abs() <= 1e-6 * z.abs().max(1.0), "{} vs {z}", state.objective());
            }
            (LpStatus::Infeasible, None) => {}
            (LpStatus::Optimal(state), None) => prop_assert!(false, "solver found {} on an infeasible LP", state.objective()),
            (LpStatus::Infeasible, Some(z)) => prop_assert!(false, "solver missed a vertex with objective {z}"),
            (LpStatus::Unbounded, _) => prop_assert!(false, "boxed LP reported unbounded"),
        }
    }
}

#[test]
fn enumeration_on_a_known_lp() {
    // min -x - y, x + y <= 3, x <= 2, y <= 2: optimum -3.
    let lp = Lp { cost: vec![-1.0, -1.0], upper: vec![2.0, 2.0], rows: vec![(vec![1.0, 1.0], Relation::Le, 3.0)] };
    assert_eq!(vertex_optimum(&lp), Some(-3.0));
    let infeasible = Lp { cost: vec![1.0, 1.0], upper: vec![1.0, 1.0], rows: vec![(vec![1.0, 1.0], Relation::Ge, 3.0)] };
    assert_eq!(vertex_optimum(&infeasible), None);
}
