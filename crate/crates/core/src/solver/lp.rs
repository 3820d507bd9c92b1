//! Continuous relaxation of a [`MilpModel`], backed by `microlp`'s
//! bounded-variable simplex. Branching edits are applied to a solved state so
//! the dual simplex restarts from the parent basis; if that warm start fails
//! numerically the node is solved again from scratch with its bounds
//! tightened directly.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::model::{MilpModel, Relation};

/// A branching edit on one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Upper(f64),
    Lower(f64),
    Fix(f64),
}

pub enum LpStatus {
    Optimal(LpState),
    Infeasible,
    Unbounded,
}

/// A solved relaxation that can be edited and re-solved.
#[derive(Clone)]
pub struct LpState {
    inner: microlp::Solution,
    /// Edits applied since the root, oldest first.
    edits: Vec<(usize, Bound)>,
}

impl LpState {
    pub fn objective(&self) -> f64 {
        self.inner.objective()
    }

    pub fn iterations(&self) -> u64 {
        self.inner.stats().lp_iterations as u64
    }

    pub fn value(&self, relaxation: &Relaxation, index: usize) -> f64 {
        self.inner.var_value_raw(relaxation.vars[index])
    }

    pub fn values(&self, relaxation: &Relaxation) -> Vec<f64> {
        relaxation.vars.iter().map(|&v| self.inner.var_value_raw(v)).collect()
    }
}

pub struct Relaxation {
    problem: Problem,
    vars: Vec<microlp::Variable>,
    cost: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, ComparisonOp, f64)>,
}

fn op(relation: Relation) -> ComparisonOp {
    match relation {
        Relation::Le => ComparisonOp::Le,
        Relation::Eq => ComparisonOp::Eq,
        Relation::Ge => ComparisonOp::Ge,
    }
}

fn classify(
    outcome: std::result::Result<microlp::SolveOutcome, microlp::Error>,
    edits: Vec<(usize, Bound)>,
) -> Result<LpStatus> {
    match outcome {
        Ok(microlp::SolveOutcome::Solution(inner)) => Ok(LpStatus::Optimal(LpState { inner, edits })),
        Ok(microlp::SolveOutcome::Interrupted(_)) => Err(Error::Solver("LP solve interrupted".into())),
        Err(microlp::Error::Infeasible) => Ok(LpStatus::Infeasible),
        Err(microlp::Error::Unbounded) => Ok(LpStatus::Unbounded),
        Err(e) => Err(Error::Solver(format!("LP numerical failure: {e}"))),
    }
}

impl Relaxation {
    /// Drops integrality; keeps bounds, rows and the linear objective (the
    /// constant term is added by the caller).
    pub fn new(model: &MilpModel) -> Result<Relaxation> {
        let mut cost = vec![0.0; model.variables.len()];
        for &(v, a) in &model.objective.terms {
            cost[v.0] += a;
        }
        let mut bounds = Vec::with_capacity(model.variables.len());
        for v in &model.variables {
            if v.lower > v.upper || v.lower.is_nan() || v.upper.is_nan() {
                return Err(Error::Invalid(format!("variable {} has empty bounds", v.name)));
            }
            bounds.push((v.lower, v.upper));
        }
        let mut rows = Vec::with_capacity(model.constraints.len());
        for row in &model.constraints {
            if !row.rhs.is_finite() {
                return Err(Error::Invalid(format!("row {} has a non-finite right-hand side", row.name)));
            }
            rows.push((row.terms.iter().map(|&(v, a)| (v.0, a)).collect(), op(row.relation), row.rhs));
        }
        let (problem, vars) = build(&cost, &bounds, &rows);
        Ok(Relaxation { problem, vars, cost, bounds, rows })
    }

    pub fn solve(&self) -> Result<LpStatus> {
        classify(self.problem.solve(), Vec::new())
    }

    /// Applies one bound edit to a solved state and re-optimises.
    pub fn apply(&self, state: LpState, index: usize, bound: Bound) -> Result<LpStatus> {
        let var = self.vars[index];
        let mut edits = state.edits.clone();
        edits.push((index, bound));
        let outcome = match bound {
            Bound::Fix(v) => state.inner.fix_var(var, v),
            Bound::Upper(v) => state.inner.add_constraint([(var, 1.0)], ComparisonOp::Le, v),
            Bound::Lower(v) => state.inner.add_constraint([(var, 1.0)], ComparisonOp::Ge, v),
        };
        match classify(outcome, edits.clone()) {
            Err(Error::Solver(_)) => self.cold(edits),
            other => other,
        }
    }

    /// Solves the root problem with `edits` folded into the variable bounds.
    pub fn cold(&self, edits: Vec<(usize, Bound)>) -> Result<LpStatus> {
        let mut bounds = self.bounds.clone();
        for &(k, bound) in &edits {
            let (lo, hi) = &mut bounds[k];
            match bound {
                Bound::Upper(v) => *hi = hi.min(v),
                Bound::Lower(v) => *lo = lo.max(v),
                Bound::Fix(v) => (*lo, *hi) = (lo.max(v), hi.min(v)),
            }
            if lo > hi {
                return Ok(LpStatus::Infeasible);
            }
        }
        let (problem, _) = build(&self.cost, &bounds, &self.rows);
        classify(problem.solve(), edits)
    }
}

fn build(
    cost: &[f64],
    bounds: &[(f64, f64)],
    rows: &[(Vec<(usize, f64)>, ComparisonOp, f64)],
) -> (Problem, Vec<microlp::Variable>) {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = cost.iter().zip(bounds).map(|(&c, &b)| problem.add_var(c, b)).collect();
    for (terms, cmp, rhs) in rows {
        let expr: Vec<(microlp::Variable, f64)> = terms.iter().map(|&(v, a)| (vars[v], a)).collect();
        problem.add_constraint(expr.as_slice(), *cmp, *rhs);
    }
    (problem, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Annotation, ModeFlags, VarKind};

    #[test]
    fn bound_edits_reoptimise() {
        let mut m = MilpModel::new(ModeFlags::default());
        let x = m.add_var("x", VarKind::Integer, 0.0, 10.0);
        let y = m.add_var("y", VarKind::Continuous, 0.0, 10.0);
        m.add_constraint("r", vec![(x, 2.0), (y, 1.0)], Relation::Ge, 5.0, Annotation::Plumbing);
        m.objective.terms = vec![(x, 1.0), (y, 1.0)];
        let lp = Relaxation::new(&m).unwrap();
        let LpStatus::Optimal(root) = lp.solve().unwrap() else { panic!() };
        assert!((root.objective() - 2.5).abs() < 1e-9);
        let LpStatus::Optimal(down) = lp.apply(root.clone(), 0, Bound::Upper(2.0)).unwrap() else { panic!() };
        assert!((down.objective() - 3.0).abs() < 1e-9);
        let LpStatus::Optimal(up) = lp.apply(root.clone(), 0, Bound::Lower(3.0)).unwrap() else { panic!() };
        assert!((up.objective() - 3.0).abs() < 1e-9);
        assert!(matches!(lp.apply(root.clone(), 1, Bound::Fix(11.0)).unwrap(), LpStatus::Infeasible));
        let LpStatus::Optimal(cold) = lp.cold(vec![(0, Bound::Lower(3.0))]).unwrap() else { panic!() };
        assert!((cold.objective() - 3.0).abs() < 1e-9);
        assert!(matches!(lp.cold(vec![(0, Bound::Lower(3.0)), (0, Bound::Upper(2.0))]).unwrap(), LpStatus::Infeasible));
    }
}
