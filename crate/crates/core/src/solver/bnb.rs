//! Best-first branch-and-bound.
//!
//! Children are evaluated eagerly, so every open node carries a proven LP
//! bound. Until the first incumbent exists the search dives depth-first,
//! taking the child on the rounding side of the branching variable first;
//! afterwards it plunges into the better child while that child stays close
//! to the global bound and otherwise expands the open node with the smallest
//! bound (ties: deeper first, then creation order). A rounding dive runs at
//! the root and periodically during the search to find incumbents early.
//!
//! Open nodes keep their warm LP state while fewer than `max_stored_states`
//! do; the others remember only their chain of bound edits and are solved
//! again from scratch when selected. Nothing depends on timing except
//! the optional time limit, so runs without one are reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use super::check::{check_feasibility, Tolerances};
use super::lp::{Bound, LpState, LpStatus, Relaxation};
use super::{relative_gap, Branching, Solution, SolveOptions, SolveStats, Status};
use crate::error::{Error, Result};
use crate::model::{MilpModel, VarKind};

/// Largest plunge depth before control returns to best-first selection.
const MAX_PLUNGE: u32 = 64;

struct Edit {
    index: usize,
    bound: Bound,
    parent: Option<Rc<Edit>>,
}

struct Node {
    /// LP objective plus the model's constant term.
    bound: f64,
    depth: u32,
    seq: u64,
    edits: Option<Rc<Edit>>,
    state: Option<LpState>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap pops the maximum, so "greater" means "expand sooner".
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Per-unit objective gains observed when branching down or up.
#[derive(Clone, Copy, Default)]
struct Pseudocost {
    sum: [f64; 2],
    count: [u32; 2],
}

impl Pseudocost {
    fn reliable(&self) -> bool {
        self.count[0] > 0 && self.count[1] > 0
    }

    fn mean(&self, side: usize, fallback: f64) -> f64 {
        if self.count[side] == 0 {
            fallback
        } else {
            self.sum[side] / self.count[side] as f64
        }
    }
}

/// Outcome of one node relaxation.
enum Child {
    Solved(LpState),
    Infeasible,
    /// Numerical failure of both the warm and the cold solve. The subtree is
    /// abandoned and its parent's bound joins the global lower bound.
    Failed,
}

/// Branching decision: variable plus child relaxations already solved by
/// strong branching (down, up).
struct Choice {
    index: usize,
    solved: Option<[Child; 2]>,
}

fn branch_bounds(kind: VarKind, x: f64) -> [Bound; 2] {
    match kind {
        VarKind::Binary => [Bound::Fix(0.0), Bound::Fix(1.0)],
        _ => [Bound::Upper(x.floor()), Bound::Lower(x.ceil())],
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    opts: &'a SolveOptions,
    relax: Relaxation,
    root: LpState,
    constant: f64,
    integral: Vec<usize>,
    incumbent: Option<(f64, Vec<f64>)>,
    /// Smallest bound among nodes discarded by the incumbent cutoff.
    pruned_bound: f64,
    pseudo: Vec<Pseudocost>,
    stored: usize,
    seq: u64,
    stats: SolveStats,
}

impl Search<'_> {
    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => obj - self.opts.optimality_gap * obj.abs().max(1.0),
            None => f64::INFINITY,
        }
    }

    fn fractionality(&self, x: f64) -> Option<f64> {
        let f = (x - x.round()).abs();
        (f > self.opts.integrality_tol).then_some(f)
    }

    fn fractional(&self, values: &[f64]) -> Vec<usize> {
        self.integral.iter().copied().filter(|&k| self.fractionality(values[k]).is_some()).collect()
    }

    fn count_iterations(&mut self, child: &LpState, parent_iters: u64) {
        self.stats.lp_iterations += child.iterations().saturating_sub(parent_iters);
    }

    fn record(&mut self, index: usize, side: usize, x: f64, gain: f64) {
        let dist = if side == 0 { x - x.floor() } else { x.ceil() - x };
        if gain.is_finite() && dist > 0.0 {
            let p = &mut self.pseudo[index];
            p.sum[side] += gain.max(0.0) / dist;
            p.count[side] += 1;
        }
    }

    /// Integer variables rounded, continuous ones snapped onto nearby bounds.
    fn clean(&self, mut values: Vec<f64>) -> Vec<f64> {
        let tol = self.opts.lp_feas_tol;
        for (x, v) in values.iter_mut().zip(&self.model.variables) {
            if v.kind.is_integral() {
                *x = x.round();
            } else if (*x - v.lower).abs() <= tol {
                *x = v.lower;
            } else if (*x - v.upper).abs() <= tol {
                *x = v.upper;
            }
            if *x == 0.0 {
                *x = 0.0; // normalise -0.0
            }
        }
        values
    }

    fn offer(&mut self, objective: f64, values: Vec<f64>) {
        if objective < self.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0) {
            let cleaned = self.clean(values);
            self.incumbent = Some((objective, cleaned));
        }
    }

    fn classify(&mut self, outcome: Result<LpStatus>, before: u64) -> Result<Child> {
        match outcome {
            Ok(LpStatus::Optimal(child)) => {
                self.count_iterations(&child, before);
                Ok(Child::Solved(child))
            }
            Ok(LpStatus::Infeasible) => Ok(Child::Infeasible),
            // A bounded parent cannot have an unbounded child.
            Ok(LpStatus::Unbounded) | Err(Error::Solver(_)) => {
                self.stats.lp_failures += 1;
                Ok(Child::Failed)
            }
            Err(e) => Err(e),
        }
    }

    fn solve_child(&mut self, state: LpState, index: usize, bound: Bound) -> Result<Child> {
        let before = state.iterations();
        let outcome = self.relax.apply(state, index, bound);
        self.classify(outcome, before)
    }

    /// Re-solves a node whose LP state was dropped, from scratch with its
    /// branching bounds folded into the variable bounds.
    fn rebuild(&mut self, edits: &Option<Rc<Edit>>) -> Result<Child> {
        self.stats.rebuilds += 1;
        let mut chain = Vec::new();
        let mut cursor = edits.as_ref();
        while let Some(e) = cursor {
            chain.push((e.index, e.bound));
            cursor = e.parent.as_ref();
        }
        chain.reverse();
        let outcome = self.relax.cold(chain);
        self.classify(outcome, 0)
    }

    /// Rounds the least fractional variable towards its nearest integer and
    /// re-solves until the relaxation is integral, infeasible both ways, or
    /// no better than the incumbent.
    fn dive(&mut self, mut state: LpState) -> Result<()> {
        self.stats.dives += 1;
        for _ in 0..=self.integral.len() {
            if state.objective() + self.constant >= self.cutoff() {
                return Ok(());
            }
            let values = state.values(&self.relax);
            let pick = self
                .integral
                .iter()
                .filter_map(|&k| self.fractionality(values[k]).map(|f| (f, k)))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let Some((_, index)) = pick else {
                let objective = state.objective() + self.constant;
                self.offer(objective, values);
                return Ok(());
            };
            let x = values[index];
            let [down, up] = branch_bounds(self.model.variables[index].kind, x);
            let order = if x.round() > x { [up, down] } else { [down, up] };
            let mut next = None;
            for bound in order {
                if let Child::Solved(child) = self.solve_child(state.clone(), index, bound)? {
                    next = Some(child);
                    break;
                }
            }
            match next {
                Some(child) => state = child,
                None => return Ok(()),
            }
        }
        Ok(())
    }

    fn choose(&mut self, values: &[f64], state: &LpState) -> Result<Option<Choice>> {
        let candidates = self.fractional(values);
        let Some(&first) = candidates.first() else { return Ok(None) };
        if self.opts.branching == Branching::LowestIndex {
            return Ok(Some(Choice { index: first, solved: None }));
        }
        let parent = state.objective();
        let eps = 1e-9 * parent.abs().max(1.0);
        // Average over reliable variables stands in for missing history.
        let (mut total, mut n) = ([0.0; 2], [0u32; 2]);
        for p in &self.pseudo {
            for side in 0..2 {
                total[side] += p.sum[side];
                n[side] += p.count[side];
            }
        }
        let fallback = |side: usize| if n[side] == 0 { 1.0 } else { total[side] / n[side] as f64 };
        let mut unreliable: Vec<usize> = candidates.iter().copied().filter(|&k| !self.pseudo[k].reliable()).collect();
        unreliable.sort_by(|&a, &b| {
            let fa = (values[a] - values[a].floor() - 0.5).abs();
            let fb = (values[b] - values[b].floor() - 0.5).abs();
            fa.total_cmp(&fb).then(a.cmp(&b))
        });
        unreliable.truncate(self.opts.strong_candidates);

        let mut best: Option<(f64, Choice)> = None;
        let consider = |score: f64, choice: Choice, best: &mut Option<(f64, Choice)>| {
            // Strict improvement keeps the lowest index among ties.
            if best.as_ref().is_none_or(|(s, c)| score > *s || (score == *s && choice.index < c.index)) {
                *best = Some((score, choice));
            }
        };
        for &k in &unreliable {
            let x = values[k];
            let bounds = branch_bounds(self.model.variables[k].kind, x);
            let mut children = [Child::Infeasible, Child::Infeasible];
            let mut gains = [f64::INFINITY; 2];
            for side in 0..2 {
                children[side] = self.solve_child(state.clone(), k, bounds[side])?;
                match &children[side] {
                    Child::Solved(child) => gains[side] = child.objective() - parent,
                    Child::Failed => gains[side] = 0.0,
                    Child::Infeasible => {}
                }
                self.record(k, side, x, gains[side]);
            }
            let score = gains[0].max(eps) * gains[1].max(eps);
            consider(score, Choice { index: k, solved: Some(children) }, &mut best);
            if gains[0].is_infinite() || gains[1].is_infinite() {
                break;
            }
        }
        for &k in &candidates {
            if unreliable.contains(&k) {
                continue;
            }
            let x = values[k];
            let p = self.pseudo[k];
            let down = p.mean(0, fallback(0)) * (x - x.floor());
            let up = p.mean(1, fallback(1)) * (x.ceil() - x);
            consider(down.max(eps) * up.max(eps), Choice { index: k, solved: None }, &mut best);
        }
        Ok(best.map(|(_, c)| c))
    }

    /// Expands a node whose LP is solved. Returns its surviving children,
    /// preferred child first.
    fn expand(&mut self, node: Node, state: LpState) -> Result<Vec<Node>> {
        self.stats.nodes += 1;
        let values = state.values(&self.relax);
        let Some(choice) = self.choose(&values, &state)? else {
            let objective = state.objective() + self.constant;
            self.offer(objective, values);
            return Ok(Vec::new());
        };
        let index = choice.index;
        let x = values[index];
        let bounds = branch_bounds(self.model.variables[index].kind, x);
        let parent_obj = state.objective();
        let mut solved = match choice.solved {
            Some(children) => children,
            None => {
                let mut out = [Child::Infeasible, Child::Infeasible];
                for side in 0..2 {
                    out[side] = self.solve_child(state.clone(), index, bounds[side])?;
                    if let Child::Solved(c) = &out[side] {
                        self.record(index, side, x, c.objective() - parent_obj);
                    }
                }
                out
            }
        };
        drop(state);
        let order = if x - x.floor() >= 0.5 { [1, 0] } else { [0, 1] };
        let mut children = Vec::with_capacity(2);
        for side in order {
            let child = match std::mem::replace(&mut solved[side], Child::Infeasible) {
                Child::Solved(child) => child,
                Child::Infeasible => continue,
                Child::Failed => {
                    self.pruned_bound = self.pruned_bound.min(node.bound);
                    continue;
                }
            };
            let bound_w = child.objective() + self.constant;
            if bound_w >= self.cutoff() {
                self.pruned_bound = self.pruned_bound.min(bound_w);
                continue;
            }
            self.seq += 1;
            let keep = self.stored < self.opts.max_stored_states;
            if keep {
                self.stored += 1;
            }
            children.push(Node {
                bound: bound_w,
                depth: node.depth + 1,
                seq: self.seq,
                edits: Some(Rc::new(Edit { index, bound: bounds[side], parent: node.edits.clone() })),
                state: keep.then_some(child),
            });
        }
        Ok(children)
    }

    /// Takes the LP state of a selected node, rebuilding it when it was
    /// dropped.
    fn take_state(&mut self, node: &mut Node) -> Result<Child> {
        match node.state.take() {
            Some(s) => {
                self.stored -= 1;
                Ok(Child::Solved(s))
            }
            None => self.rebuild(&node.edits),
        }
    }

    fn discard(&mut self, node: &Node) {
        self.pruned_bound = self.pruned_bound.min(node.bound);
        if node.state.is_some() {
            self.stored -= 1;
        }
    }
}

fn limit_hit(opts: &SolveOptions, stats: &SolveStats, start: Instant) -> bool {
    opts.node_limit.is_some_and(|n| stats.nodes >= n)
        || opts.time_limit_s.is_some_and(|t| start.elapsed().as_secs_f64() >= t)
}

/// Solves `model` to within `opts.optimality_gap`, or returns the best
/// incumbent when a node or time limit is reached first.
pub fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<Solution> {
    run(model, opts, None)
}

/// As [`solve`], seeded with a known solution. The start must pass
/// [`check_feasibility`]; it is rejected with an error otherwise.
pub fn solve_with_start(model: &MilpModel, opts: &SolveOptions, start: &[f64]) -> Result<Solution> {
    let tol = Tolerances { feasibility: opts.lp_feas_tol.max(1e-6), integrality: opts.integrality_tol };
    let report = check_feasibility(model, start, &tol)?;
    if !report.is_feasible() {
        return Err(Error::Invalid(format!("start solution is infeasible: {report}")));
    }
    run(model, opts, Some(start))
}

fn run(model: &MilpModel, opts: &SolveOptions, start_values: Option<&[f64]>) -> Result<Solution> {
    opts.validate()?;
    let start = Instant::now();
    let relax = Relaxation::new(model)?;
    let constant = model.objective.constant;
    let mut stats = SolveStats::default();
    let root = match relax.solve()? {
        LpStatus::Optimal(root) => root,
        LpStatus::Infeasible => {
            stats.wall_time_s = start.elapsed().as_secs_f64();
            return Ok(Solution::without_values(Status::Infeasible, f64::INFINITY, stats));
        }
        LpStatus::Unbounded => {
            stats.wall_time_s = start.elapsed().as_secs_f64();
            return Ok(Solution::without_values(Status::Unbounded, f64::NEG_INFINITY, stats));
        }
    };
    stats.lp_iterations = root.iterations();
    let root_node = Node { bound: root.objective() + constant, depth: 0, seq: 0, edits: None, state: Some(root.clone()) };
    let integral = (0..model.variables.len()).filter(|&k| model.variables[k].kind.is_integral()).collect();
    let mut search = Search {
        model,
        opts,
        relax,
        root,
        constant,
        integral,
        incumbent: None,
        pruned_bound: f64::INFINITY,
        pseudo: vec![Pseudocost::default(); model.variables.len()],
        stored: 1,
        seq: 0,
        stats,
    };
    if let Some(values) = start_values {
        search.offer(model.objective.evaluate(values), values.to_vec());
    }
    if opts.heuristic_interval > 0 {
        search.dive(search.root.clone())?;
    }

    let mut dive: Vec<Node> = vec![root_node];
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut plunge: Option<(Node, u32)> = None;
    let mut stopped = false;
    loop {
        let (mut node, plunge_depth) = if let Some(p) = plunge.take() {
            p
        } else if search.incumbent.is_none() {
            match dive.pop() {
                Some(n) => (n, 0),
                None => break,
            }
        } else {
            if !dive.is_empty() {
                heap.extend(dive.drain(..));
            }
            match heap.pop() {
                Some(n) => (n, 0),
                None => break,
            }
        };
        if node.bound >= search.cutoff() {
            search.discard(&node);
            continue;
        }
        if limit_hit(opts, &search.stats, start) {
            search.discard(&node);
            stopped = true;
            break;
        }
        let state = match search.take_state(&mut node)? {
            Child::Solved(state) => state,
            Child::Infeasible => continue,
            Child::Failed => {
                search.pruned_bound = search.pruned_bound.min(node.bound);
                continue;
            }
        };
        if opts.heuristic_interval > 0 && search.stats.nodes > 0 && search.stats.nodes % opts.heuristic_interval == 0 {
            search.dive(state.clone())?;
        }
        let mut children = search.expand(node, state)?.into_iter();
        if search.incumbent.is_none() {
            // Preferred child last so it is popped first.
            let mut kids: Vec<Node> = children.collect();
            kids.reverse();
            dive.extend(kids);
            continue;
        }
        heap.extend(dive.drain(..));
        let Some(first) = children.next() else { continue };
        let best_child = std::iter::once(first).chain(children).collect::<Vec<_>>();
        let mut best_child: Vec<Node> = best_child;
        best_child.sort_by(|a, b| b.cmp(a));
        let lowest = heap.peek().map_or(f64::INFINITY, |n| n.bound).min(best_child[0].bound);
        let threshold = lowest + 0.5 * (search.cutoff() - lowest);
        let mut kids = best_child.into_iter();
        let head = kids.next().expect("one child");
        heap.extend(kids);
        if plunge_depth < MAX_PLUNGE && head.bound <= threshold {
            plunge = Some((head, plunge_depth + 1));
        } else {
            heap.push(head);
        }
    }

    let open_bound = heap
        .iter()
        .chain(dive.iter())
        .chain(plunge.iter().map(|(n, _)| n))
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    let mut stats = std::mem::take(&mut search.stats);
    stats.wall_time_s = start.elapsed().as_secs_f64();
    let pruned_bound = search.pruned_bound;
    match search.incumbent.take() {
        Some((objective, values)) => {
            let bound = objective.min(pruned_bound).min(open_bound);
            let gap = relative_gap(objective, bound);
            let status = if gap > opts.optimality_gap { Status::Feasible { gap } } else { Status::Optimal };
            Ok(Solution::with_values(model, status, values, bound, stats))
        }
        // An abandoned subtree may hold the only feasible points.
        None if stopped || stats.lp_failures > 0 => {
            Ok(Solution::without_values(Status::Timeout, pruned_bound.min(open_bound), stats))
        }
        None => Ok(Solution::without_values(Status::Infeasible, f64::INFINITY, stats)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Annotation, ModeFlags, Relation};

    fn model(objective: &[f64], rows: &[(&[f64], Relation, f64)], kinds: &[VarKind], upper: f64) -> MilpModel {
        let mut m = MilpModel::new(ModeFlags::default());
        let vars: Vec<_> = kinds.iter().enumerate().map(|(k, &kind)| m.add_var(format!("x{k}"), kind, 0.0, upper)).collect();
        for (r, (coefs, rel, rhs)) in rows.iter().enumerate() {
            let terms = vars.iter().zip(coefs.iter()).map(|(&v, &a)| (v, a)).collect();
            m.add_constraint(format!("r{r}"), terms, *rel, *rhs, Annotation::Plumbing);
        }
        m.objective.terms = vars.iter().zip(objective).map(|(&v, &a)| (v, a)).collect();
        m
    }

    #[test]
    fn binary_pair() {
        let m = model(&[-1.0, -1.0], &[(&[1.0, 1.0], Relation::Le, 1.0)], &[VarKind::Binary; 2], 1.0);
        let s = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.objective, -1.0);
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let w = [5.0, 7.0, 4.0, 3.0, 6.0, 8.0];
        let v = [-10.0, -13.0, -7.0, -8.0, -9.0, -14.0];
        let m = model(&v, &[(&w, Relation::Le, 17.0)], &[VarKind::Binary; 6], 1.0);
        let s = solve(&m, &SolveOptions::default()).unwrap();
        let mut best = 0.0f64;
        for mask in 0u32..64 {
            let (mut wt, mut val) = (0.0, 0.0);
            for k in 0..6 {
                if mask >> k & 1 == 1 {
                    wt += w[k];
                    val += v[k];
                }
            }
            if wt <= 17.0 {
                best = best.min(val);
            }
        }
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - best).abs() < 1e-9, "{} vs {best}", s.objective);
    }

    #[test]
    fn general_integers_and_infeasibility() {
        // min -x - y, 2x + 2y <= 7, x,y integer in [0,10]: optimum -3.
        let m = model(&[-1.0, -1.0], &[(&[2.0, 2.0], Relation::Le, 7.0)], &[VarKind::Integer; 2], 10.0);
        let s = solve(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.objective, -3.0);
        // 2x = 1 has no integer solution.
        let m = model(&[1.0], &[(&[2.0], Relation::Eq, 1.0)], &[VarKind::Integer], 10.0);
        assert_eq!(solve(&m, &SolveOptions::default()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unbounded_relaxation() {
        let m = model(&[-1.0], &[(&[1.0], Relation::Ge, 0.0)], &[VarKind::Continuous], f64::INFINITY);
        assert_eq!(solve(&m, &SolveOptions::default()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn tiny_state_budget_still_optimal() {
        let w = [5.0, 7.0, 4.0, 3.0, 6.0, 8.0];
        let v = [-10.0, -13.0, -7.0, -8.0, -9.0, -14.0];
        let m = model(&v, &[(&w, Relation::Le, 17.0)], &[VarKind::Binary; 6], 1.0);
        let a = solve(&m, &SolveOptions::default()).unwrap();
        let b = solve(&m, &SolveOptions { max_stored_states: 1, ..Default::default() }).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn node_limit_reports_limit() {
        let w = [5.0, 7.0, 4.0, 3.0, 6.0, 8.0];
        let v = [-10.0, -13.0, -7.0, -8.0, -9.0, -14.0];
        let m = model(&v, &[(&w, Relation::Le, 17.0)], &[VarKind::Binary; 6], 1.0);
        let s = solve(&m, &SolveOptions { node_limit: Some(1), ..Default::default() }).unwrap();
        assert!(matches!(s.status, Status::Timeout | Status::Feasible { .. }), "{:?}", s.status);
    }
}
