use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Duration;

use super::simplex::Tableau;
use super::{Constraint, LpModel, LpStatus, INT_TOL};
use crate::deadline::Deadline;
use crate::error::{Error, Result};

/// Cap on `f64` cells kept in stored warm-start tableaus across open nodes.
const WARM_BUDGET: usize = 1 << 25;

#[derive(Clone, Debug, Default)]
pub struct IlpLimits {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Objective takes integer values on integer points, so bounds may be
    /// rounded up before pruning.
    pub integral_objective: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlpStatus {
    Optimal,
    /// Limit reached with an incumbent in hand.
    FeasibleTimeout,
    /// Limit reached before any incumbent was found.
    Timeout,
    Infeasible,
    /// The callback asked to stop.
    Aborted,
}

/// What the lazy-constraint callback sees at an LP-integral node.
#[derive(Debug)]
pub struct CallbackContext<'a> {
    pub values: &'a [f64],
    pub objective: f64,
    pub global_lb: f64,
    pub node: u64,
}

#[derive(Clone, Debug)]
pub enum CallbackOutcome {
    /// The point is feasible for the full problem.
    Accept,
    /// Valid inequalities to add globally; the node is re-solved if any of
    /// them cuts off the current point.
    Cuts(Vec<Constraint>),
    Abort(String),
}

#[derive(Clone, Debug)]
pub struct IlpResult {
    pub status: IlpStatus,
    pub values: Option<Vec<f64>>,
    /// Incumbent objective, `+inf` without one.
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub cuts: Vec<Constraint>,
    pub abort_reason: Option<String>,
    /// `(seconds, lower bound)` whenever the global bound moved.
    pub lb_trace: Vec<(f64, f64)>,
}

impl IlpResult {
    pub fn gap_percent(&self) -> f64 {
        gap_percent(self.upper_bound, self.lower_bound)
    }
}

/// `(UB − LB)/UB × 100`, with 0 when both are zero and +inf without an incumbent.
pub fn gap_percent(ub: f64, lb: f64) -> f64 {
    if !ub.is_finite() {
        return f64::INFINITY;
    }
    if ub == 0.0 {
        return if lb >= 0.0 { 0.0 } else { f64::INFINITY };
    }
    (ub - lb) / ub * 100.0
}

struct Node {
    id: u64,
    depth: u32,
    bound: f64,
    fixings: Vec<(usize, f64)>,
    warm: Option<(Box<Tableau>, usize)>,
}

impl Node {
    fn key(&self) -> (f64, u32, u64) {
        (self.bound, self.depth, self.id)
    }
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
    // BinaryHeap pops the maximum, so "greater" means "explore sooner":
    // smaller bound, then deeper, then older.
    fn cmp(&self, other: &Self) -> Ordering {
        let (b1, d1, i1) = self.key();
        let (b2, d2, i2) = other.key();
        b2.total_cmp(&b1).then(d1.cmp(&d2)).then(i2.cmp(&i1))
    }
}

enum NodeLp {
    Solved(Tableau, Vec<f64>, f64),
    Infeasible,
    TimeLimit,
}

struct Search<'a, F> {
    model: &'a LpModel,
    binaries: &'a [usize],
    limits: &'a IlpLimits,
    callback: F,
    deadline: Deadline,
    pool: Vec<Constraint>,
    incumbent: Option<Vec<f64>>,
    ub: f64,
    lb: f64,
    lb_trace: Vec<(f64, f64)>,
    nodes: u64,
    iterations: u64,
    next_id: u64,
    warm_cells: usize,
}

impl<'a, F> Search<'a, F>
where
    F: FnMut(&CallbackContext) -> CallbackOutcome,
{
    fn round_bound(&self, b: f64) -> f64 {
        if self.limits.integral_objective {
            (b - INT_TOL).ceil()
        } else {
            b
        }
    }

    fn prunable(&self, bound: f64) -> bool {
        self.round_bound(bound) >= self.ub - 1e-9
    }

    fn raise_lb(&mut self, candidate: f64) {
        let candidate = self.round_bound(candidate).min(self.ub);
        if candidate > self.lb + 1e-12 || self.lb_trace.is_empty() {
            self.lb = self.lb.max(candidate);
            self.lb_trace.push((self.deadline.elapsed(), self.lb));
        }
    }

    fn cold_tableau(&self, fixings: &[(usize, f64)]) -> Tableau {
        let mut lo = self.model.lower.clone();
        let mut hi = self.model.upper.clone();
        for &(j, v) in fixings {
            lo[j] = v;
            hi[j] = v;
        }
        Tableau::new(self.model, &lo, &hi, &self.pool)
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in self.binaries {
            let f = x[j] - x[j].floor();
            let dist = f.min(1.0 - f);
            if dist <= INT_TOL {
                continue;
            }
            if best.is_none_or(|(bj, bd)| dist > bd + 1e-12 || (dist >= bd - 1e-12 && j < bj)) {
                best = Some((j, dist));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Solves the node LP.
    fn solve_node(&mut self, node: &mut Node) -> Result<NodeLp> {
        let tab = match node.warm.take() {
            Some((mut tab, rows_seen)) => {
                self.warm_cells -= tab.footprint();
                for &(j, v) in &node.fixings {
                    tab.set_bounds(j, v, v);
                }
                for c in &self.pool[rows_seen..] {
                    tab.add_row(c);
                }
                tab.set_deadline(self.deadline);
                let before = tab.iterations();
                let st = tab.reoptimize()?;
                self.iterations += tab.iterations() - before;
                if st != LpStatus::Optimal {
                    return Self::lp_outcome(st);
                }
                *tab
            }
            None => {
                let mut tab = self.cold_tableau(&node.fixings);
                tab.set_deadline(self.deadline);
                let st = tab.solve_primal()?;
                self.iterations += tab.iterations();
                if st != LpStatus::Optimal {
                    return Self::lp_outcome(st);
                }
                tab
            }
        };
        let x = tab.structural_values();
        let obj = self.model.objective_value(&x);
        Ok(NodeLp::Solved(tab, x, obj))
    }

    fn lp_outcome(st: LpStatus) -> Result<NodeLp> {
        match st {
            LpStatus::Infeasible => Ok(NodeLp::Infeasible),
            LpStatus::TimeLimit => Ok(NodeLp::TimeLimit),
            LpStatus::Unbounded => Err(Error::SolverFailure(
                "LP relaxation is unbounded".into(),
            )),
            LpStatus::Optimal => unreachable!(),
        }
    }

    fn timeout_status(&self) -> IlpStatus {
        if self.incumbent.is_some() {
            IlpStatus::FeasibleTimeout
        } else {
            IlpStatus::Timeout
        }
    }

    fn open_bound(&self, heap: &BinaryHeap<Node>) -> f64 {
        heap.peek().map_or(f64::INFINITY, |n| n.bound)
    }

    fn run(&mut self) -> Result<IlpResult> {
        let mut heap = BinaryHeap::new();
        heap.push(Node {
            id: 0,
            depth: 0,
            bound: f64::NEG_INFINITY,
            fixings: Vec::new(),
            warm: None,
        });
        self.next_id = 1;
        let mut status = None;
        let mut abort_reason = None;

        'nodes: while let Some(mut node) = heap.pop() {
            if self.prunable(node.bound) {
                if let Some((t, _)) = node.warm.take() {
                    self.warm_cells -= t.footprint();
                }
                continue;
            }
            let over_nodes = self.limits.node_limit.is_some_and(|l| self.nodes >= l);
            if self.deadline.expired() || over_nodes {
                heap.push(node);
                status = Some(self.timeout_status());
                break;
            }
            self.nodes += 1;
            loop {
                let (tab, x, obj) = match self.solve_node(&mut node)? {
                    NodeLp::Solved(tab, x, obj) => (tab, x, obj),
                    NodeLp::Infeasible => continue 'nodes,
                    NodeLp::TimeLimit => {
                        heap.push(node);
                        status = Some(self.timeout_status());
                        break 'nodes;
                    }
                };
                node.bound = node.bound.max(obj);
                let open = self.open_bound(&heap);
                self.raise_lb(node.bound.min(open));
                if self.prunable(node.bound) {
                    continue 'nodes;
                }
                if let Some(j) = self.most_fractional(&x) {
                    self.branch(&mut heap, &node, tab, j, x[j]);
                    continue 'nodes;
                }
                let mut point = x;
                for &j in self.binaries {
                    point[j] = point[j].round();
                }
                let ctx = CallbackContext {
                    values: &point,
                    objective: obj,
                    global_lb: self.lb,
                    node: node.id,
                };
                match (self.callback)(&ctx) {
                    CallbackOutcome::Accept => {
                        if obj < self.ub {
                            self.ub = obj;
                            self.incumbent = Some(point);
                        }
                        continue 'nodes;
                    }
                    CallbackOutcome::Abort(reason) => {
                        abort_reason = Some(reason);
                        status = Some(IlpStatus::Aborted);
                        heap.push(node);
                        break 'nodes;
                    }
                    CallbackOutcome::Cuts(cuts) => {
                        let violated = cuts.iter().any(|c| c.violation(&point) > INT_TOL);
                        self.pool.extend(cuts);
                        if !violated {
                            if obj < self.ub {
                                self.ub = obj;
                                self.incumbent = Some(point);
                            }
                            continue 'nodes;
                        }
                        let seen = tab.num_rows() - self.model.constraints.len();
                        self.warm_cells += tab.footprint();
                        node.warm = Some((Box::new(tab), seen));
                    }
                }
                if self.deadline.expired() {
                    heap.push(node);
                    status = Some(self.timeout_status());
                    break 'nodes;
                }
            }
        }

        let status = match status {
            Some(s) => s,
            None if self.incumbent.is_some() => IlpStatus::Optimal,
            None => IlpStatus::Infeasible,
        };
        match status {
            IlpStatus::Optimal => {
                let ub = self.ub;
                self.raise_lb(ub);
            }
            IlpStatus::Infeasible => {}
            _ => {
                let open = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
                self.raise_lb(open.min(self.ub));
            }
        }
        Ok(IlpResult {
            status,
            values: self.incumbent.take(),
            upper_bound: self.ub,
            lower_bound: self.lb,
            nodes: self.nodes,
            lp_iterations: self.iterations,
            cuts: std::mem::take(&mut self.pool),
            abort_reason,
            lb_trace: std::mem::take(&mut self.lb_trace),
        })
    }

    fn branch(&mut self, heap: &mut BinaryHeap<Node>, node: &Node, tab: Tableau, j: usize, v: f64) {
        let seen = tab.num_rows() - self.model.constraints.len();
        let mut children = Vec::with_capacity(2);
        // Child ids follow the order (down, up).
        for fix in [0.0, 1.0] {
            let mut fixings = node.fixings.clone();
            fixings.push((j, fix));
            children.push(Node {
                id: self.next_id,
                depth: node.depth + 1,
                bound: node.bound,
                fixings,
                warm: None,
            });
            self.next_id += 1;
        }
        // The child on the side of the LP value inherits the tableau; the
        // other gets a copy if the budget allows.
        let near = if v >= 0.5 { 1 } else { 0 };
        let cells = tab.footprint();
        if self.warm_cells + 2 * cells <= WARM_BUDGET {
            children[1 - near].warm = Some((Box::new(tab.clone()), seen));
            self.warm_cells += cells;
        }
        if self.warm_cells + cells <= WARM_BUDGET {
            children[near].warm = Some((Box::new(tab), seen));
            self.warm_cells += cells;
        }
        for c in children {
            heap.push(c);
        }
    }
}

/// Best-first branch and bound over the binary variables in `binaries`.
///
/// The callback runs whenever the LP solution is integral on every binary.
/// Cuts it returns join a global pool shared by all later nodes.
pub fn solve_ilp<F>(
    model: &LpModel,
    binaries: &[usize],
    limits: &IlpLimits,
    callback: F,
) -> Result<IlpResult>
where
    F: FnMut(&CallbackContext) -> CallbackOutcome,
{
    model.validate()?;
    for &j in binaries {
        if j >= model.num_vars() {
            return Err(Error::InvalidInput(format!("binary index {j} out of range")));
        }
        if model.lower[j] < 0.0 || model.upper[j] > 1.0 {
            return Err(Error::InvalidInput(format!("variable {j} is not within [0, 1]")));
        }
    }
    let mut search = Search {
        model,
        binaries,
        limits,
        callback,
        deadline: Deadline::after(limits.time_limit),
        pool: Vec::new(),
        incumbent: None,
        ub: f64::INFINITY,
        lb: f64::NEG_INFINITY,
        lb_trace: Vec::new(),
        nodes: 0,
        iterations: 0,
        next_id: 0,
        warm_cells: 0,
    };
    search.run()
}
