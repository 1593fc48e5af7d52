use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::instance::{SelColInstance, Selection};
use crate::lp::{solve_ilp, CallbackOutcome, Constraint, IlpLimits, IlpStatus, LpModel};

use super::{Method, SolveOptions, SolveReport, SolveStatus};

/// The assignment formulation: `y_k` marks color `k` as used, `w_ik` assigns
/// vertex `i` to color `k`.
#[derive(Clone, Debug)]
pub struct AssignmentModel {
    pub model: LpModel,
    pub binaries: Vec<usize>,
    pub num_vertices: usize,
    pub num_colors: usize,
    pub edge_color_rows: usize,
    pub cluster_rows: usize,
    pub symmetry_rows: usize,
    /// `w_ik ≤ y_k` for vertices without neighbors, which no edge row links.
    pub isolated_rows: usize,
}

impl AssignmentModel {
    pub fn y(&self, k: usize) -> usize {
        k
    }

    pub fn w(&self, i: usize, k: usize) -> usize {
        self.num_colors + i * self.num_colors + k
    }
}

/// Builds the assignment IP with `P` colors. Symmetry rows `y_k ≥ y_{k−1}`
/// make the used colors a contiguous block ending at color `P`.
pub fn build_assignment_model(inst: &SelColInstance) -> AssignmentModel {
    let g = &inst.graph;
    let n = g.n();
    let p = inst.num_clusters();
    let mut model = LpModel::new();
    for _ in 0..p {
        model.add_var(0.0, 1.0, 1.0);
    }
    for _ in 0..n * p {
        model.add_var(0.0, 1.0, 0.0);
    }
    let w = |i: usize, k: usize| p + i * p + k;

    let mut edge_color_rows = 0;
    for (u, v) in g.edges() {
        for k in 0..p {
            model.add_constraint(Constraint::le(vec![(w(u, k), 1.0), (w(v, k), 1.0), (k, -1.0)], 0.0));
            edge_color_rows += 1;
        }
    }
    for cluster in &inst.clusters {
        let terms = cluster.iter().flat_map(|i| (0..p).map(move |k| (w(i, k), 1.0))).collect();
        model.add_constraint(Constraint::eq(terms, 1.0));
    }
    for k in 1..p {
        model.add_constraint(Constraint::ge(vec![(k, 1.0), (k - 1, -1.0)], 0.0));
    }
    let mut isolated_rows = 0;
    for i in (0..n).filter(|&i| g.degree(i) == 0) {
        for k in 0..p {
            model.add_constraint(Constraint::le(vec![(w(i, k), 1.0), (k, -1.0)], 0.0));
            isolated_rows += 1;
        }
    }
    let binaries = (0..model.num_vars()).collect();
    AssignmentModel {
        model,
        binaries,
        num_vertices: n,
        num_colors: p,
        edge_color_rows,
        cluster_rows: inst.num_clusters(),
        symmetry_rows: p.saturating_sub(1),
        isolated_rows,
    }
}

pub fn solve_ip(inst: &SelColInstance, opts: &SolveOptions) -> Result<SolveReport> {
    let am = build_assignment_model(inst);
    let limits = IlpLimits {
        time_limit: opts.time_limit,
        node_limit: None,
        integral_objective: true,
    };
    let started = std::time::Instant::now();
    let res = solve_ilp(&am.model, &am.binaries, &limits, |_| CallbackOutcome::Accept)?;
    let seconds = started.elapsed().as_secs_f64();

    let status = match res.status {
        IlpStatus::Optimal => SolveStatus::Optimal,
        IlpStatus::FeasibleTimeout => SolveStatus::FeasibleTimeout,
        IlpStatus::Timeout => SolveStatus::Timeout,
        IlpStatus::Infeasible | IlpStatus::Aborted => {
            return Err(Error::SolverFailure("assignment model reported no solution".into()))
        }
    };
    let (selection, coloring) = match &res.values {
        Some(x) => {
            let (sel, col) = decode(inst, &am, x)?;
            (Some(sel), Some(col))
        }
        None => (None, None),
    };
    let mut report = SolveReport {
        method: Method::Ip,
        status,
        upper_bound: f64::INFINITY,
        lower_bound: f64::NEG_INFINITY,
        gap_percent: f64::INFINITY,
        selection,
        coloring,
        cuts: Vec::new(),
        events: Vec::new(),
        nodes: res.nodes,
        seconds,
        subproblem_seconds: 0.0,
        lb_trace: res.lb_trace.clone(),
        incomplete_subproblem: false,
    };
    let ub = if res.upper_bound.is_finite() { res.upper_bound.round() } else { f64::INFINITY };
    report.set_bounds(ub, res.lower_bound.max(1.0));
    Ok(report)
}

fn decode(inst: &SelColInstance, am: &AssignmentModel, x: &[f64]) -> Result<(Selection, Coloring)> {
    let p = am.num_colors;
    let color_of_vertex = |i: usize| (0..p).find(|&k| x[am.w(i, k)] > 0.5);
    let mut chosen = Vec::with_capacity(p);
    for cluster in &inst.clusters {
        let v = cluster
            .iter()
            .find(|&i| color_of_vertex(i).is_some())
            .ok_or_else(|| Error::SolverFailure("cluster left without a colored vertex".into()))?;
        chosen.push(v);
    }
    let sel = Selection::new(inst, chosen)?;
    let labels: Vec<usize> = sel
        .vertices()
        .iter()
        .map(|i| color_of_vertex(i).expect("selected vertex is colored"))
        .collect();
    Ok((sel, Coloring::from_labels(&labels)))
}
