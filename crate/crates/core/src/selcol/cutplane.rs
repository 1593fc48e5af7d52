use std::time::Instant;

use crate::clique::max_clique;
use crate::coloring::{chromatic_number, color_selection_with_clique, Coloring};
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::instance::{SelColInstance, Selection};
use crate::lp::{solve_ilp, CallbackOutcome, Constraint, IlpLimits, IlpStatus, LpModel};
use crate::theta::max_clique_sdp;

use super::{
    clique_cut, coloring_cut, solve_ip, CallbackEvent, Cut, Method, SolveOptions,
    SolveReport, SolveStatus, Subproblem,
};

/// Runs `method` on `inst`.
pub fn solve(inst: &SelColInstance, method: Method, opts: &SolveOptions) -> Result<SolveReport> {
    match method {
        Method::Ip => solve_ip(inst, opts),
        Method::CutplanePerfect(sub) => solve_cutplane_perfect(inst, sub, opts),
        Method::CutplaneGeneral => solve_cutplane_general(inst, opts),
    }
}

/// Cutting planes with clique cuts only. Exact when the graph is perfect.
pub fn solve_cutplane_perfect(
    inst: &SelColInstance,
    sub: Subproblem,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    run(inst, Method::CutplanePerfect(sub), opts)
}

/// Cutting planes for arbitrary graphs: a clique cut whenever one is
/// violated, otherwise a coloring cut from the exact chromatic number.
pub fn solve_cutplane_general(inst: &SelColInstance, opts: &SolveOptions) -> Result<SolveReport> {
    run(inst, Method::CutplaneGeneral, opts)
}

/// `min t` with one selected vertex per cluster; `x_i` is column `i`, `t` is
/// column `n`.
fn build_master(inst: &SelColInstance) -> (LpModel, usize) {
    let n = inst.graph.n();
    let mut model = LpModel::new();
    for _ in 0..n {
        model.add_var(0.0, 1.0, 0.0);
    }
    let t = model.add_var(0.0, inst.num_clusters() as f64, 1.0);
    for cluster in &inst.clusters {
        model.add_constraint(Constraint::eq(cluster.iter().map(|i| (i, 1.0)).collect(), 1.0));
    }
    (model, t)
}

enum Step {
    Accept,
    Cut(Cut),
    /// Stop the run: time is up or a subproblem could not finish.
    Stop(String),
}

struct Separator<'a> {
    inst: &'a SelColInstance,
    method: Method,
    deadline: Deadline,
    sub_seconds: f64,
    events: Vec<CallbackEvent>,
    cuts: Vec<Cut>,
    failure: Option<Error>,
    incomplete: bool,
    /// Best selection whose chromatic number is known exactly.
    best: Option<(usize, Selection)>,
}

impl Separator<'_> {
    fn record_value(&mut self, value: usize, sel: &Selection) {
        if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
            self.best = Some((value, sel.clone()));
        }
    }

    fn separate(&mut self, t: f64, x: &[f64], global_lb: f64) -> Step {
        let sel = match Selection::from_indicator(self.inst, x) {
            Ok(s) => s,
            Err(e) => {
                let msg = e.to_string();
                self.failure = Some(e);
                return Step::Stop(msg);
            }
        };
        let vs = sel.vertices();
        let (h, map) = self.inst.graph.induced_subgraph(&vs).expect("selection is in range");
        let floor_t = (t + 1e-6).floor().max(0.0) as usize;
        let started = Instant::now();
        let mut event = CallbackEvent {
            t,
            selection: vs.as_slice().to_vec(),
            clique_size: 0,
            chi: None,
            cut: None,
            global_lb,
        };

        let clique = match self.method {
            Method::CutplanePerfect(Subproblem::Sdp) => match max_clique_sdp(&h) {
                Ok(k) => k,
                Err(e) => {
                    self.sub_seconds += started.elapsed().as_secs_f64();
                    let msg = e.to_string();
                    self.failure = Some(Error::SolverFailure(format!("theta subproblem: {msg}")));
                    self.events.push(event);
                    return Step::Stop(msg);
                }
            },
            _ => {
                let r = max_clique(&h, self.deadline.remaining(), floor_t);
                if !r.complete {
                    self.sub_seconds += started.elapsed().as_secs_f64();
                    self.incomplete = true;
                    self.events.push(event);
                    return Step::Stop("time limit reached in clique subproblem".into());
                }
                r.clique
            }
        };
        event.clique_size = clique.len();
        let perfect_mode = matches!(self.method, Method::CutplanePerfect(_));

        let step = if clique.len() as f64 > t + 1e-6 {
            if perfect_mode {
                // The clique search is exact above `floor_t`, so this is ω.
                self.record_value(clique.len(), &sel);
            }
            let k = VertexSet::new(clique.iter().map(|v| map[v]));
            let mut cut = clique_cut(&k).expect("violated clique is nonempty");
            cut.iteration = self.events.len();
            Step::Cut(cut)
        } else if perfect_mode {
            self.record_value(floor_t, &sel);
            Step::Accept
        } else {
            let r = chromatic_number(&h, self.deadline.remaining());
            match r.chromatic_number() {
                None => {
                    self.incomplete = true;
                    Step::Stop("time limit reached in coloring subproblem".into())
                }
                Some(chi) => {
                    event.chi = Some(chi);
                    self.record_value(chi, &sel);
                    if chi as f64 > t + 1e-6 {
                        let mut cut = coloring_cut(&sel, chi).expect("chi >= 1");
                        cut.iteration = self.events.len();
                        Step::Cut(cut)
                    } else {
                        Step::Accept
                    }
                }
            }
        };
        self.sub_seconds += started.elapsed().as_secs_f64();
        if let Step::Cut(c) = &step {
            event.cut = Some(c.kind);
            self.cuts.push(c.clone());
        }
        self.events.push(event);
        step
    }
}

fn run(inst: &SelColInstance, method: Method, opts: &SolveOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let (master, t_var) = build_master(inst);
    let n = inst.graph.n();
    let binaries: Vec<usize> = (0..n).collect();
    let mut sep = Separator {
        inst,
        method,
        deadline: Deadline::after(opts.time_limit),
        sub_seconds: 0.0,
        events: Vec::new(),
        cuts: Vec::new(),
        failure: None,
        incomplete: false,
        best: None,
    };

    let (status, lb, nodes, lb_trace) = if opts.outer_loop {
        outer_loop(&master, t_var, &binaries, &mut sep)?
    } else {
        let limits = IlpLimits {
            time_limit: opts.time_limit,
            node_limit: None,
            integral_objective: true,
        };
        let res = solve_ilp(&master, &binaries, &limits, |ctx| {
            match sep.separate(ctx.values[t_var], &ctx.values[..n], ctx.global_lb) {
                Step::Accept => CallbackOutcome::Accept,
                Step::Cut(c) => CallbackOutcome::Cuts(vec![c.to_constraint(t_var)]),
                Step::Stop(reason) => CallbackOutcome::Abort(reason),
            }
        })?;
        let status = match res.status {
            IlpStatus::Optimal => SolveStatus::Optimal,
            IlpStatus::Infeasible => {
                return Err(Error::SolverFailure("selection master is infeasible".into()))
            }
            _ => SolveStatus::Timeout,
        };
        (status, res.lower_bound, res.nodes, res.lb_trace)
    };
    if let Some(e) = sep.failure.take() {
        return Err(e);
    }
    let status = match (status, &sep.best) {
        (SolveStatus::Optimal, _) => SolveStatus::Optimal,
        (_, Some(_)) => SolveStatus::FeasibleTimeout,
        (_, None) => SolveStatus::Timeout,
    };

    let (selection, coloring) = match sep.best.take() {
        Some((_, sel)) => {
            let (h, _) = inst.graph.induced_subgraph(&sel.vertices())?;
            let coloring = final_coloring(&h, method)?;
            (Some(sel), Some(coloring))
        }
        None => (None, None),
    };
    let mut report = SolveReport {
        method,
        status,
        upper_bound: f64::INFINITY,
        lower_bound: f64::NEG_INFINITY,
        gap_percent: f64::INFINITY,
        selection,
        coloring,
        cuts: std::mem::take(&mut sep.cuts),
        events: std::mem::take(&mut sep.events),
        nodes,
        seconds: started.elapsed().as_secs_f64(),
        subproblem_seconds: sep.sub_seconds,
        lb_trace,
        incomplete_subproblem: sep.incomplete,
    };
    let ub = report.coloring.as_ref().map_or(f64::INFINITY, |c| c.num_colors as f64);
    report.set_bounds(ub, lb.max(1.0));
    Ok(report)
}

fn final_coloring(h: &crate::graph::Graph, method: Method) -> Result<Coloring> {
    match method {
        Method::CutplaneGeneral | Method::Ip => Ok(chromatic_number(h, None).coloring),
        Method::CutplanePerfect(_) => {
            let k = max_clique(h, None, 0);
            color_selection_with_clique(h, &k.clique)
        }
    }
}

/// Re-solves the master from scratch after every cut.
#[allow(clippy::type_complexity)]
fn outer_loop(
    master: &LpModel,
    t_var: usize,
    binaries: &[usize],
    sep: &mut Separator,
) -> Result<(SolveStatus, f64, u64, Vec<(f64, f64)>)> {
    let n = binaries.len();
    let mut model = master.clone();
    let mut lb = f64::NEG_INFINITY;
    let mut nodes = 0;
    let mut trace = Vec::new();
    loop {
        let limits = IlpLimits {
            time_limit: sep.deadline.remaining(),
            node_limit: None,
            integral_objective: true,
        };
        let res = solve_ilp(&model, binaries, &limits, |_| CallbackOutcome::Accept)?;
        nodes += res.nodes;
        match res.status {
            IlpStatus::Optimal => {}
            IlpStatus::Infeasible => {
                return Err(Error::SolverFailure("selection master is infeasible".into()))
            }
            _ => {
                lb = lb.max(res.lower_bound);
                return Ok((SolveStatus::Timeout, lb, nodes, trace));
            }
        }
        let x = res.values.expect("optimal master has a point");
        let t = x[t_var];
        if res.upper_bound > lb {
            lb = res.upper_bound;
            trace.push((sep.deadline.elapsed(), lb));
        }
        match sep.separate(t, &x[..n], lb) {
            Step::Accept => return Ok((SolveStatus::Optimal, lb, nodes, trace)),
            Step::Cut(c) => model.add_constraint(c.to_constraint(t_var)),
            Step::Stop(_) => return Ok((SolveStatus::Timeout, lb, nodes, trace)),
        }
    }
}
