//! Exact selective coloring: the assignment IP and the cutting-plane
//! decomposition over selection variables.
//!
//! The decomposition master is `min t` over one binary `x_i` per vertex (exactly
//! one per cluster) and a continuous `t ∈ [0, P]`. Integral master solutions are
//! handed to a subproblem that either certifies `t` or returns a violated cut:
//! clique cuts `t ≥ Σ_{i∈K} x_i` for perfect graphs, and additionally coloring
//! cuts `t ≥ χ − Σ_{i∈ŝ}(1 − x_i)` for arbitrary graphs.

mod cutplane;
mod ip;

use std::fmt;
use std::time::Duration;

pub use cutplane::{solve, solve_cutplane_general, solve_cutplane_perfect};
pub use ip::{build_assignment_model, solve_ip, AssignmentModel};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::instance::Selection;
use crate::lp::{gap_percent, Constraint};

/// Default wall-clock limit per run, in seconds.
pub const DEFAULT_TIME_LIMIT_SECS: u64 = 1200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subproblem {
    Mcs,
    Sdp,
}

impl fmt::Display for Subproblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subproblem::Mcs => "mcs",
            Subproblem::Sdp => "sdp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Ip,
    CutplanePerfect(Subproblem),
    CutplaneGeneral,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ip => "ip",
            Method::CutplanePerfect(_) => "cutplane-perfect",
            Method::CutplaneGeneral => "cutplane-general",
        }
    }

    /// Subproblem engine label used in reports; `none` for the IP.
    pub fn subproblem_name(&self) -> &'static str {
        match self {
            Method::Ip => "none",
            Method::CutplanePerfect(Subproblem::Mcs) | Method::CutplaneGeneral => "mcs",
            Method::CutplanePerfect(Subproblem::Sdp) => "sdp",
        }
    }

    /// Inverse of [`Method::name`]; `sub` only matters for `cutplane-perfect`.
    pub fn from_names(method: &str, sub: &str) -> Result<Method> {
        let sub = match sub {
            "mcs" | "none" => Subproblem::Mcs,
            "sdp" => Subproblem::Sdp,
            other => return Err(Error::InvalidInput(format!("unknown subproblem `{other}`"))),
        };
        match method {
            "ip" => Ok(Method::Ip),
            "cutplane-perfect" => Ok(Method::CutplanePerfect(sub)),
            "cutplane-general" => Ok(Method::CutplaneGeneral),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    /// Re-solve the master from scratch after each cut instead of adding cuts
    /// lazily inside a single search tree.
    pub outer_loop: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit: Some(Duration::from_secs(DEFAULT_TIME_LIMIT_SECS)),
            outer_loop: false,
        }
    }
}

impl SolveOptions {
    pub fn with_time_limit(secs: f64) -> Self {
        SolveOptions {
            time_limit: Some(Duration::from_secs_f64(secs)),
            ..SolveOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutKind {
    Clique,
    Coloring,
}

/// `t ≥ Σ coef_i x_i + constant` over the master's vertex variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    pub coefficients: Vec<(usize, f64)>,
    pub constant: f64,
    /// Index of the subproblem call that produced the cut.
    pub iteration: usize,
    /// Clique (clique cuts) or selected vertices (coloring cuts).
    pub source: VertexSet,
}

impl Cut {
    pub fn rhs(&self, x: &[f64]) -> f64 {
        self.constant + self.coefficients.iter().map(|&(i, a)| a * x[i]).sum::<f64>()
    }

    pub fn is_violated(&self, t: f64, x: &[f64]) -> bool {
        t < self.rhs(x) - 1e-6
    }

    /// Master row with `t` at column `t_var` and `x_i` at column `i`.
    pub fn to_constraint(&self, t_var: usize) -> Constraint {
        let mut terms = vec![(t_var, 1.0)];
        terms.extend(self.coefficients.iter().map(|&(i, a)| (i, -a)));
        Constraint::ge(terms, self.constant)
    }
}

pub fn clique_cut(clique: &VertexSet) -> Result<Cut> {
    if clique.is_empty() {
        return Err(Error::InvalidInput("clique cut needs a nonempty clique".into()));
    }
    Ok(Cut {
        kind: CutKind::Clique,
        coefficients: clique.iter().map(|i| (i, 1.0)).collect(),
        constant: 0.0,
        iteration: 0,
        source: clique.clone(),
    })
}

/// `t − Σ_{i∈ŝ} x_i ≥ χ − |ŝ|`.
pub fn coloring_cut(sel: &Selection, chi: usize) -> Result<Cut> {
    if chi < 1 {
        return Err(Error::InvalidInput("coloring cut needs chi >= 1".into()));
    }
    let vs = sel.vertices();
    Ok(Cut {
        kind: CutKind::Coloring,
        coefficients: vs.iter().map(|i| (i, 1.0)).collect(),
        constant: chi as f64 - vs.len() as f64,
        iteration: 0,
        source: vs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// Time limit reached with a selection in hand.
    FeasibleTimeout,
    /// Time limit reached before any selection was found.
    Timeout,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleTimeout => "feasible-timeout",
            SolveStatus::Timeout => "timeout",
        }
    }

    pub fn timed_out(&self) -> bool {
        !matches!(self, SolveStatus::Optimal)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One subproblem call at an integral master solution.
#[derive(Clone, Debug, PartialEq)]
pub struct CallbackEvent {
    pub t: f64,
    pub selection: Vec<usize>,
    pub clique_size: usize,
    /// Chromatic number of the selection, when it was computed.
    pub chi: Option<usize>,
    pub cut: Option<CutKind>,
    pub global_lb: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: Method,
    pub status: SolveStatus,
    /// Best selective chromatic number found, `+inf` without a selection.
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub gap_percent: f64,
    pub selection: Option<Selection>,
    /// Coloring of the selected vertices, indexed in increasing vertex order.
    pub coloring: Option<Coloring>,
    pub cuts: Vec<Cut>,
    pub events: Vec<CallbackEvent>,
    pub nodes: u64,
    pub seconds: f64,
    pub subproblem_seconds: f64,
    pub lb_trace: Vec<(f64, f64)>,
    /// Set when a subproblem stopped short and its answer was not certified.
    pub incomplete_subproblem: bool,
}

impl SolveReport {
    pub fn cuts_of(&self, kind: CutKind) -> usize {
        self.cuts.iter().filter(|c| c.kind == kind).count()
    }

    pub fn subproblem_time_fraction(&self) -> f64 {
        if self.seconds <= 0.0 {
            return 0.0;
        }
        (self.subproblem_seconds / self.seconds * 100.0).clamp(0.0, 100.0)
    }

    /// Optimal value when the run proved optimality.
    pub fn optimum(&self) -> Option<usize> {
        (self.status == SolveStatus::Optimal).then_some(self.upper_bound.round() as usize)
    }

    fn set_bounds(&mut self, ub: f64, lb: f64) {
        self.upper_bound = ub;
        self.lower_bound = lb.min(ub);
        self.gap_percent = gap_percent(ub, self.lower_bound);
    }
}
