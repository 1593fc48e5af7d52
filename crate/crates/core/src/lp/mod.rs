//! Dense linear programming and 0/1 branch and bound.
//!
//! Models are stated as `min c·x` over bounded variables and linear rows
//! `a·x {≤,≥,=} b`. [`solve_lp`] runs a bounded-variable two-phase primal
//! simplex; [`solve_ilp`] wraps it in best-first branch and bound over a set of
//! binary variables and supports lazy constraints through a callback that is
//! consulted at every LP-integral node.

mod ilp;
mod simplex;

pub use ilp::{
    gap_percent, solve_ilp, CallbackContext, CallbackOutcome, IlpLimits, IlpResult, IlpStatus,
};

use crate::error::{Error, Result};

/// Integrality tolerance for binaries.
pub const INT_TOL: f64 = 1e-6;
/// Primal feasibility tolerance for rows and bounds.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear row, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Constraint { terms, relation, rhs }
    }

    pub fn le(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Constraint::new(terms, Relation::Le, rhs)
    }

    pub fn ge(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Constraint::new(terms, Relation::Ge, rhs)
    }

    pub fn eq(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Constraint::new(terms, Relation::Eq, rhs)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row; zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.relation {
            Relation::Le => (act - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - act).max(0.0),
            Relation::Eq => (act - self.rhs).abs(),
        }
    }

    /// Bounds on the row activity implied by the relation.
    pub(crate) fn activity_bounds(&self) -> (f64, f64) {
        match self.relation {
            Relation::Le => (f64::NEG_INFINITY, self.rhs),
            Relation::Ge => (self.rhs, f64::INFINITY),
            Relation::Eq => (self.rhs, self.rhs),
        }
    }
}

/// `min objective·x` subject to `constraints` and `lower ≤ x ≤ upper`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpModel {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpModel {
    pub fn new() -> Self {
        LpModel::default()
    }

    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(cost);
        self.lower.len() - 1
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidInput("bound vectors do not match variable count".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("variable {j} has bounds [{l}, {u}]")));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::InvalidInput(format!("variable {j} has a non-finite cost")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &c.terms {
                if j >= n {
                    return Err(Error::InvalidInput(format!("row {i} references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidInput(format!("row {i} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let bounds = (0..x.len()).map(|j| (self.lower[j] - x[j]).max(x[j] - self.upper[j]).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped by a deadline; only node solves inside branch and bound set one.
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: u64,
}

pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    model.validate()?;
    let mut tab = simplex::Tableau::new(model, &model.lower, &model.upper, &[]);
    let status = tab.solve_primal()?;
    let values = tab.structural_values();
    let objective = model.objective_value(&values);
    Ok(LpSolution {
        status,
        values,
        objective,
        iterations: tab.iterations(),
    })
}
