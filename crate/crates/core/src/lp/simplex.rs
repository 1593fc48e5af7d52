//! Bounded-variable simplex on a dense Tucker tableau.
//!
//! Every row `i` gets a logical variable `r_i = a_i·x` whose bounds encode the
//! relation. The tableau keeps `x_B = T x_N` for the current basis together
//! with the reduced costs of the nonbasic columns, so rows can be appended and
//! bounds changed without rebuilding anything.

use super::{Constraint, LpModel, LpStatus, FEAS_TOL};
use crate::deadline::Deadline;
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const DEGENERATE_LIMIT: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Free,
}

#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    n: usize,
    m: usize,
    cols: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    value: Vec<f64>,
    state: Vec<State>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    t: Vec<f64>,
    d: Vec<f64>,
    iterations: u64,
    degenerate: u32,
    bland: bool,
    deadline: Option<Deadline>,
}

fn resting_state(lo: f64, hi: f64, cost: f64) -> (State, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) if cost < 0.0 && lo < hi => (State::AtUpper, hi),
        (true, _) => (State::AtLower, lo),
        (false, true) => (State::AtUpper, hi),
        (false, false) => (State::Free, 0.0),
    }
}

impl Tableau {
    /// Slack basis for `model` under the given variable bounds, with `extra`
    /// rows appended after the model rows.
    pub fn new(model: &LpModel, lower: &[f64], upper: &[f64], extra: &[Constraint]) -> Self {
        let n = model.num_vars();
        let mut tab = Tableau {
            n,
            m: 0,
            cols: n,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            cost: model.objective.clone(),
            value: vec![0.0; n],
            state: vec![State::AtLower; n],
            basic: Vec::new(),
            nonbasic: (0..n).collect(),
            t: Vec::new(),
            d: model.objective.clone(),
            iterations: 0,
            degenerate: 0,
            bland: false,
            deadline: None,
        };
        for j in 0..n {
            let (s, v) = resting_state(lower[j], upper[j], model.objective[j]);
            tab.state[j] = s;
            tab.value[j] = v;
        }
        for c in model.constraints.iter().chain(extra) {
            tab.add_row(c);
        }
        tab
    }

    /// Makes the solve methods return [`LpStatus::TimeLimit`] once `d` passes.
    pub fn set_deadline(&mut self, d: Deadline) {
        self.deadline = Some(d);
    }

    fn out_of_time(&self) -> bool {
        self.iterations.is_multiple_of(8) && self.deadline.is_some_and(|d| d.expired())
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    /// Heap footprint of the tableau body in `f64` cells.
    pub fn footprint(&self) -> usize {
        self.t.len() + self.value.len() * 4
    }

    pub fn structural_values(&self) -> Vec<f64> {
        self.value[..self.n].to_vec()
    }

    /// Appends a row, expressing its logical in terms of the current nonbasics.
    pub fn add_row(&mut self, c: &Constraint) {
        let (lo, hi) = c.activity_bounds();
        let var = self.lower.len();
        self.lower.push(lo);
        self.upper.push(hi);
        self.cost.push(0.0);
        self.state.push(State::Basic);

        let mut row = vec![0.0; self.cols];
        let col_of = self.column_index();
        for &(j, a) in &c.terms {
            match self.state[j] {
                State::Basic => {
                    let r = self.basic.iter().position(|&b| b == j).expect("basic var has a row");
                    let src = &self.t[r * self.cols..(r + 1) * self.cols];
                    for (dst, s) in row.iter_mut().zip(src) {
                        *dst += a * s;
                    }
                }
                _ => row[col_of[j]] += a,
            }
        }
        let v: f64 = c.terms.iter().map(|&(j, a)| a * self.value[j]).sum();
        self.value.push(v);
        self.t.extend_from_slice(&row);
        self.basic.push(var);
        self.m += 1;
    }

    fn column_index(&self) -> Vec<usize> {
        let mut col = vec![usize::MAX; self.lower.len()];
        for (k, &v) in self.nonbasic.iter().enumerate() {
            col[v] = k;
        }
        col
    }

    /// Tightens or relaxes the bounds of a structural variable.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lower[j] = lo;
        self.upper[j] = hi;
        if self.state[j] == State::Basic {
            return;
        }
        let col = self.nonbasic.iter().position(|&v| v == j).expect("nonbasic var has a column");
        let dj = self.d[col];
        let (s, target) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                if dj < 0.0 && lo < hi {
                    (State::AtUpper, hi)
                } else {
                    (State::AtLower, lo)
                }
            }
            (true, false) => (State::AtLower, lo),
            (false, true) => (State::AtUpper, hi),
            (false, false) => (State::Free, 0.0),
        };
        let delta = target - self.value[j];
        self.state[j] = s;
        if delta != 0.0 {
            self.shift_nonbasic(col, delta);
        }
    }

    fn shift_nonbasic(&mut self, col: usize, delta: f64) {
        let j = self.nonbasic[col];
        self.value[j] += delta;
        for i in 0..self.m {
            let a = self.t[i * self.cols + col];
            if a != 0.0 {
                self.value[self.basic[i]] += a * delta;
            }
        }
    }

    fn infeasibility(&self, var: usize) -> f64 {
        let v = self.value[var];
        (self.lower[var] - v).max(v - self.upper[var]).max(0.0)
    }

    fn max_primal_infeasibility(&self) -> f64 {
        self.basic.iter().map(|&b| self.infeasibility(b)).fold(0.0, f64::max)
    }

    fn dual_feasible(&self) -> bool {
        self.nonbasic.iter().zip(&self.d).all(|(&j, &dj)| {
            if self.lower[j] == self.upper[j] {
                return true;
            }
            match self.state[j] {
                State::AtLower => dj >= -OPT_TOL,
                State::AtUpper => dj <= OPT_TOL,
                State::Free => dj.abs() <= OPT_TOL,
                State::Basic => unreachable!(),
            }
        })
    }

    fn iteration_cap(&self) -> u64 {
        10_000 + 20 * (self.m + self.cols) as u64
    }

    /// Recomputes basic values from the nonbasics to shed accumulated drift.
    fn refresh(&mut self) {
        for i in 0..self.m {
            let row = &self.t[i * self.cols..(i + 1) * self.cols];
            let v: f64 = row.iter().zip(&self.nonbasic).map(|(a, &j)| a * self.value[j]).sum();
            self.value[self.basic[i]] = v;
        }
    }

    fn refresh_duals(&mut self) {
        for k in 0..self.cols {
            let mut dk = self.cost[self.nonbasic[k]];
            for i in 0..self.m {
                let cb = self.cost[self.basic[i]];
                if cb != 0.0 {
                    dk += cb * self.t[i * self.cols + k];
                }
            }
            self.d[k] = dk;
        }
    }

    fn pivot(&mut self, r: usize, s: usize, leaving_state: State) {
        let cols = self.cols;
        let p = self.t[r * cols + s];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for (k, a) in row.iter_mut().enumerate() {
                *a = if k == s { 1.0 / p } else { -*a / p };
            }
        }
        let pivot_row: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + s];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for (k, a) in row.iter_mut().enumerate() {
                if k == s {
                    *a = f / p;
                } else {
                    *a += f * pivot_row[k];
                }
            }
        }
        let f = self.d[s];
        if f != 0.0 {
            for (k, dk) in self.d.iter_mut().enumerate() {
                if k == s {
                    *dk = f / p;
                } else {
                    *dk += f * pivot_row[k];
                }
            }
        }
        let entering = self.nonbasic[s];
        let leaving = self.basic[r];
        self.basic[r] = entering;
        self.nonbasic[s] = leaving;
        self.state[entering] = State::Basic;
        self.state[leaving] = leaving_state;
        self.value[leaving] = match leaving_state {
            State::AtLower => self.lower[leaving],
            State::AtUpper => self.upper[leaving],
            _ => self.value[leaving],
        };
        self.iterations += 1;
    }

    fn note_step(&mut self, step: f64) {
        if step.abs() < 1e-12 {
            self.degenerate += 1;
            if self.degenerate >= DEGENERATE_LIMIT {
                self.bland = true;
            }
        }
    }

    /// Phase-one reduced costs: gradient of the total bound violation.
    fn phase_one_duals(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.cols];
        for i in 0..self.m {
            let b = self.basic[i];
            let v = self.value[b];
            let w = if v < self.lower[b] - FEAS_TOL {
                -1.0
            } else if v > self.upper[b] + FEAS_TOL {
                1.0
            } else {
                continue;
            };
            let row = &self.t[i * self.cols..(i + 1) * self.cols];
            for (dk, a) in d.iter_mut().zip(row) {
                *dk += w * a;
            }
        }
        d
    }

    /// Picks the entering column and direction from reduced costs `d`.
    fn choose_entering(&self, d: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, &dk) in d.iter().enumerate() {
            let j = self.nonbasic[k];
            if self.lower[j] == self.upper[j] {
                continue;
            }
            let dir = match self.state[j] {
                State::AtLower if dk < -OPT_TOL => 1.0,
                State::AtUpper if dk > OPT_TOL => -1.0,
                State::Free if dk.abs() > OPT_TOL => -dk.signum(),
                _ => continue,
            };
            let better = match best {
                None => true,
                Some((bk, _, score)) => {
                    if self.bland {
                        j < self.nonbasic[bk]
                    } else {
                        dk.abs() > score
                    }
                }
            };
            if better {
                best = Some((k, dir, dk.abs()));
            }
        }
        best.map(|(k, dir, _)| (k, dir))
    }

    /// Primal two-phase simplex from the current basis.
    pub fn solve_primal(&mut self) -> Result<LpStatus> {
        self.degenerate = 0;
        self.bland = false;
        let cap = self.iterations + self.iteration_cap();
        let mut refreshed = false;
        loop {
            if self.iterations > cap {
                return Err(Error::SolverFailure(format!(
                    "simplex exceeded {} iterations",
                    self.iteration_cap()
                )));
            }
            if self.out_of_time() {
                return Ok(LpStatus::TimeLimit);
            }
            let phase_one = self.max_primal_infeasibility() > FEAS_TOL;
            let p1;
            let d: &[f64] = if phase_one {
                p1 = self.phase_one_duals();
                &p1
            } else {
                &self.d
            };
            let Some((s, dir)) = self.choose_entering(d) else {
                if !refreshed {
                    // Re-derive values and duals once before declaring the result.
                    self.refresh();
                    self.refresh_duals();
                    refreshed = true;
                    continue;
                }
                return Ok(if phase_one {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                });
            };
            refreshed = false;
            match self.ratio_test(s, dir, phase_one) {
                None => {
                    if phase_one {
                        return Err(Error::SolverFailure("phase one ray without blocking row".into()));
                    }
                    return Ok(LpStatus::Unbounded);
                }
                Some((step, leave)) => {
                    self.note_step(step);
                    self.shift_nonbasic(s, dir * step);
                    match leave {
                        None => {
                            let j = self.nonbasic[s];
                            self.state[j] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                            self.value[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                            self.iterations += 1;
                        }
                        Some((r, st)) => self.pivot(r, s, st),
                    }
                }
            }
        }
    }

    /// Longest step along column `s` in direction `dir`, and the row that blocks
    /// it (`None` when the entering variable reaches its own opposite bound).
    #[allow(clippy::type_complexity)]
    fn ratio_test(&self, s: usize, dir: f64, phase_one: bool) -> Option<(f64, Option<(usize, State)>)> {
        let j = self.nonbasic[s];
        let mut best: Option<(f64, Option<(usize, State)>, f64)> = None;
        let own = if dir > 0.0 {
            self.upper[j] - self.value[j]
        } else {
            self.value[j] - self.lower[j]
        };
        if own.is_finite() {
            best = Some((own.max(0.0), None, f64::INFINITY));
        }
        for i in 0..self.m {
            let a = self.t[i * self.cols + s] * dir;
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basic[i];
            let (v, lo, hi) = (self.value[b], self.lower[b], self.upper[b]);
            let below = v < lo - FEAS_TOL;
            let above = v > hi + FEAS_TOL;
            let limit = if phase_one && below {
                if a > 0.0 {
                    Some(((lo - v) / a, State::AtLower))
                } else {
                    None
                }
            } else if phase_one && above {
                if a < 0.0 {
                    Some(((hi - v) / a, State::AtUpper))
                } else {
                    None
                }
            } else if a > 0.0 {
                hi.is_finite().then(|| (((hi - v) / a).max(0.0), State::AtUpper))
            } else {
                lo.is_finite().then(|| (((lo - v) / a).max(0.0), State::AtLower))
            };
            let Some((step, st)) = limit else { continue };
            let take = match &best {
                None => true,
                Some((bs, bl, ba)) => {
                    if step < bs - 1e-12 {
                        true
                    } else if step <= bs + 1e-12 {
                        match bl {
                            None => false,
                            Some((br, _)) => {
                                if self.bland {
                                    b < self.basic[*br]
                                } else {
                                    a.abs() > *ba
                                }
                            }
                        }
                    } else {
                        false
                    }
                }
            };
            if take {
                best = Some((step, Some((i, st)), a.abs()));
            }
        }
        best.map(|(step, leave, _)| (step, leave))
    }

    /// Dual simplex, used after bound changes or new rows on an optimal basis.
    /// Falls back to the primal method when the basis is not dual feasible.
    pub fn reoptimize(&mut self) -> Result<LpStatus> {
        if !self.dual_feasible() {
            return self.solve_primal();
        }
        self.degenerate = 0;
        self.bland = false;
        let cap = self.iterations + self.iteration_cap();
        loop {
            if self.iterations > cap {
                return Err(Error::SolverFailure(format!(
                    "dual simplex exceeded {} iterations",
                    self.iteration_cap()
                )));
            }
            if self.out_of_time() {
                return Ok(LpStatus::TimeLimit);
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let b = self.basic[i];
                let inf = self.infeasibility(b);
                if inf <= FEAS_TOL {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if self.bland {
                            b < self.basic[r]
                        } else {
                            inf > best
                        }
                    }
                };
                if better {
                    leave = Some((i, inf));
                }
            }
            let Some((r, _)) = leave else {
                self.refresh();
                if self.max_primal_infeasibility() > FEAS_TOL {
                    continue;
                }
                return self.solve_primal();
            };
            let b = self.basic[r];
            let increase = self.value[b] < self.lower[b];
            let target = if increase { self.lower[b] } else { self.upper[b] };
            let mut enter: Option<(usize, f64, f64)> = None;
            for k in 0..self.cols {
                let j = self.nonbasic[k];
                if self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = self.t[r * self.cols + k];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let up_ok = matches!(self.state[j], State::AtLower | State::Free);
                let down_ok = matches!(self.state[j], State::AtUpper | State::Free);
                let eligible = if increase {
                    (a > 0.0 && up_ok) || (a < 0.0 && down_ok)
                } else {
                    (a < 0.0 && up_ok) || (a > 0.0 && down_ok)
                };
                if !eligible {
                    continue;
                }
                let ratio = self.d[k].abs() / a.abs();
                let take = match enter {
                    None => true,
                    Some((bk, br, ba)) => {
                        if ratio < br - 1e-12 {
                            true
                        } else if ratio <= br + 1e-12 {
                            if self.bland {
                                j < self.nonbasic[bk]
                            } else {
                                a.abs() > ba
                            }
                        } else {
                            false
                        }
                    }
                };
                if take {
                    enter = Some((k, ratio, a.abs()));
                }
            }
            let Some((s, ratio, _)) = enter else {
                return Ok(LpStatus::Infeasible);
            };
            self.note_step(ratio);
            let delta = (target - self.value[b]) / self.t[r * self.cols + s];
            self.shift_nonbasic(s, delta);
            let st = if increase { State::AtLower } else { State::AtUpper };
            self.pivot(r, s, st);
        }
    }
}
