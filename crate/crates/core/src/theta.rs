//! Theta number by a first-order SDP method, and maximum stable set / clique
//! extraction for perfect graphs by repeated theta evaluation.
//!
//! The SDP is `max J•X` subject to `tr X = 1`, `X_ij = 0` on edges and
//! `X ⪰ 0`. It is solved with an alternating-direction augmented Lagrangian
//! method on the dual, whose only expensive step is one symmetric
//! eigendecomposition per iteration.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 50_000;

/// Largest distance from an integer at which theta is still rounded.
const ROUNDING_BAND: f64 = 0.25;
/// Distance from an integer above which theta is recomputed more tightly.
const RETIGHTEN_BAND: f64 = 0.1;
const TIGHT_TOL: f64 = 1e-9;
const RELAXATION: f64 = 1.6;

#[derive(Clone, Debug)]
pub struct ThetaResult {
    /// `J • X` at the returned primal matrix.
    pub theta: f64,
    pub x: DMatrix<f64>,
    /// `|tr X − 1|`.
    pub trace_gap: f64,
    /// Largest `|X_ij|` over edges.
    pub edge_violation: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

/// Residuals of a candidate theta matrix against the SDP constraints:
/// `(trace gap, edge violation, minimum eigenvalue)`.
pub fn theta_residuals(g: &Graph, x: &DMatrix<f64>) -> (f64, f64, f64) {
    let trace_gap = (x.trace() - 1.0).abs();
    let edge_violation = g.edges().map(|(i, j)| x[(i, j)].abs()).fold(0.0, f64::max);
    let min_eigenvalue = if x.nrows() == 0 {
        0.0
    } else {
        SymmetricEigen::new(x.clone()).eigenvalues.min()
    };
    (trace_gap, edge_violation, min_eigenvalue)
}

/// The rank-one matrix `x xᵀ / (eᵀx)` for the indicator `x` of `set`.
pub fn stable_set_lift(n: usize, set: &VertexSet) -> DMatrix<f64> {
    let k = set.len() as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if set.contains(i) && set.contains(j) {
            1.0 / k
        } else {
            0.0
        }
    })
}

pub fn theta_number(g: &Graph, tol: f64) -> Result<ThetaResult> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidInput("theta needs at least one vertex".into()));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let nf = n as f64;
    let c = DMatrix::from_element(n, n, -1.0);
    let mut x: DMatrix<f64> = DMatrix::identity(n, n) / nf;
    let mut s: DMatrix<f64> = DMatrix::zeros(n, n);
    let mut ye = vec![0.0; edges.len()];
    let mut mu = 1.0;
    let mut worst = f64::INFINITY;

    for it in 1..=MAX_ITERATIONS {
        // y = −(AA*)⁻¹ (μ(A X − b) + A(S − C)); AA* is diag(n, ½, …, ½).
        let y0 = -(mu * (x.trace() - 1.0) + s.trace() + nf) / nf;
        for (k, &(i, j)) in edges.iter().enumerate() {
            ye[k] = -2.0 * (mu * x[(i, j)] + s[(i, j)] + 1.0);
        }
        // V = C − A*y − μX
        let mut v = &c - &x * mu;
        for i in 0..n {
            v[(i, i)] -= y0;
        }
        for (k, &(i, j)) in edges.iter().enumerate() {
            v[(i, j)] -= ye[k] / 2.0;
            v[(j, i)] -= ye[k] / 2.0;
        }
        let eig = SymmetricEigen::new(v.clone());
        let mut s_new: DMatrix<f64> = DMatrix::zeros(n, n);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 0.0 {
                let q = eig.eigenvectors.column(k);
                s_new += q * q.transpose() * lam;
            }
        }
        let x_step = (&s_new - &v) / mu;
        // Dual residual C − A*y − S, using V + μX_old = C − A*y.
        let dres = (&v + &x * mu - &s_new).norm() / (1.0 + nf);
        x = &x * (1.0 - RELAXATION) + x_step * RELAXATION;
        s = s_new;

        let mut pres2 = (x.trace() - 1.0).powi(2);
        for &(i, j) in &edges {
            pres2 += x[(i, j)].powi(2);
        }
        let pres = pres2.sqrt();
        let pobj = x.sum();
        let gap = (pobj + y0).abs() / (1.0 + pobj.abs() + y0.abs());
        worst = pres.max(dres).max(gap);
        if worst <= tol {
            // Rescaling to unit trace keeps X positive semidefinite and the
            // edge entries proportionally small.
            let tr = x.trace();
            if tr > 0.0 {
                x /= tr;
            }
            let (trace_gap, edge_violation, min_eigenvalue) = theta_residuals(g, &x);
            return Ok(ThetaResult {
                theta: x.sum(),
                x,
                trace_gap,
                edge_violation,
                min_eigenvalue,
                iterations: it,
            });
        }
        if it % 20 == 0 {
            if dres > 5.0 * pres {
                mu = (mu / 1.5).max(1e-4);
            } else if pres > 5.0 * dres {
                mu = (mu * 1.5).min(1e4);
            }
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ITERATIONS,
        residual: worst,
    })
}

/// Outcome of the stable set extraction, with the number of SDP solves used.
#[derive(Clone, Debug)]
pub struct StableSetExtraction {
    pub set: VertexSet,
    pub alpha: usize,
    pub theta_calls: usize,
}

/// Stability number of a perfect graph as rounded theta. Edgeless and
/// complete graphs are answered directly.
fn stability_number(g: &Graph, calls: &mut usize) -> Result<usize> {
    let n = g.n();
    if n == 0 || g.m() == 0 {
        return Ok(n);
    }
    if 2 * g.m() == n * (n - 1) {
        return Ok(1);
    }
    *calls += 1;
    let mut th = theta_number(g, DEFAULT_TOL)?.theta;
    if (th - th.round()).abs() > RETIGHTEN_BAND {
        th = theta_number(g, TIGHT_TOL)?.theta;
    }
    let dist = (th - th.round()).abs();
    if dist > ROUNDING_BAND {
        return Err(Error::Accuracy { theta: th, residual: dist });
    }
    Ok(th.round() as usize)
}

/// Deletes vertices in increasing id order while the stability number stays
/// put, labeling those whose removal would lower it, and stops as soon as
/// `α` vertices are labeled.
pub fn extract_stable_set(g: &Graph) -> Result<StableSetExtraction> {
    let n = g.n();
    let mut calls = 0;
    let alpha = stability_number(g, &mut calls)?;
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut labeled = Vec::new();
    for v in 0..n {
        if labeled.len() == alpha {
            break;
        }
        if remaining == alpha {
            // What is left has α vertices and stability number α.
            labeled = (0..n).filter(|&u| alive[u]).collect();
            break;
        }
        alive[v] = false;
        let keep = VertexSet::new((0..n).filter(|&u| alive[u]));
        let (sub, _) = g.induced_subgraph(&keep)?;
        if stability_number(&sub, &mut calls)? == alpha {
            remaining -= 1;
        } else {
            alive[v] = true;
            labeled.push(v);
        }
    }
    let set = VertexSet::new(labeled);
    if set.len() != alpha || !g.is_stable(set.as_slice()) {
        return Err(Error::PerfectnessViolation(format!(
            "extraction did not produce a stable set of size {alpha}"
        )));
    }
    Ok(StableSetExtraction {
        set,
        alpha,
        theta_calls: calls,
    })
}

pub fn max_stable_set_sdp(g: &Graph) -> Result<VertexSet> {
    Ok(extract_stable_set(g)?.set)
}

/// Maximum clique as a maximum stable set of the complement.
pub fn max_clique_sdp(g: &Graph) -> Result<VertexSet> {
    max_stable_set_sdp(&g.complement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::max_clique;
    use crate::perfect::is_perfect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_alpha(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                g.is_stable(&vs)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        Graph::from_fn(n, |_, _| rng.gen_bool(p))
    }

    #[test]
    fn odd_cycles_match_closed_form() {
        for n in [5usize, 7, 9] {
            let r = theta_number(&Graph::cycle(n), DEFAULT_TOL).unwrap();
            let c = (std::f64::consts::PI / n as f64).cos();
            let expected = n as f64 * c / (1.0 + c);
            assert!((r.theta - expected).abs() < 1e-4, "C{n}: {} vs {expected}", r.theta);
        }
    }

    #[test]
    fn complete_and_edgeless() {
        for n in 1..=6 {
            let r = theta_number(&Graph::complete(n), DEFAULT_TOL).unwrap();
            assert!((r.theta - 1.0).abs() < 1e-5);
            let r = theta_number(&Graph::empty(n), DEFAULT_TOL).unwrap();
            assert!((r.theta - n as f64).abs() < 1e-5);
        }
    }

    #[test]
    fn result_satisfies_constraints() {
        let r = theta_number(&Graph::petersen(), DEFAULT_TOL).unwrap();
        assert!((r.theta - 4.0).abs() < 1e-4);
        assert!(r.trace_gap < 1e-5);
        assert!(r.edge_violation < 1e-5);
        assert!(r.min_eigenvalue > -1e-5);
    }

    #[test]
    fn sandwich_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..25 {
            let n = rng.gen_range(2..=9);
            let p = rng.gen_range(0.2..0.8);
            let g = random_graph(&mut rng, n, p);
            let th = theta_number(&g, DEFAULT_TOL).unwrap().theta;
            let alpha = brute_alpha(&g) as f64;
            let cover = crate::coloring::chromatic_number(&g.complement(), None)
                .chromatic_number()
                .unwrap() as f64;
            assert!(alpha <= th + 1e-4 && th <= cover + 1e-4, "{alpha} {th} {cover}");
        }
    }

    #[test]
    fn lift_of_stable_set_is_feasible() {
        let g = Graph::cycle(6);
        let set = VertexSet::new([0, 2, 4]);
        let x = stable_set_lift(6, &set);
        let (tg, ev, me) = theta_residuals(&g, &x);
        assert!(tg < 1e-12 && ev == 0.0 && me > -1e-12);
        assert!((x.sum() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn extraction_examples() {
        assert_eq!(max_stable_set_sdp(&Graph::empty(4)).unwrap().len(), 4);
        assert_eq!(max_stable_set_sdp(&Graph::complete(4)).unwrap().len(), 1);
        let s = max_stable_set_sdp(&Graph::cycle(6)).unwrap();
        assert_eq!(s.len(), 3);
        assert!(Graph::cycle(6).is_stable(s.as_slice()));
        assert_eq!(max_clique_sdp(&Graph::complete(4)).unwrap().len(), 4);
        let k = max_clique_sdp(&Graph::cycle(4)).unwrap();
        assert_eq!(k.len(), 2);
        assert!(Graph::cycle(4).is_clique(k.as_slice()));
    }

    #[test]
    fn extraction_matches_clique_search_on_perfect_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tested = 0;
        while tested < 15 {
            let n = rng.gen_range(3..=10);
            let g = random_graph(&mut rng, n, 0.5);
            if !is_perfect(&g).unwrap() {
                continue;
            }
            tested += 1;
            let ext = extract_stable_set(&g.complement()).unwrap();
            assert!(g.is_clique(ext.set.as_slice()));
            assert_eq!(ext.set.len(), max_clique(&g, None, 0).size);
            assert!(ext.theta_calls <= n);
        }
    }

    #[test]
    fn empty_graph_is_rejected() {
        assert!(theta_number(&Graph::empty(0), DEFAULT_TOL).is_err());
    }
}
