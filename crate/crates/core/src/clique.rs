//! Exact maximum clique by branch and bound with greedy numbering and
//! recoloring (the MCS scheme).
//!
//! Candidates are greedily colored; a branch is cut as soon as the current
//! clique size plus the largest color among the remaining candidates cannot
//! beat the incumbent. Recoloring tries to push a vertex that opened a new
//! color class back into a class at or below the pruning threshold, which
//! shrinks the set of vertices that must actually be branched on.

use std::time::{Duration, Instant};

use crate::deadline::Deadline;
use crate::graph::{BitSet, Graph, VertexSet};

const POLL_MASK: u64 = (1 << 14) - 1;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxCliqueResult {
    pub clique: VertexSet,
    pub size: usize,
    /// Proven upper bound on the clique number. Equals `size` when the search
    /// completed and found a clique above `initial_lb`.
    pub upper_bound: usize,
    /// False when the time limit interrupted the search.
    pub complete: bool,
    pub nodes_explored: u64,
    pub elapsed: f64,
}

impl MaxCliqueResult {
    /// True when the search proved `size` is the clique number.
    pub fn is_optimal(&self) -> bool {
        self.complete && self.size == self.upper_bound
    }
}

/// Greedy numbering of `order`: each vertex gets the smallest label (from 1)
/// not used by an earlier neighbor. Labels are returned aligned with `order`.
pub fn greedy_number(g: &Graph, order: &[usize]) -> Vec<usize> {
    let mut classes: Vec<BitSet> = Vec::new();
    order
        .iter()
        .map(|&p| {
            let k = first_fit(g, &classes, p);
            if k == classes.len() {
                classes.push(BitSet::new(g.n()));
            }
            classes[k].insert(p);
            k + 1
        })
        .collect()
}

/// Applies the MCS exchange to every vertex whose label exceeds `threshold`.
///
/// A vertex `p` above the threshold moves into class `k1 ≤ threshold` when it
/// has exactly one neighbor `q` there and `q` can move into some class
/// `k2` with `k1 < k2 ≤ threshold` that holds none of its neighbors.
pub fn re_number(g: &Graph, order: &[usize], labels: &[usize], threshold: usize) -> Vec<usize> {
    assert_eq!(order.len(), labels.len());
    let max_label = labels.iter().copied().max().unwrap_or(0);
    let mut classes = vec![BitSet::new(g.n()); max_label];
    for (&v, &k) in order.iter().zip(labels) {
        classes[k - 1].insert(v);
    }
    let mut out = labels.to_vec();
    for (i, &p) in order.iter().enumerate() {
        if out[i] > threshold {
            if let Some((k1, q, k2)) = try_exchange(g, &mut classes, p, out[i] - 1, threshold) {
                out[i] = k1 + 1;
                let qi = order.iter().position(|&v| v == q).expect("q is in order");
                out[qi] = k2 + 1;
            }
        }
    }
    out
}

fn first_fit(g: &Graph, classes: &[BitSet], p: usize) -> usize {
    classes
        .iter()
        .position(|c| !c.intersects(g.row(p)))
        .unwrap_or(classes.len())
}

/// Classes are 0-based here; `threshold` counts labels, so eligible classes are
/// `0..threshold`. Returns `(k1, q, k2)` on success after updating `classes`.
fn try_exchange(
    g: &Graph,
    classes: &mut [BitSet],
    p: usize,
    kp: usize,
    threshold: usize,
) -> Option<(usize, usize, usize)> {
    let limit = threshold.min(classes.len());
    for k1 in 0..limit {
        if classes[k1].intersection_count(g.row(p)) != 1 {
            continue;
        }
        let mut hit = classes[k1].clone();
        hit.intersect_with(g.row(p));
        let q = hit.first().expect("one neighbor");
        for k2 in k1 + 1..limit {
            if !classes[k2].intersects(g.row(q)) {
                classes[kp].remove(p);
                classes[k1].remove(q);
                classes[k1].insert(p);
                classes[k2].insert(q);
                return Some((k1, q, k2));
            }
        }
    }
    None
}

/// Vertex order used at the root: non-increasing degree, ties by smaller id.
pub fn degree_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// Greedy maximal clique seeded from the highest-degree vertex.
fn greedy_clique(g: &Graph, order: &[usize]) -> Vec<usize> {
    let mut clique = Vec::new();
    let mut cand = BitSet::full(g.n());
    for &v in order {
        if cand.contains(v) {
            clique.push(v);
            cand.intersect_with(g.row(v));
        }
    }
    clique
}

pub fn max_clique(g: &Graph, time_limit: Option<Duration>, initial_lb: usize) -> MaxCliqueResult {
    let started = Instant::now();
    let mut search = Mcs::new(g, Deadline::after(time_limit), initial_lb);
    search.run();
    let complete = !search.timed_out;
    let size = search.best.len();
    let upper_bound = if !complete {
        search.root_bound.max(size)
    } else if size > initial_lb {
        size
    } else {
        initial_lb.min(search.root_bound).max(size)
    };
    MaxCliqueResult {
        clique: VertexSet::new(search.best.iter().copied()),
        size,
        upper_bound,
        complete,
        nodes_explored: search.nodes,
        elapsed: started.elapsed().as_secs_f64(),
    }
}

struct Mcs<'a> {
    g: &'a Graph,
    deadline: Deadline,
    lb: usize,
    best: Vec<usize>,
    nodes: u64,
    timed_out: bool,
    root_bound: usize,
    #[cfg(test)]
    audit: bool,
}

impl<'a> Mcs<'a> {
    fn new(g: &'a Graph, deadline: Deadline, lb: usize) -> Self {
        Mcs {
            g,
            deadline,
            lb,
            best: Vec::new(),
            nodes: 0,
            timed_out: false,
            root_bound: g.n(),
            #[cfg(test)]
            audit: false,
        }
    }

    /// Size any new clique has to exceed.
    #[inline]
    fn target(&self) -> usize {
        self.best.len().max(self.lb)
    }

    fn run(&mut self) {
        let order = degree_order(self.g);
        self.best = greedy_clique(self.g, &order);
        let (cand, colors) = self.number_sort(&order, 0);
        self.root_bound = colors.last().copied().unwrap_or(0);
        let mut q = Vec::new();
        self.expand(&mut q, cand, colors);
    }

    /// Orders `r` for expansion: vertices whose color cannot lift `q` past the
    /// target come first, the rest follow grouped by increasing color.
    fn number_sort(&self, r: &[usize], q_len: usize) -> (Vec<usize>, Vec<usize>) {
        let threshold = self.target().saturating_sub(q_len);
        let mut classes: Vec<BitSet> = Vec::new();
        let mut color_of = vec![0usize; self.g.n()];
        for &p in r {
            let k = first_fit(self.g, &classes, p);
            if k == classes.len() {
                classes.push(BitSet::new(self.g.n()));
            }
            classes[k].insert(p);
            color_of[p] = k;
            if k + 1 > threshold && k + 1 == classes.len() {
                if let Some((k1, q, k2)) = try_exchange(self.g, &mut classes, p, k, threshold) {
                    color_of[p] = k1;
                    color_of[q] = k2;
                    if classes[k].is_empty() {
                        classes.pop();
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(r.len());
        let mut cols = Vec::with_capacity(r.len());
        for &p in r {
            if color_of[p] < threshold {
                out.push(p);
                cols.push(color_of[p] + 1);
            }
        }
        for (k, class) in classes.iter().enumerate().skip(threshold) {
            for p in class.iter() {
                out.push(p);
                cols.push(k + 1);
            }
        }
        #[cfg(test)]
        if self.audit {
            self.audit_bound(&out, &cols);
        }
        (out, cols)
    }

    fn expand(&mut self, q: &mut Vec<usize>, cand: Vec<usize>, colors: Vec<usize>) {
        for i in (0..cand.len()).rev() {
            if self.timed_out {
                return;
            }
            self.nodes += 1;
            if self.nodes & POLL_MASK == 0 && self.deadline.expired() {
                self.timed_out = true;
                return;
            }
            if q.len() + colors[i] <= self.target() {
                return;
            }
            let p = cand[i];
            q.push(p);
            let row = self.g.row(p);
            let next: Vec<usize> = cand[..i]
                .iter()
                .copied()
                .filter(|&v| row[v / 64] >> (v % 64) & 1 == 1)
                .collect();
            if next.is_empty() {
                if q.len() > self.target() {
                    self.best = q.clone();
                }
            } else {
                let (ordered, cols) = self.number_sort(&next, q.len());
                self.expand(q, ordered, cols);
            }
            q.pop();
        }
    }

    #[cfg(test)]
    fn audit_bound(&self, cand: &[usize], colors: &[usize]) {
        let (h, _) = self
            .g
            .induced_subgraph(&cand.iter().copied().collect())
            .unwrap();
        let omega = tests::brute_force_omega(&h);
        let bound = colors.iter().copied().max().unwrap_or(0);
        assert!(bound >= omega, "color bound {bound} below ω {omega} of candidates");
        let mut classes = std::collections::HashMap::<usize, Vec<usize>>::new();
        for (&v, &k) in cand.iter().zip(colors) {
            classes.entry(k).or_default().push(v);
        }
        for members in classes.values() {
            assert!(self.g.is_stable(members), "color class not stable");
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::SelColInstance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Largest pairwise-adjacent subset by exhaustive subset enumeration.
    pub(crate) fn brute_force_omega(g: &Graph) -> usize {
        let n = g.n();
        assert!(n <= 22, "brute force limited to small graphs");
        let mut best = 0;
        for mask in 0u32..(1u32 << n) {
            let k = mask.count_ones() as usize;
            if k <= best {
                continue;
            }
            let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if g.is_clique(&vs) {
                best = k;
            }
        }
        best
    }

    fn is_proper(g: &Graph, order: &[usize], labels: &[usize]) -> bool {
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if g.has_edge(order[i], order[j]) && labels[i] == labels[j] {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn complete_graph() {
        let r = max_clique(&Graph::complete(5), None, 0);
        assert_eq!(r.size, 5);
        assert!(r.is_optimal());
    }

    #[test]
    fn cube_selection_has_omega_two() {
        let inst = SelColInstance::cube_example();
        let (h, _) = inst.graph.induced_subgraph(&VertexSet::new([0, 1, 2, 3])).unwrap();
        assert_eq!(max_clique(&h, None, 0).size, 2);
    }

    #[test]
    fn petersen_is_triangle_free() {
        let g = Graph::petersen();
        assert_eq!(brute_force_omega(&g), 2);
        let r = max_clique(&g, None, 0);
        assert_eq!(r.size, 2);
        assert!(g.is_clique(r.clique.as_slice()));
    }

    #[test]
    fn greedy_on_path() {
        assert_eq!(greedy_number(&Graph::path(3), &[0, 1, 2]), vec![1, 2, 1]);
    }

    #[test]
    fn greedy_on_stable_set() {
        assert_eq!(greedy_number(&Graph::empty(6), &[5, 3, 1]), vec![1, 1, 1]);
    }

    #[test]
    fn greedy_on_k4() {
        let mut labels = greedy_number(&Graph::complete(4), &[2, 0, 3, 1]);
        labels.sort_unstable();
        assert_eq!(labels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn re_number_leaves_low_labels() {
        let g = Graph::cycle(5);
        let order = [0, 1, 2, 3, 4];
        let labels = greedy_number(&g, &order);
        assert_eq!(re_number(&g, &order, &labels, 3), labels);
    }

    #[test]
    fn re_number_k4_unchanged() {
        let g = Graph::complete(4);
        let order = [0, 1, 2, 3];
        let labels = greedy_number(&g, &order);
        assert_eq!(re_number(&g, &order, &labels, 4), labels);
    }

    #[test]
    fn re_number_exchange_witness() {
        // a=0, q=1, b=2, e=3, p=4; edges a-b, a-e, p-q, p-b.
        let g = Graph::from_edges(5, &[(0, 2), (0, 3), (4, 1), (4, 2)]).unwrap();
        let order = [0, 1, 2, 3, 4];
        let labels = greedy_number(&g, &order);
        assert_eq!(labels, vec![1, 1, 2, 2, 3]);
        let out = re_number(&g, &order, &labels, 2);
        assert_eq!(out, vec![1, 2, 2, 2, 1]);
        assert!(is_proper(&g, &order, &out));
        assert_eq!(out.iter().max(), Some(&2));
    }

    #[test]
    fn initial_lb_prunes_to_bound_proof() {
        let g = Graph::cycle(6);
        let r = max_clique(&g, None, 3);
        assert!(r.complete);
        assert!(r.size <= 2);
        assert!(r.upper_bound <= 3);
        let r = max_clique(&g, None, 1);
        assert_eq!(r.size, 2);
        assert!(r.is_optimal());
    }

    #[test]
    fn random_graphs_match_brute_force_with_audit() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..150 {
            let n = rng.gen_range(1..=14);
            let p: f64 = rng.gen_range(0.05..0.95);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            let mut s = Mcs::new(&g, Deadline::none(), 0);
            s.audit = true;
            s.run();
            assert_eq!(s.best.len(), brute_force_omega(&g));
            assert!(g.is_clique(&s.best));
        }
    }

    #[test]
    fn renumber_keeps_greedy_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..=16);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.5));
            let order: Vec<usize> = (0..n).collect();
            let labels = greedy_number(&g, &order);
            assert!(is_proper(&g, &order, &labels));
            let t = rng.gen_range(0..=labels.iter().copied().max().unwrap());
            let out = re_number(&g, &order, &labels, t);
            assert!(is_proper(&g, &order, &out));
            for i in 0..n {
                if out[i] != labels[i] {
                    assert!(out[i] <= t);
                }
            }
        }
    }
}
