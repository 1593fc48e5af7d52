//! Exact vertex coloring (DSATUR branch and bound), greedy colorings, the
//! clique-anchored coloring of a perfect selection, and the enumeration
//! oracle for the selective chromatic number.

use std::time::Duration;

use crate::clique::{degree_order, max_clique};
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::instance::{SelColInstance, Selection};

const POLL_MASK: u64 = (1 << 12) - 1;

/// Cap on the clique bound computation inside the exact search.
const CLIQUE_SLICE: Duration = Duration::from_millis(500);

/// Default cap on the number of selections the enumeration oracle visits.
pub const DEFAULT_SELECTION_BUDGET: u128 = 1_000_000;

/// Proper coloring with labels `1..=num_colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub color_of: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// Relabels colors to `1..=k` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let color_of: Vec<usize> = labels
            .iter()
            .map(|&c| {
                let next = map.len() + 1;
                *map.entry(c).or_insert(next)
            })
            .collect();
        Coloring {
            color_of,
            num_colors: map.len(),
        }
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.color_of.len() == g.n()
            && self.color_of.iter().all(|&c| c >= 1 && c <= self.num_colors)
            && g.edges().all(|(u, v)| self.color_of[u] != self.color_of[v])
    }

    pub fn classes(&self) -> Vec<VertexSet> {
        (1..=self.num_colors)
            .map(|c| (0..self.color_of.len()).filter(|&v| self.color_of[v] == c).collect())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ChromaticResult {
    /// Best proper coloring found; optimal when `complete`.
    pub coloring: Coloring,
    /// Proven lower bound on the chromatic number.
    pub lower_bound: usize,
    pub complete: bool,
    pub nodes: u64,
}

impl ChromaticResult {
    pub fn chromatic_number(&self) -> Option<usize> {
        self.complete.then_some(self.coloring.num_colors)
    }
}

/// Largest-first greedy coloring (non-increasing degree, ties by id).
pub fn greedy_coloring(g: &Graph) -> Coloring {
    let order = degree_order(g);
    let mut color = vec![0usize; g.n()];
    for &v in &order {
        color[v] = smallest_free(g, &color, v);
    }
    Coloring::from_labels(&color)
}

fn smallest_free(g: &Graph, color: &[usize], v: usize) -> usize {
    let mut used: Vec<bool> = vec![false; g.n() + 2];
    for u in g.neighbors(v) {
        used[color[u]] = true;
    }
    (1..).find(|&c| !used[c]).unwrap()
}

/// Greedy DSATUR: repeatedly color the most saturated vertex.
pub fn dsatur_coloring(g: &Graph) -> Coloring {
    let n = g.n();
    let mut color = vec![0usize; n];
    let mut state = SatState::new(g, n + 1);
    for _ in 0..n {
        let v = state.pick(g, &color).expect("uncolored vertex remains");
        let c = (1..).find(|&c| state.adj_count[v * state.stride + c] == 0).unwrap();
        state.assign(g, &mut color, v, c);
    }
    Coloring::from_labels(&color)
}

/// Saturation bookkeeping: `adj_count[v][c]` counts neighbors of `v` with color `c`.
struct SatState {
    stride: usize,
    adj_count: Vec<u32>,
    saturation: Vec<usize>,
    uncolored_degree: Vec<usize>,
}

impl SatState {
    fn new(g: &Graph, max_colors: usize) -> Self {
        let n = g.n();
        let stride = max_colors + 1;
        SatState {
            stride,
            adj_count: vec![0; n * stride],
            saturation: vec![0; n],
            uncolored_degree: (0..n).map(|v| g.degree(v)).collect(),
        }
    }

    fn assign(&mut self, g: &Graph, color: &mut [usize], v: usize, c: usize) {
        color[v] = c;
        for u in g.neighbors(v) {
            let slot = &mut self.adj_count[u * self.stride + c];
            if *slot == 0 {
                self.saturation[u] += 1;
            }
            *slot += 1;
            self.uncolored_degree[u] -= 1;
        }
    }

    fn unassign(&mut self, g: &Graph, color: &mut [usize], v: usize) {
        let c = color[v];
        color[v] = 0;
        for u in g.neighbors(v) {
            let slot = &mut self.adj_count[u * self.stride + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[u] -= 1;
            }
            self.uncolored_degree[u] += 1;
        }
    }

    /// Max saturation, then max uncolored degree, then smallest id.
    fn pick(&self, g: &Graph, color: &[usize]) -> Option<usize> {
        (0..g.n())
            .filter(|&v| color[v] == 0)
            .max_by_key(|&v| (self.saturation[v], self.uncolored_degree[v], std::cmp::Reverse(v)))
    }
}

struct Search<'a> {
    g: &'a Graph,
    state: SatState,
    color: Vec<usize>,
    /// Colorings must use fewer than `ub` colors to be recorded.
    ub: usize,
    lb: usize,
    best: Option<Vec<usize>>,
    nodes: u64,
    deadline: Deadline,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, precolor: &[usize], ub: usize, lb: usize, deadline: Deadline) -> Self {
        let mut s = Search {
            g,
            state: SatState::new(g, ub.max(1)),
            color: vec![0; g.n()],
            ub,
            lb,
            best: None,
            nodes: 0,
            deadline,
            timed_out: false,
        };
        for (i, &v) in precolor.iter().enumerate() {
            s.state.assign(g, &mut s.color, v, i + 1);
        }
        s
    }

    fn run(&mut self, colored: usize, max_used: usize) {
        if self.timed_out || self.ub <= self.lb {
            return;
        }
        self.nodes += 1;
        if self.nodes & POLL_MASK == 0 && self.deadline.expired() {
            self.timed_out = true;
            return;
        }
        if colored == self.g.n() {
            self.ub = max_used;
            self.best = Some(self.color.clone());
            return;
        }
        let v = self.state.pick(self.g, &self.color).expect("uncolored vertex");
        let mut c = 1;
        while c <= max_used + 1 && c < self.ub {
            if self.state.adj_count[v * self.state.stride + c] == 0 {
                self.state.assign(self.g, &mut self.color, v, c);
                self.run(colored + 1, max_used.max(c));
                self.state.unassign(self.g, &mut self.color, v);
                if self.timed_out || self.ub <= self.lb {
                    return;
                }
            }
            c += 1;
        }
    }
}

pub fn chromatic_number(g: &Graph, time_limit: Option<Duration>) -> ChromaticResult {
    let deadline = Deadline::after(time_limit);
    if g.n() == 0 {
        return ChromaticResult {
            coloring: Coloring {
                color_of: Vec::new(),
                num_colors: 0,
            },
            lower_bound: 0,
            complete: true,
            nodes: 0,
        };
    }
    let mut best = greedy_coloring(g);
    let ds = dsatur_coloring(g);
    if ds.num_colors < best.num_colors {
        best = ds;
    }
    let slice = deadline.remaining().map_or(CLIQUE_SLICE, |r| r.min(CLIQUE_SLICE));
    let clique = max_clique(g, Some(slice), 0);
    let lb = clique.size.max(1);
    if lb >= best.num_colors {
        return ChromaticResult {
            lower_bound: best.num_colors,
            coloring: best,
            complete: true,
            nodes: 0,
        };
    }
    let mut search = Search::new(g, clique.clique.as_slice(), best.num_colors, lb, deadline);
    search.run(clique.size, clique.size);
    let complete = !search.timed_out;
    if let Some(labels) = search.best.take() {
        best = Coloring::from_labels(&labels);
    }
    ChromaticResult {
        lower_bound: if complete { best.num_colors } else { lb },
        coloring: best,
        complete,
        nodes: search.nodes,
    }
}

/// Colors a selection subgraph with exactly `|clique|` colors, clique members
/// taking colors `1..=|clique|` in increasing id order.
///
/// On a perfect graph with `clique` maximum, such a coloring exists and is
/// optimal. Fails with a perfectness violation when none exists.
pub fn color_selection_with_clique(g_sel: &Graph, clique: &VertexSet) -> Result<Coloring> {
    if let Some(v) = clique.iter().find(|&v| v >= g_sel.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g_sel.n() });
    }
    if !g_sel.is_clique(clique.as_slice()) {
        return Err(Error::InvalidInput("given vertex set is not a clique".into()));
    }
    let k = clique.len();
    if g_sel.n() == 0 {
        return Ok(Coloring {
            color_of: Vec::new(),
            num_colors: 0,
        });
    }
    if k == 0 {
        return Err(Error::InvalidInput("clique must be nonempty on a nonempty graph".into()));
    }
    let mut search = Search::new(g_sel, clique.as_slice(), k + 1, k, Deadline::none());
    search.run(k, k);
    match search.best {
        Some(labels) => Ok(Coloring {
            color_of: labels,
            num_colors: k,
        }),
        None => Err(Error::PerfectnessViolation(format!(
            "selection subgraph has no {k}-coloring extending its maximum clique"
        ))),
    }
}

/// Minimum over all selections of the chromatic number of the selected
/// subgraph, by plain enumeration. Returns the first optimal selection in
/// odometer order.
pub fn brute_force_selcol(inst: &SelColInstance, budget: u128) -> Result<(usize, Selection)> {
    let count = inst.selection_count();
    if count > budget {
        return Err(Error::Capability(format!(
            "{count} selections exceed the enumeration budget of {budget}"
        )));
    }
    let mut best: Option<(usize, Selection)> = None;
    for sel in Selection::enumerate(inst) {
        let (h, _) = inst.graph.induced_subgraph(&sel.vertices())?;
        let bound = best.as_ref().map_or(usize::MAX, |b| b.0);
        if max_clique(&h, None, 0).size >= bound {
            continue;
        }
        let chi = chromatic_number(&h, None)
            .chromatic_number()
            .expect("no time limit");
        if chi < bound {
            best = Some((chi, sel));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("instance has no clusters".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SelColInstance;
    use crate::perfect::is_perfect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Smallest k admitting a proper k-coloring, by trying all k^n labelings.
    fn brute_force_chi(g: &Graph) -> usize {
        let n = g.n();
        if n == 0 {
            return 0;
        }
        for k in 1..=n {
            let mut labels = vec![0usize; n];
            loop {
                if g.edges().all(|(u, v)| labels[u] != labels[v]) {
                    return k;
                }
                let mut i = 0;
                while i < n {
                    labels[i] += 1;
                    if labels[i] < k {
                        break;
                    }
                    labels[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        n
    }

    #[test]
    fn small_classics() {
        assert_eq!(chromatic_number(&Graph::cycle(5), None).chromatic_number(), Some(3));
        assert_eq!(chromatic_number(&Graph::complete(4), None).chromatic_number(), Some(4));
        let p = chromatic_number(&Graph::petersen(), None);
        assert_eq!(p.chromatic_number(), Some(3));
        assert!(p.coloring.is_proper(&Graph::petersen()));
        assert_eq!(brute_force_chi(&Graph::petersen()), 3);
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_coloring(&Graph::empty(7)).num_colors, 1);
        assert_eq!(greedy_coloring(&Graph::complete(3)).num_colors, 3);
        let c6 = Graph::cycle(6);
        let c = greedy_coloring(&c6);
        assert_eq!(c.num_colors, 2);
        assert!(c.is_proper(&c6));
    }

    #[test]
    fn clique_anchored_coloring() {
        let k3 = Graph::complete(3);
        let c = color_selection_with_clique(&k3, &VertexSet::all(3)).unwrap();
        assert_eq!(c.color_of, vec![1, 2, 3]);

        let inst = SelColInstance::cube_example();
        let (h, _) = inst.graph.induced_subgraph(&VertexSet::new([0, 1, 2, 3])).unwrap();
        let c = color_selection_with_clique(&h, &VertexSet::new([0, 1])).unwrap();
        assert_eq!(c.num_colors, 2);
        assert!(c.is_proper(&h));

        let e = Graph::empty(4);
        let c = color_selection_with_clique(&e, &VertexSet::new([2])).unwrap();
        assert_eq!(c.color_of, vec![1, 1, 1, 1]);
    }

    #[test]
    fn clique_anchored_coloring_rejects_imperfect() {
        let c5 = Graph::cycle(5);
        let err = color_selection_with_clique(&c5, &VertexSet::new([0, 1])).unwrap_err();
        assert!(matches!(err, Error::PerfectnessViolation(_)));
        assert!(color_selection_with_clique(&c5, &VertexSet::new([0, 2])).is_err());
    }

    #[test]
    fn oracle_examples() {
        let (chi, sel) = brute_force_selcol(&SelColInstance::cube_example(), DEFAULT_SELECTION_BUDGET).unwrap();
        assert_eq!(chi, 1);
        assert!(SelColInstance::cube_example().graph.is_stable(sel.vertices().as_slice()));

        let inst = SelColInstance::new(
            Graph::empty(5),
            vec![VertexSet::new([0, 3]), VertexSet::new([1, 2, 4])],
        )
        .unwrap();
        assert_eq!(brute_force_selcol(&inst, DEFAULT_SELECTION_BUDGET).unwrap().0, 1);

        let k3 = SelColInstance::singletons(Graph::complete(3));
        assert_eq!(brute_force_selcol(&k3, DEFAULT_SELECTION_BUDGET).unwrap().0, 3);
    }

    #[test]
    fn oracle_budget() {
        let inst = SelColInstance::cube_example();
        assert!(matches!(brute_force_selcol(&inst, 15), Err(Error::Capability(_))));
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..250 {
            let n = rng.gen_range(0..=9);
            let p = rng.gen_range(0.1..0.9);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            let r = chromatic_number(&g, None);
            assert!(r.complete);
            assert!(r.coloring.is_proper(&g));
            assert_eq!(r.coloring.num_colors, brute_force_chi(&g), "{g:?}");
        }
    }

    #[test]
    fn perfect_graphs_have_chi_equal_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut checked = 0;
        while checked < 60 {
            let n = rng.gen_range(3..=14);
            let p = rng.gen_range(0.1..0.9);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            if !is_perfect(&g).unwrap() {
                continue;
            }
            checked += 1;
            let chi = chromatic_number(&g, None).chromatic_number().unwrap();
            assert_eq!(chi, max_clique(&g, None, 0).size);
        }
    }

    #[test]
    fn chromatic_is_monotone_under_induced_subgraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..80 {
            let n = rng.gen_range(2..=16);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.5));
            let chi = chromatic_number(&g, None).chromatic_number().unwrap();
            let sub: VertexSet = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            let (h, _) = g.induced_subgraph(&sub).unwrap();
            assert!(chromatic_number(&h, None).chromatic_number().unwrap() <= chi);
        }
    }
}
