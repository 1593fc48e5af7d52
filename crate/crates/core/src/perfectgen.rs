//! Random perfect graphs grown from a library of small perfect graphs with
//! perfection-preserving operations, and random vertex partitions.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, VertexSet};
use crate::instance::SelColInstance;
use crate::perfect::is_perfect;

/// Largest base graph size the library builder accepts.
pub const MAX_BASE_N: usize = 7;
pub const DEFAULT_BASE_N: usize = 6;
pub const DEFAULT_EPSILON: f64 = 0.025;
pub const DEFAULT_MAX_RESTARTS: usize = 10_000;

/// Probability of an in-loop complement step.
const COMPLEMENT_PROB: f64 = 1.0 / 7.0;

/// Connected perfect graphs on `1..=max_n` vertices, one per isomorphism
/// class, grouped by vertex count.
#[derive(Clone, Debug)]
pub struct BaseLibrary {
    by_size: Vec<Vec<Graph>>,
}

impl BaseLibrary {
    pub fn max_n(&self) -> usize {
        self.by_size.len() - 1
    }

    pub fn of_size(&self, k: usize) -> &[Graph] {
        self.by_size.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.by_size.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Graph> {
        self.by_size.iter().flatten()
    }
}

/// Vertex invariant used to restrict the permutations tried by
/// [`canonical_code`]: degree, then the sorted neighbor degrees.
fn vertex_invariant(g: &Graph, v: usize) -> (usize, Vec<usize>) {
    let mut nd: Vec<usize> = g.neighbors(v).map(|u| g.degree(u)).collect();
    nd.sort_unstable();
    (g.degree(v), nd)
}

/// Isomorphism-invariant code of a graph on at most 11 vertices: the largest
/// upper-triangle adjacency word over all labelings that list vertices in
/// invariant order.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical code supports at most 11 vertices");
    let inv: Vec<_> = (0..n).map(|v| vertex_invariant(g, v)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    // cell[p] = index of the first position sharing position p's invariant
    let mut cell_start = vec![0; n];
    for p in 1..n {
        cell_start[p] = if inv[order[p]] == inv[order[p - 1]] { cell_start[p - 1] } else { p };
    }
    let mut cell_end = vec![n; n];
    for p in (0..n).rev() {
        if p + 1 < n && cell_start[p + 1] == cell_start[p] {
            cell_end[p] = cell_end[p + 1];
        } else {
            cell_end[p] = p + 1;
        }
    }
    let mut best = 0u64;
    let mut perm = vec![0usize; n];
    let mut used = vec![false; n];
    fn rec(
        p: usize,
        g: &Graph,
        order: &[usize],
        cs: &[usize],
        ce: &[usize],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut u64,
    ) {
        let n = order.len();
        if p == n {
            let mut code = 0u64;
            for a in 0..n {
                for b in a + 1..n {
                    code = (code << 1) | g.has_edge(perm[a], perm[b]) as u64;
                }
            }
            *best = (*best).max(code);
            return;
        }
        for q in cs[p]..ce[p] {
            if !used[q] {
                used[q] = true;
                perm[p] = order[q];
                rec(p + 1, g, order, cs, ce, perm, used, best);
                used[q] = false;
            }
        }
    }
    rec(0, g, &order, &cell_start, &cell_end, &mut perm, &mut used, &mut best);
    best
}

pub fn build_base_library(max_base_n: usize) -> Result<BaseLibrary> {
    if max_base_n > MAX_BASE_N {
        return Err(Error::Capability(format!(
            "base library size {max_base_n} exceeds the guard of {MAX_BASE_N}"
        )));
    }
    let mut by_size: Vec<Vec<Graph>> = vec![Vec::new(); max_base_n + 1];
    if max_base_n == 0 {
        return Ok(BaseLibrary { by_size });
    }
    // All graphs up to isomorphism, grown one vertex at a time.
    let mut layer = vec![Graph::empty(1)];
    by_size[1].push(Graph::empty(1));
    for k in 2..=max_base_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &layer {
            for mask in 0u32..1 << (k - 1) {
                let mut b = GraphBuilder::new(k);
                for (u, v) in g.edges() {
                    b.add_edge(u, v).expect("in range");
                }
                for u in 0..k - 1 {
                    if mask >> u & 1 == 1 {
                        b.add_edge(u, k - 1).expect("in range");
                    }
                }
                let h = b.build();
                if seen.insert(canonical_code(&h)) {
                    next.push(h);
                }
            }
        }
        for h in &next {
            if h.is_connected() && is_perfect(h)? {
                by_size[k].push(h.clone());
            }
        }
        layer = next;
    }
    Ok(BaseLibrary { by_size })
}

/// The library on up to six vertices, built once per process.
pub fn default_library() -> &'static BaseLibrary {
    static LIB: OnceLock<BaseLibrary> = OnceLock::new();
    LIB.get_or_init(|| build_base_library(DEFAULT_BASE_N).expect("within guard"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PerfectOp {
    CliqueIdentification,
    Substitution,
    Composition,
    DisjointUnion,
    Join,
    Complement,
}

impl PerfectOp {
    pub const ALL: [PerfectOp; 6] = [
        PerfectOp::CliqueIdentification,
        PerfectOp::Substitution,
        PerfectOp::Composition,
        PerfectOp::DisjointUnion,
        PerfectOp::Join,
        PerfectOp::Complement,
    ];

    /// Vertices added when the second operand has `n2` vertices, as a
    /// range `(min, max)`; `None` when the pair is never allowed.
    fn growth(self, n1: usize, n2: usize) -> Option<(usize, usize)> {
        match self {
            PerfectOp::CliqueIdentification if n2 >= 2 => Some((0, n2 - 1)),
            PerfectOp::Substitution if n2 >= 1 => Some((n2 - 1, n2 - 1)),
            PerfectOp::Composition if n1 >= 3 && n2 >= 3 => Some((n2 - 2, n2 - 2)),
            PerfectOp::DisjointUnion | PerfectOp::Join => Some((n2, n2)),
            _ => None,
        }
    }
}

/// `g` followed by the vertices of `g2` shifted by `g.n()`.
fn place_side_by_side(g: &Graph, g2: &Graph) -> GraphBuilder {
    let n1 = g.n();
    let mut b = GraphBuilder::new(n1 + g2.n());
    for (u, v) in g.edges() {
        b.add_edge(u, v).expect("in range");
    }
    for (u, v) in g2.edges() {
        b.add_edge(n1 + u, n1 + v).expect("in range");
    }
    b
}

pub fn op_disjoint_union(g: &Graph, g2: &Graph) -> Graph {
    place_side_by_side(g, g2).build()
}

pub fn op_join(g: &Graph, g2: &Graph) -> Graph {
    let n1 = g.n();
    let mut b = place_side_by_side(g, g2);
    for u in 0..n1 {
        for v in 0..g2.n() {
            b.add_edge(u, n1 + v).expect("in range");
        }
    }
    b.build()
}

pub fn op_complement(g: &Graph) -> Graph {
    g.complement()
}

/// Drops vertex `v` and renumbers the rest in order.
fn without_vertex(g: &Graph, v: usize) -> (Graph, Vec<Option<usize>>) {
    let keep = VertexSet::new((0..g.n()).filter(|&u| u != v));
    let (h, _) = g.induced_subgraph(&keep).expect("in range");
    let map = (0..g.n())
        .map(|u| match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(u),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(u - 1),
        })
        .collect();
    (h, map)
}

/// Replaces `v` by a copy of `g2` whose vertices all inherit `v`'s neighbors.
pub fn op_substitution(g: &Graph, v: usize, g2: &Graph) -> Result<Graph> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let (h, map) = without_vertex(g, v);
    let n1 = h.n();
    let mut b = place_side_by_side(&h, g2);
    for u in g.neighbors(v) {
        let u = map[u].expect("neighbor is not v");
        for w in 0..g2.n() {
            b.add_edge(u, n1 + w).expect("in range");
        }
    }
    Ok(b.build())
}

/// Deletes `v` from `g` and `v2` from `g2`, then joins the two former
/// neighborhoods completely.
pub fn op_composition(g: &Graph, v: usize, g2: &Graph, v2: usize) -> Result<Graph> {
    if g.n() < 3 || g2.n() < 3 {
        return Err(Error::InvalidInput("composition needs two graphs with at least three vertices".into()));
    }
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if v2 >= g2.n() {
        return Err(Error::VertexOutOfRange { vertex: v2, n: g2.n() });
    }
    let (h1, m1) = without_vertex(g, v);
    let (h2, m2) = without_vertex(g2, v2);
    let n1 = h1.n();
    let mut b = place_side_by_side(&h1, &h2);
    for a in g.neighbors(v) {
        for c in g2.neighbors(v2) {
            b.add_edge(m1[a].expect("not v"), n1 + m2[c].expect("not v2")).expect("in range");
        }
    }
    Ok(b.build())
}

/// Glues `g2` onto `g` by identifying `k2[i]` with `k1[i]`; both lists must be
/// cliques of equal length.
pub fn identify_cliques(g: &Graph, k1: &[usize], g2: &Graph, k2: &[usize]) -> Result<Graph> {
    if k1.len() != k2.len() {
        return Err(Error::InvalidInput("identified cliques differ in size".into()));
    }
    if !g.is_clique(k1) || !g2.is_clique(k2) {
        return Err(Error::InvalidInput("identified vertex sets must be cliques".into()));
    }
    let n1 = g.n();
    let mut map = vec![usize::MAX; g2.n()];
    for (&a, &b) in k1.iter().zip(k2) {
        if a >= n1 {
            return Err(Error::VertexOutOfRange { vertex: a, n: n1 });
        }
        map[b] = a;
    }
    let mut next = n1;
    for m in map.iter_mut().filter(|m| **m == usize::MAX) {
        *m = next;
        next += 1;
    }
    let mut b = GraphBuilder::new(next);
    for (u, v) in g.edges() {
        b.add_edge(u, v)?;
    }
    for (u, v) in g2.edges() {
        b.add_edge(map[u], map[v])?;
    }
    Ok(b.build())
}

/// Greedy maximal clique containing `start`, scanning candidates in random order.
fn random_maximal_clique(g: &Graph, start: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut others: Vec<usize> = g.neighbors(start).collect();
    others.shuffle(rng);
    let mut clique = vec![start];
    for u in others {
        if clique.iter().all(|&c| g.has_edge(c, u)) {
            clique.push(u);
        }
    }
    clique
}

/// Random clique identification: maximal cliques grown from a random vertex of
/// each graph, the smaller one glued onto a random equally sized subset of the
/// larger through a random bijection.
pub fn op_clique_identification(g: &Graph, g2: &Graph, rng: &mut impl Rng) -> Result<Graph> {
    if g.n() == 0 || g2.n() == 0 {
        return Err(Error::InvalidInput("clique identification needs nonempty graphs".into()));
    }
    let mut c1 = random_maximal_clique(g, rng.gen_range(0..g.n()), rng);
    let mut c2 = random_maximal_clique(g2, rng.gen_range(0..g2.n()), rng);
    let k = c1.len().min(c2.len());
    c1.shuffle(rng);
    c2.shuffle(rng);
    c1.truncate(k);
    c2.truncate(k);
    identify_cliques(g, &c1, g2, &c2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub max_restarts: usize,
}

impl GenConfig {
    pub fn new(n: usize, rho: f64, seed: u64) -> Self {
        GenConfig {
            n,
            rho,
            epsilon: DEFAULT_EPSILON,
            seed,
            max_restarts: DEFAULT_MAX_RESTARTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput("generated graphs need n >= 2".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidInput(format!("target density {} is not in (0, 1)", self.rho)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// One growth run: a random start graph extended by random operations until
/// it has exactly `n` vertices.
fn build_once(n: usize, lib: &BaseLibrary, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let starts: Vec<&Graph> = (1..=n.min(lib.max_n())).flat_map(|k| lib.of_size(k)).collect();
    let mut g = (*starts.choose(rng).ok_or_else(|| Error::InvalidInput("base library is empty".into()))?).clone();
    let mut last_complement = false;
    let mut complements = 0;
    let mut stalls = 0;
    while g.n() < n {
        let budget = n - g.n();
        if !last_complement && complements < 2 * n && rng.gen_bool(COMPLEMENT_PROB) {
            g = op_complement(&g);
            last_complement = true;
            complements += 1;
            continue;
        }
        last_complement = false;
        let mut pairs: Vec<(PerfectOp, &Graph)> = Vec::new();
        for op in &PerfectOp::ALL[..5] {
            for k in 1..=lib.max_n() {
                // Clique identification may stall at zero growth; it is
                // admitted on its largest possible growth.
                if let Some((_, hi)) = op.growth(g.n(), k) {
                    if (1..=budget).contains(&hi) {
                        pairs.extend(lib.of_size(k).iter().map(|h| (*op, h)));
                    }
                }
            }
        }
        let &(op, g2) = pairs.choose(rng).ok_or(Error::GenerationFailure {
            restarts: 0,
            closest_density: f64::NAN,
        })?;
        let before = g.n();
        g = match op {
            PerfectOp::CliqueIdentification => op_clique_identification(&g, g2, rng)?,
            PerfectOp::Substitution => op_substitution(&g, rng.gen_range(0..g.n()), g2)?,
            PerfectOp::Composition => {
                op_composition(&g, rng.gen_range(0..g.n()), g2, rng.gen_range(0..g2.n()))?
            }
            PerfectOp::DisjointUnion => op_disjoint_union(&g, g2),
            PerfectOp::Join => op_join(&g, g2),
            PerfectOp::Complement => unreachable!(),
        };
        if g.n() == before {
            stalls += 1;
            if stalls > 100 * n {
                return Err(Error::GenerationFailure { restarts: 0, closest_density: f64::NAN });
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Ok(g.permute(&perm))
}

/// Density closest to `rho` that a graph on `n >= 2` vertices can have.
pub fn nearest_density(n: usize, rho: f64) -> f64 {
    let pairs = (n * (n - 1) / 2) as f64;
    (rho * pairs).round() / pairs
}

/// Whether some edge count puts the density strictly within `epsilon` of `rho`.
pub fn density_reachable(n: usize, rho: f64, epsilon: f64) -> bool {
    n >= 2 && (nearest_density(n, rho) - rho).abs() < epsilon
}

/// Grows random perfect graphs on `cfg.n` vertices until one (or its
/// complement) has edge density within `cfg.epsilon` of `cfg.rho`.
pub fn generate_perfect(cfg: &GenConfig, lib: &BaseLibrary) -> Result<Graph> {
    cfg.validate()?;
    if !density_reachable(cfg.n, cfg.rho, cfg.epsilon) {
        return Err(Error::GenerationFailure {
            restarts: 0,
            closest_density: nearest_density(cfg.n, cfg.rho),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut closest = f64::NAN;
    let mut closest_dist = f64::INFINITY;
    for _ in 0..cfg.max_restarts.max(1) {
        let g = match build_once(cfg.n, lib, &mut rng) {
            Ok(g) => g,
            Err(Error::GenerationFailure { .. }) => continue,
            Err(e) => return Err(e),
        };
        let d = g.edge_density()?;
        if (d - cfg.rho).abs() < cfg.epsilon {
            return Ok(g);
        }
        if (1.0 - d - cfg.rho).abs() < cfg.epsilon {
            return Ok(g.complement());
        }
        for cand in [d, 1.0 - d] {
            if (cand - cfg.rho).abs() < closest_dist {
                closest_dist = (cand - cfg.rho).abs();
                closest = cand;
            }
        }
    }
    Err(Error::GenerationFailure {
        restarts: cfg.max_restarts,
        closest_density: closest,
    })
}

/// Random partition into clusters of `lo..=hi` vertices. A leftover smaller
/// than `lo` joins the last cluster.
pub fn generate_partition(n: usize, lo: usize, hi: usize, rng: &mut impl Rng) -> Result<Vec<VertexSet>> {
    if lo < 1 || lo > hi || hi > n {
        return Err(Error::InvalidInput(format!(
            "cluster bounds [{lo}, {hi}] are invalid for {n} vertices"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let r = rng.gen_range(lo..=hi).min(rest.len());
        let mut cluster = rest[..r].to_vec();
        rest = &rest[r..];
        if rest.len() < lo {
            cluster.extend_from_slice(rest);
            rest = &[];
        }
        clusters.push(cluster);
    }
    Ok(clusters.into_iter().map(VertexSet::new).collect())
}

/// A generated perfect graph with a random partition, both from `cfg.seed`.
pub fn generate_instance(cfg: &GenConfig, lo: usize, hi: usize, lib: &BaseLibrary) -> Result<SelColInstance> {
    let g = generate_perfect(cfg, lib)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let clusters = generate_partition(cfg.n, lo, hi, &mut rng)?;
    SelColInstance::new(g, clusters)
}
