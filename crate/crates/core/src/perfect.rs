//! Brute-force perfectness certification through odd hole search.
//!
//! A graph is perfect exactly when neither it nor its complement contains an
//! induced odd cycle of length at least five. The search below grows
//! chordless paths depth-first from each possible smallest cycle vertex, so
//! it is exponential in the worst case and guarded by a size cap.

use crate::error::{Error, Result};
use crate::graph::{BitSet, Graph};

/// Largest graph the oracle accepts unless a caller raises the guard.
pub const DEFAULT_GUARD: usize = 64;

pub fn find_odd_hole(g: &Graph) -> Result<Option<Vec<usize>>> {
    find_odd_hole_with_guard(g, DEFAULT_GUARD)
}

pub fn find_odd_hole_with_guard(g: &Graph, guard: usize) -> Result<Option<Vec<usize>>> {
    if g.n() > guard {
        return Err(Error::Capability(format!(
            "odd hole search limited to {guard} vertices, graph has {}",
            g.n()
        )));
    }
    let n = g.n();
    let mut path = Vec::with_capacity(n);
    for start in 0..n {
        // Only vertices above `start` may appear, so each hole is found from its minimum.
        let mut blocked = BitSet::new(n);
        for u in 0..=start {
            blocked.insert(u);
        }
        path.clear();
        path.push(start);
        if extend(g, &mut path, &blocked) {
            debug_assert!(is_odd_hole(g, &path));
            return Ok(Some(path));
        }
    }
    Ok(None)
}

/// `blocked` holds vertices that may not join the path: those at or below the
/// start, and the closed neighborhoods of interior path vertices.
fn extend(g: &Graph, path: &mut Vec<usize>, blocked: &BitSet) -> bool {
    let start = path[0];
    let last = *path.last().unwrap();
    let mut cand = g.neighbor_set(last);
    cand.difference_with(blocked.words());
    for &p in path.iter() {
        cand.remove(p);
    }
    let len = path.len();
    for w in cand.iter() {
        let closes = len >= 2 && g.has_edge(w, start);
        if closes {
            if len + 1 >= 5 && (len + 1) % 2 == 1 {
                path.push(w);
                return true;
            }
            continue;
        }
        let mut next = blocked.clone();
        if len >= 2 {
            next.union_with(g.row(last));
            next.insert(last);
        }
        path.push(w);
        if extend(g, path, &next) {
            return true;
        }
        path.pop();
    }
    false
}

/// Checks that `cycle` lists an induced, chordless odd cycle of length ≥ 5.
pub fn is_odd_hole(g: &Graph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k < 5 || k.is_multiple_of(2) {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    if !cycle.iter().all(|&v| v < g.n() && seen.insert(v)) {
        return false;
    }
    for i in 0..k {
        for j in i + 1..k {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            if g.has_edge(cycle[i], cycle[j]) != consecutive {
                return false;
            }
        }
    }
    true
}

/// Which side of a non-perfect graph carries the obstruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Imperfection {
    OddHole(Vec<usize>),
    OddAntihole(Vec<usize>),
}

pub fn find_obstruction(g: &Graph, guard: usize) -> Result<Option<Imperfection>> {
    if let Some(c) = find_odd_hole_with_guard(g, guard)? {
        return Ok(Some(Imperfection::OddHole(c)));
    }
    Ok(find_odd_hole_with_guard(&g.complement(), guard)?.map(Imperfection::OddAntihole))
}

pub fn is_perfect(g: &Graph) -> Result<bool> {
    is_perfect_with_guard(g, DEFAULT_GUARD)
}

pub fn is_perfect_with_guard(g: &Graph, guard: usize) -> Result<bool> {
    Ok(find_obstruction(g, guard)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SelColInstance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive reference: any vertex subset of odd size ≥ 5 inducing a
    /// 2-regular connected graph is an odd hole.
    fn has_odd_hole_by_subsets(g: &Graph) -> bool {
        let n = g.n();
        for mask in 0u32..(1 << n) {
            let k = mask.count_ones() as usize;
            if k < 5 || k.is_multiple_of(2) {
                continue;
            }
            let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let (h, _) = g.induced_subgraph(&vs.iter().copied().collect()).unwrap();
            if (0..k).all(|v| h.degree(v) == 2) && h.is_connected() {
                return true;
            }
        }
        false
    }

    #[test]
    fn c5_is_its_own_hole() {
        let hole = find_odd_hole(&Graph::cycle(5)).unwrap().unwrap();
        assert_eq!(hole.len(), 5);
        assert!(is_odd_hole(&Graph::cycle(5), &hole));
        assert!(!is_perfect(&Graph::cycle(5)).unwrap());
    }

    #[test]
    fn even_cycle_has_no_hole() {
        assert_eq!(find_odd_hole(&Graph::cycle(6)).unwrap(), None);
        assert!(is_perfect(&Graph::cycle(6)).unwrap());
    }

    #[test]
    fn cube_has_no_odd_hole() {
        let g = SelColInstance::cube_example().graph;
        assert_eq!(find_odd_hole(&g).unwrap(), None);
        assert!(!has_odd_hole_by_subsets(&g));
        assert!(is_perfect(&g).unwrap());
    }

    #[test]
    fn antihole_caught_on_complement() {
        let g = Graph::cycle(7).complement();
        assert_eq!(find_odd_hole(&g).unwrap(), None);
        assert!(matches!(find_obstruction(&g, 32).unwrap(), Some(Imperfection::OddAntihole(_))));
        assert!(!is_perfect(&g).unwrap());
    }

    #[test]
    fn petersen_has_odd_holes() {
        assert!(!is_perfect(&Graph::petersen()).unwrap());
    }

    #[test]
    fn guard_is_enforced() {
        let err = find_odd_hole_with_guard(&Graph::empty(40), 32).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
    }

    #[test]
    fn random_bipartite_graphs_are_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=12);
            let side: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let p = rng.gen_range(0.1..0.9);
            let g = Graph::from_fn(n, |u, v| side[u] != side[v] && rng.gen_bool(p));
            assert!(!has_odd_hole_by_subsets(&g));
            assert!(!has_odd_hole_by_subsets(&g.complement()));
            assert!(is_perfect(&g).unwrap());
        }
    }

    #[test]
    fn hole_search_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(5..=11);
            let p = rng.gen_range(0.15..0.7);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            let found = find_odd_hole(&g).unwrap();
            assert_eq!(found.is_some(), has_odd_hole_by_subsets(&g), "{g:?}");
            if let Some(c) = found {
                assert!(is_odd_hole(&g, &c));
            }
        }
    }

    #[test]
    fn perfection_closed_under_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let p = rng.gen_range(0.1..0.9);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            assert_eq!(is_perfect(&g).unwrap(), is_perfect(&g.complement()).unwrap());
        }
    }
}
