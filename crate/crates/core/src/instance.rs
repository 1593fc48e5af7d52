//! Selective coloring instances: a graph plus a partition of its vertices
//! into clusters.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelColInstance {
    pub graph: Graph,
    pub clusters: Vec<VertexSet>,
}

impl SelColInstance {
    /// Validates that `clusters` partition the vertex set into nonempty parts.
    pub fn new(graph: Graph, clusters: Vec<VertexSet>) -> Result<Self> {
        let n = graph.n();
        let mut owner = vec![usize::MAX; n];
        for (p, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidInput(format!("cluster {} is empty", p + 1)));
            }
            for v in cluster {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "vertex {} is in clusters {} and {}",
                        v + 1,
                        owner[v] + 1,
                        p + 1
                    )));
                }
                owner[v] = p;
            }
        }
        if let Some(v) = owner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidInput(format!("vertex {} unassigned", v + 1)));
        }
        Ok(SelColInstance { graph, clusters })
    }

    /// Every vertex in its own cluster: plain graph coloring.
    pub fn singletons(graph: Graph) -> Self {
        let clusters = (0..graph.n()).map(|v| VertexSet::new([v])).collect();
        SelColInstance { graph, clusters }
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster index of every vertex.
    pub fn cluster_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.graph.n()];
        for (p, c) in self.clusters.iter().enumerate() {
            for v in c {
                owner[v] = p;
            }
        }
        owner
    }

    /// Number of distinct selections, saturating at `u128::MAX`.
    pub fn selection_count(&self) -> u128 {
        self.clusters
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
            .unwrap_or(u128::MAX)
    }

    /// Eight-vertex example: the 3-cube with four two-vertex clusters.
    /// Written with 0-based ids; the drawing labels vertices 1..8.
    pub fn cube_example() -> Self {
        let edges = [
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 1),
            (1, 5),
            (5, 6),
            (6, 2),
            (6, 7),
            (7, 3),
            (7, 8),
            (8, 4),
            (5, 8),
        ]
        .map(|(u, v)| (u - 1, v - 1));
        let graph = Graph::from_edges(8, &edges).expect("static edges");
        let clusters = [[1, 5], [2, 6], [4, 8], [3, 7]]
            .iter()
            .map(|c| VertexSet::new(c.iter().map(|v| v - 1)))
            .collect();
        SelColInstance::new(graph, clusters).expect("static partition")
    }

    /// Four isolated vertices with clusters {1,2}, {3}, {4}, used to show the
    /// clique cut is strictly stronger than the coloring cut.
    pub fn strictness_example() -> Self {
        let clusters = vec![VertexSet::new([0, 1]), VertexSet::new([2]), VertexSet::new([3])];
        SelColInstance::new(Graph::empty(4), clusters).expect("static partition")
    }
}

/// One chosen vertex per cluster, indexed by cluster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Selection {
    pub chosen: Vec<usize>,
}

impl Selection {
    pub fn new(inst: &SelColInstance, chosen: Vec<usize>) -> Result<Self> {
        if chosen.len() != inst.num_clusters() {
            return Err(Error::InvalidInput(format!(
                "selection has {} vertices for {} clusters",
                chosen.len(),
                inst.num_clusters()
            )));
        }
        for (p, (&v, c)) in chosen.iter().zip(&inst.clusters).enumerate() {
            if !c.contains(v) {
                return Err(Error::InvalidInput(format!(
                    "vertex {} is not in cluster {}",
                    v + 1,
                    p + 1
                )));
            }
        }
        Ok(Selection { chosen })
    }

    /// Reads a selection off a 0/1 vector over vertices.
    pub fn from_indicator(inst: &SelColInstance, x: &[f64]) -> Result<Self> {
        let mut chosen = Vec::with_capacity(inst.num_clusters());
        for (p, c) in inst.clusters.iter().enumerate() {
            let picked: Vec<usize> = c.iter().filter(|&v| x[v] > 0.5).collect();
            match picked.as_slice() {
                [v] => chosen.push(*v),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "cluster {} has {} selected vertices",
                        p + 1,
                        picked.len()
                    )))
                }
            }
        }
        Ok(Selection { chosen })
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::new(self.chosen.iter().copied())
    }

    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for &v in &self.chosen {
            x[v] = 1.0;
        }
        x
    }

    /// Enumerates every selection in odometer order.
    pub fn enumerate(inst: &SelColInstance) -> impl Iterator<Item = Selection> + '_ {
        let sizes: Vec<usize> = inst.clusters.iter().map(|c| c.len()).collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let sel = Selection {
                chosen: idx
                    .iter()
                    .zip(&inst.clusters)
                    .map(|(&i, c)| c.as_slice()[i])
                    .collect(),
            };
            done = true;
            for p in (0..idx.len()).rev() {
                idx[p] += 1;
                if idx[p] < sizes[p] {
                    done = false;
                    break;
                }
                idx[p] = 0;
            }
            Some(sel)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_example_shape() {
        let inst = SelColInstance::cube_example();
        assert_eq!(inst.graph.n(), 8);
        assert_eq!(inst.graph.m(), 12);
        assert_eq!(inst.num_clusters(), 4);
        assert_eq!(inst.selection_count(), 16);
        // The optimal selection {1,6,3,8} is stable.
        let sel = Selection::new(&inst, vec![0, 5, 7, 2]).unwrap();
        assert!(inst.graph.is_stable(sel.vertices().as_slice()));
    }

    #[test]
    fn rejects_overlap_and_gaps() {
        let g = Graph::empty(3);
        let overlap = SelColInstance::new(g.clone(), vec![VertexSet::new([0, 1]), VertexSet::new([1, 2])]);
        assert!(overlap.is_err());
        let gap = SelColInstance::new(g.clone(), vec![VertexSet::new([0, 1])]).unwrap_err();
        assert_eq!(gap.to_string(), "invalid input: vertex 3 unassigned");
        let empty = SelColInstance::new(g, vec![VertexSet::new([0, 1, 2]), VertexSet::empty()]);
        assert!(empty.is_err());
    }

    #[test]
    fn enumerate_covers_product() {
        let inst = SelColInstance::cube_example();
        let all: Vec<_> = Selection::enumerate(&inst).collect();
        assert_eq!(all.len(), 16);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 16);
        for s in &all {
            assert!(Selection::new(&inst, s.chosen.clone()).is_ok());
        }
    }

    #[test]
    fn indicator_roundtrip() {
        let inst = SelColInstance::strictness_example();
        let sel = Selection::new(&inst, vec![1, 2, 3]).unwrap();
        let x = sel.indicator(4);
        assert_eq!(x, vec![0.0, 1.0, 1.0, 1.0]);
        assert_eq!(Selection::from_indicator(&inst, &x).unwrap(), sel);
        assert!(Selection::from_indicator(&inst, &[1.0, 1.0, 1.0, 1.0]).is_err());
    }
}
