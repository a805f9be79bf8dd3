//! Immutable weighted graphs over dense `0..n` node ids.
//!
//! Adjacency is stored in compressed-row form, once for outgoing and once for
//! incoming edges. For undirected graphs both views are identical. Every
//! neighbor list is sorted by node id, which fixes the summation order of all
//! solvers built on top.

mod io;
pub(crate) mod paths;

pub use io::{load_edge_list, read_edge_list, write_edge_list};
pub use paths::{
    extended_neighborhood, shortest_paths, shortest_paths_within, DistanceEntry, DistanceMatrix,
    DistanceRow, ExtendedNeighborhood,
};

use std::collections::HashSet;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    Out,
    In,
    Undirected,
}

/// Direction in which shortest paths are followed from a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Distances `source -> v` along edge direction.
    Forward,
    /// Distances `v -> source`, i.e. shortest paths in the reversed graph.
    Reverse,
}

#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
}

impl Csr {
    fn build(node_count: usize, arcs: &mut [(NodeId, NodeId, f64)]) -> Self {
        arcs.sort_by_key(|a| (a.0, a.1));
        let mut offsets = vec![0usize; node_count + 1];
        for &(from, _, _) in arcs.iter() {
            offsets[from + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: arcs.iter().map(|a| a.1).collect(),
            weights: arcs.iter().map(|a| a.2).collect(),
        }
    }

    #[inline]
    fn range(&self, v: NodeId) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    directed: bool,
    weighted: bool,
    edges: Vec<Edge>,
    out: Csr,
    // `None` for undirected graphs, where incoming == outgoing.
    inc: Option<Csr>,
}

impl Graph {
    /// Builds a simple graph, rejecting self-loops, duplicate edges,
    /// out-of-range ids and non-positive or non-finite weights.
    pub fn from_edges(
        node_count: usize,
        directed: bool,
        weighted: bool,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            for node in [e.u, e.v] {
                if node >= node_count {
                    return Err(Error::InvalidNode { node, node_count });
                }
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop on node {}", e.u)));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.u, e.v, e.weight
                )));
            }
            let key = if directed { (e.u, e.v) } else { (e.u.min(e.v), e.u.max(e.v)) };
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }

        let mut arcs: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(edges.len() * 2);
        for e in &edges {
            arcs.push((e.u, e.v, e.weight));
            if !directed {
                arcs.push((e.v, e.u, e.weight));
            }
        }
        let out = Csr::build(node_count, &mut arcs);
        let inc = if directed {
            let mut rev: Vec<_> = edges.iter().map(|e| (e.v, e.u, e.weight)).collect();
            Some(Csr::build(node_count, &mut rev))
        } else {
            None
        };

        Ok(Graph {
            node_count,
            directed,
            weighted,
            edges,
            out,
            inc,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.node_count {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node: v,
                node_count: self.node_count,
            })
        }
    }

    pub fn degree(&self, v: NodeId, mode: DegreeMode) -> Result<usize> {
        self.check_node(v)?;
        match mode {
            DegreeMode::Undirected if self.directed => Err(Error::param(
                "undirected degree requested on a directed graph",
            )),
            DegreeMode::Out | DegreeMode::Undirected => Ok(self.out_degree(v)),
            DegreeMode::In => Ok(self.in_degree(v)),
        }
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out.range(v).len()
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.incoming().range(v).len()
    }

    /// Out-neighbors of `v`, ascending. Same as [`Graph::in_neighbors`] when undirected.
    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out.targets[self.out.range(v)]
    }

    #[inline]
    pub fn out_weights(&self, v: NodeId) -> &[f64] {
        &self.out.weights[self.out.range(v)]
    }

    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let inc = self.incoming();
        &inc.targets[inc.range(v)]
    }

    #[inline]
    pub fn in_weights(&self, v: NodeId) -> &[f64] {
        let inc = self.incoming();
        &inc.weights[inc.range(v)]
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.out_neighbors(v)
            .iter()
            .copied()
            .zip(self.out_weights(v).iter().copied())
    }

    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.in_neighbors(v)
            .iter()
            .copied()
            .zip(self.in_weights(v).iter().copied())
    }

    pub(crate) fn neighbors_in(&self, v: NodeId, orientation: Orientation) -> (&[NodeId], &[f64]) {
        match orientation {
            Orientation::Forward => (self.out_neighbors(v), self.out_weights(v)),
            Orientation::Reverse => (self.in_neighbors(v), self.in_weights(v)),
        }
    }

    /// Weight of the edge `u -> v` (or `{u, v}` when undirected).
    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let targets = self.out_neighbors(u);
        targets
            .binary_search(&v)
            .ok()
            .map(|i| self.out_weights(u)[i])
    }

    /// Stable 64-bit FNV-1a digest of the structure, used to tag results.
    pub fn fingerprint(&self) -> u64 {
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.node_count as u64);
        feed(self.directed as u64);
        for v in 0..self.node_count {
            for (u, w) in self.out_edges(v) {
                feed(v as u64);
                feed(u as u64);
                feed(w.to_bits());
            }
        }
        h
    }

    #[inline]
    fn incoming(&self) -> &Csr {
        self.inc.as_ref().unwrap_or(&self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: usize, v: usize) -> Edge {
        Edge { u, v, weight: 1.0 }
    }

    #[test]
    fn path_degrees() {
        let g = Graph::from_edges(3, false, false, vec![e(0, 1), e(1, 2)]).unwrap();
        assert_eq!(g.degree(1, DegreeMode::Undirected).unwrap(), 2);
        assert_eq!(g.degree(0, DegreeMode::Undirected).unwrap(), 1);
        assert_eq!(g.out_neighbors(1), &[0, 2]);
        assert_eq!(g.in_neighbors(1), &[0, 2]);
    }

    #[test]
    fn directed_degrees() {
        let g = Graph::from_edges(2, true, false, vec![e(0, 1)]).unwrap();
        assert_eq!(g.degree(1, DegreeMode::In).unwrap(), 1);
        assert_eq!(g.degree(1, DegreeMode::Out).unwrap(), 0);
        assert!(g.degree(1, DegreeMode::Undirected).is_err());
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(1, 0), None);
    }

    #[test]
    fn isolated_node_has_no_degree() {
        let g = Graph::from_edges(4, false, false, vec![e(0, 1)]).unwrap();
        assert_eq!(g.degree(3, DegreeMode::Undirected).unwrap(), 0);
        assert!(g.degree(4, DegreeMode::Undirected).is_err());
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(Graph::from_edges(2, false, false, vec![e(0, 0)]).is_err());
        assert!(Graph::from_edges(2, false, false, vec![e(0, 1), e(1, 0)]).is_err());
        assert!(Graph::from_edges(2, true, false, vec![e(0, 1), e(1, 0)]).is_ok());
        assert!(Graph::from_edges(2, false, false, vec![e(0, 2)]).is_err());
        let bad = Edge { u: 0, v: 1, weight: 0.0 };
        assert!(Graph::from_edges(2, false, true, vec![bad]).is_err());
        let nan = Edge { u: 0, v: 1, weight: f64::NAN };
        assert!(Graph::from_edges(2, false, true, vec![nan]).is_err());
    }

    #[test]
    fn degree_sums() {
        let edges = vec![e(0, 1), e(1, 2), e(2, 0), e(2, 3)];
        let g = Graph::from_edges(5, false, false, edges.clone()).unwrap();
        let total: usize = (0..5).map(|v| g.out_degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());

        let d = Graph::from_edges(5, true, false, edges).unwrap();
        let outs: usize = (0..5).map(|v| d.out_degree(v)).sum();
        let ins: usize = (0..5).map(|v| d.in_degree(v)).sum();
        assert_eq!(outs, d.edge_count());
        assert_eq!(ins, d.edge_count());
    }

    #[test]
    fn fingerprint_ignores_edge_order() {
        let a = Graph::from_edges(3, false, false, vec![e(0, 1), e(1, 2)]).unwrap();
        let b = Graph::from_edges(3, false, false, vec![e(2, 1), e(1, 0)]).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
