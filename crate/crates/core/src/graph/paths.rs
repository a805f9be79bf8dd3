//! Single-source shortest paths (binary-heap Dijkstra) and the distance
//! tables derived from them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{Graph, NodeId, Orientation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEntry {
    pub node: NodeId,
    pub dist: f64,
}

/// Distances from one source to every other node, ascending by distance and
/// then by node id. Unreachable nodes sit at the end with `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub source: NodeId,
    pub entries: Vec<DistanceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable scratch space so that repeated runs do not reallocate `O(n)`
/// buffers.
pub(crate) struct Dijkstra {
    dist: Vec<f64>,
    done: Vec<bool>,
    touched: Vec<NodeId>,
    heap: BinaryHeap<HeapItem>,
    settled: Vec<(NodeId, f64)>,
}

impl Dijkstra {
    pub(crate) fn new(node_count: usize) -> Self {
        Dijkstra {
            dist: vec![f64::INFINITY; node_count],
            done: vec![false; node_count],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
            settled: Vec::new(),
        }
    }

    /// Settles every node within `limit` of `source` and returns them in
    /// settling order (nondecreasing distance), source first.
    pub(crate) fn run(
        &mut self,
        g: &Graph,
        source: NodeId,
        orientation: Orientation,
        limit: f64,
    ) -> &[(NodeId, f64)] {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.done[v] = false;
        }
        self.touched.clear();
        self.heap.clear();
        self.settled.clear();

        self.dist[source] = 0.0;
        self.touched.push(source);
        self.heap.push(HeapItem { dist: 0.0, node: source });

        while let Some(HeapItem { dist, node }) = self.heap.pop() {
            if self.done[node] || dist > self.dist[node] {
                continue;
            }
            self.done[node] = true;
            self.settled.push((node, dist));
            let (targets, weights) = g.neighbors_in(node, orientation);
            for (&next, &w) in targets.iter().zip(weights) {
                if self.done[next] {
                    continue;
                }
                let cand = dist + w;
                if cand < self.dist[next] && cand <= limit {
                    if self.dist[next] == f64::INFINITY {
                        self.touched.push(next);
                    }
                    self.dist[next] = cand;
                    self.heap.push(HeapItem { dist: cand, node: next });
                }
            }
        }
        &self.settled
    }
}

pub fn shortest_paths(g: &Graph, source: NodeId, orientation: Orientation) -> Result<DistanceRow> {
    g.check_node(source)?;
    let mut dijkstra = Dijkstra::new(g.node_count());
    Ok(row_from(&mut dijkstra, g, source, orientation))
}

/// Nodes within `limit` of `source` (source included, at distance 0), in
/// settling order.
pub fn shortest_paths_within(
    g: &Graph,
    source: NodeId,
    orientation: Orientation,
    limit: f64,
) -> Result<Vec<(NodeId, f64)>> {
    g.check_node(source)?;
    let mut dijkstra = Dijkstra::new(g.node_count());
    Ok(dijkstra.run(g, source, orientation, limit).to_vec())
}

pub(crate) fn row_from(
    dijkstra: &mut Dijkstra,
    g: &Graph,
    source: NodeId,
    orientation: Orientation,
) -> DistanceRow {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    for &(v, d) in dijkstra.run(g, source, orientation, f64::INFINITY) {
        dist[v] = d;
    }
    let mut entries: Vec<DistanceEntry> = dist
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != source)
        .map(|(node, &dist)| DistanceEntry { node, dist })
        .collect();
    entries.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.node.cmp(&b.node)));
    DistanceRow { source, entries }
}

/// Dense `n x n` table with `get(u, v)` = length of the shortest path
/// `u -> v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// One forward Dijkstra per node, run in parallel.
    pub fn all_pairs(g: &Graph) -> Self {
        let n = g.node_count();
        let mut data = vec![f64::INFINITY; n * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each_init(
                || Dijkstra::new(n),
                |dijkstra, (source, row)| {
                    for &(v, d) in dijkstra.run(g, source, Orientation::Forward, f64::INFINITY) {
                        row[v] = d;
                    }
                },
            );
        }
        DistanceMatrix { n, data }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, from: NodeId, to: NodeId) -> f64 {
        self.data[from * self.n + to]
    }

    #[inline]
    pub fn row(&self, from: NodeId) -> &[f64] {
        &self.data[from * self.n..(from + 1) * self.n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedNeighborhood {
    /// Nodes reachable from `v` within the cutoff, ascending, `v` excluded.
    pub members: Vec<NodeId>,
    /// Number of nodes that reach `v` within the cutoff. Equals
    /// `members.len()` on undirected graphs.
    pub ext_degree: usize,
}

pub fn extended_neighborhood(g: &Graph, v: NodeId, d_cutoff: f64) -> Result<ExtendedNeighborhood> {
    g.check_node(v)?;
    if !(d_cutoff > 0.0) {
        return Err(Error::param(format!("distance cutoff must be positive, got {d_cutoff}")));
    }
    let mut dijkstra = Dijkstra::new(g.node_count());
    let mut members: Vec<NodeId> = dijkstra
        .run(g, v, Orientation::Forward, d_cutoff)
        .iter()
        .map(|&(u, _)| u)
        .filter(|&u| u != v)
        .collect();
    members.sort_unstable();
    let ext_degree = if g.is_directed() {
        dijkstra.run(g, v, Orientation::Reverse, d_cutoff).len() - 1
    } else {
        members.len()
    };
    Ok(ExtendedNeighborhood { members, ext_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn weighted_path_distances() {
        let g = load_edge_list("0 1 1.0\n1 2 1.0", false, true).unwrap();
        let row = shortest_paths(&g, 0, Orientation::Forward).unwrap();
        assert_eq!(
            row.entries,
            vec![
                DistanceEntry { node: 1, dist: 1.0 },
                DistanceEntry { node: 2, dist: 2.0 }
            ]
        );
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = load_edge_list("nodes 3\n0 1", false, false).unwrap();
        let row = shortest_paths(&g, 0, Orientation::Forward).unwrap();
        assert_eq!(row.entries[1], DistanceEntry { node: 2, dist: f64::INFINITY });
        assert!(shortest_paths(&g, 3, Orientation::Forward).is_err());
    }

    #[test]
    fn ties_ordered_by_node_id() {
        let g = load_edge_list("0 3\n0 1\n0 2", false, false).unwrap();
        let row = shortest_paths(&g, 0, Orientation::Forward).unwrap();
        let nodes: Vec<_> = row.entries.iter().map(|e| e.node).collect();
        assert_eq!(nodes, vec![1, 2, 3]);
    }

    #[test]
    fn reverse_orientation() {
        let g = load_edge_list("0 1 2.0\n1 2 3.0", true, true).unwrap();
        let fwd = shortest_paths(&g, 2, Orientation::Forward).unwrap();
        assert!(fwd.entries.iter().all(|e| e.dist.is_infinite()));
        let rev = shortest_paths(&g, 2, Orientation::Reverse).unwrap();
        assert_eq!(rev.entries[0], DistanceEntry { node: 1, dist: 3.0 });
        assert_eq!(rev.entries[1], DistanceEntry { node: 0, dist: 5.0 });
    }

    #[test]
    fn extended_neighborhood_on_path() {
        let g = load_edge_list("0 1 1.0\n1 2 1.0", false, true).unwrap();
        let nb = extended_neighborhood(&g, 1, 1.5).unwrap();
        assert_eq!(nb.members, vec![0, 2]);
        assert_eq!(nb.ext_degree, 2);
        let nb = extended_neighborhood(&g, 0, 0.5).unwrap();
        assert!(nb.members.is_empty());
        assert_eq!(nb.ext_degree, 0);
        assert!(extended_neighborhood(&g, 0, 0.0).is_err());
    }

    #[test]
    fn directed_extended_degree_counts_incoming() {
        // 0 -> 1 -> 2, and 3 -> 1
        let g = load_edge_list("0 1 1\n1 2 1\n3 1 1", true, true).unwrap();
        let nb = extended_neighborhood(&g, 1, 1.0).unwrap();
        assert_eq!(nb.members, vec![2]);
        assert_eq!(nb.ext_degree, 2);
    }

    #[test]
    fn bounded_run_matches_full_row() {
        let g = load_edge_list("0 1 0.4\n1 2 0.4\n2 3 0.4\n0 3 2.0", false, true).unwrap();
        let within = shortest_paths_within(&g, 0, Orientation::Forward, 0.8).unwrap();
        let mut nodes: Vec<_> = within.iter().map(|&(v, _)| v).collect();
        nodes.sort_unstable();
        assert_eq!(nodes, vec![0, 1, 2]);
        let m = DistanceMatrix::all_pairs(&g);
        for &(v, d) in &within {
            assert_eq!(m.get(0, v), d);
        }
    }
}
