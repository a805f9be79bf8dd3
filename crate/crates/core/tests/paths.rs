mod common;

use netshap::graph::{extended_neighborhood, shortest_paths, shortest_paths_within, DistanceMatrix, Orientation};
use proptest::prelude::*;

use common::{any_graph, floyd_warshall, graph};

proptest! {
    #[test]
    fn dijkstra_matches_relaxation_oracle(g in any_graph(8)) {
        let fw = floyd_warshall(&g);
        let all = DistanceMatrix::all_pairs(&g);
        for s in 0..g.node_count() {
            let row = shortest_paths(&g, s, Orientation::Forward).unwrap();
            prop_assert_eq!(row.entries.len(), g.node_count() - 1);
            for e in &row.entries {
                prop_assert_eq!(e.dist, fw[s][e.node]);
                prop_assert_eq!(all.get(s, e.node), fw[s][e.node]);
            }
            let back = shortest_paths(&g, s, Orientation::Reverse).unwrap();
            for e in &back.entries {
                prop_assert_eq!(e.dist, fw[e.node][s]);
            }
            for w in row.entries.windows(2) {
                prop_assert!((w[0].dist, w[0].node) < (w[1].dist, w[1].node));
            }
        }
    }

    #[test]
    fn undirected_distances_are_symmetric(g in graph(8, false)) {
        let d = DistanceMatrix::all_pairs(&g);
        for u in 0..g.node_count() {
            prop_assert_eq!(d.get(u, u), 0.0);
            for v in 0..g.node_count() {
                prop_assert_eq!(d.get(u, v), d.get(v, u));
            }
        }
    }

    #[test]
    fn extended_neighborhood_is_a_distance_filter(g in any_graph(8), cut in 1u32..24) {
        let cut = cut as f64 / 8.0;
        let fw = floyd_warshall(&g);
        let n = g.node_count();
        for v in 0..n {
            let nb = extended_neighborhood(&g, v, cut).unwrap();
            let expect: Vec<usize> = (0..n).filter(|&u| u != v && fw[v][u] <= cut).collect();
            prop_assert_eq!(&nb.members, &expect);
            let into = (0..n).filter(|&u| u != v && fw[u][v] <= cut).count();
            prop_assert_eq!(nb.ext_degree, into);
            let within = shortest_paths_within(&g, v, Orientation::Forward, cut).unwrap();
            prop_assert_eq!(within.len(), expect.len() + 1);
        }
    }

    #[test]
    fn extended_degree_grows_with_cutoff(g in any_graph(8), a in 1u32..16, b in 1u32..16) {
        let (lo, hi) = (a.min(b) as f64 / 8.0, a.max(b) as f64 / 8.0);
        for v in 0..g.node_count() {
            let small = extended_neighborhood(&g, v, lo).unwrap();
            let large = extended_neighborhood(&g, v, hi).unwrap();
            prop_assert!(small.ext_degree <= large.ext_degree);
            prop_assert!(small.members.iter().all(|u| large.members.contains(u)));
        }
    }

    #[test]
    fn degree_sums(g in any_graph(10)) {
        let outs: usize = (0..g.node_count()).map(|v| g.out_degree(v)).sum();
        let ins: usize = (0..g.node_count()).map(|v| g.in_degree(v)).sum();
        let per_edge = if g.is_directed() { 1 } else { 2 };
        prop_assert_eq!(outs, per_edge * g.edge_count());
        prop_assert_eq!(ins, outs);
    }
}
