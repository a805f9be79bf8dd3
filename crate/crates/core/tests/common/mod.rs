#![allow(dead_code)]

use netshap::graph::{Edge, Graph};
use proptest::prelude::*;

/// Random simple graph on `1..=max_n` nodes. Weights are multiples of 1/8
/// so that every path length is exact in floating point.
pub fn graph(max_n: usize, directed: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = if directed { n * (n - 1) } else { n * (n - 1) / 2 };
        proptest::collection::vec((any::<bool>(), 1u32..=16), pairs).prop_map(move |picks| {
            let mut edges = Vec::new();
            let mut it = picks.into_iter();
            for u in 0..n {
                for v in 0..n {
                    if u == v || (!directed && v < u) {
                        continue;
                    }
                    let (keep, w) = it.next().unwrap();
                    if keep {
                        edges.push(Edge {
                            u,
                            v,
                            weight: w as f64 / 8.0,
                        });
                    }
                }
            }
            Graph::from_edges(n, directed, true, edges).unwrap()
        })
    })
}

pub fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    prop_oneof![graph(max_n, false), graph(max_n, true)]
}

/// All-pairs distances by repeated relaxation over every node triple.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
        for (u, w) in g.out_edges(v) {
            row[u] = row[u].min(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol, "node {i}: {x} vs {y}\n{a:?}\n{b:?}");
    }
}
