//! Closed-form Shapley values for games g1 to g4.
//!
//! Every solver sums, for each node `v`, the probability (or expected value)
//! that `v` is the node that brings each target `u` into the coalition's
//! sphere of influence in a uniformly random join order. For g1 to g3 that
//! probability is `1 / (1 + |blockers(u)|)`, the chance that `v` precedes
//! every other node able to cover `u`. g4 needs the sorted distances towards
//! each target and a backward cumulative sum.
//!
//! Directed graphs: a node covers what its out-edges reach, so the
//! "degree" of a target is its in-degree and distances are measured from the
//! contributing node towards the target.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::{DecayFn, GameSpec};
use crate::graph::paths::{row_from, Dijkstra};
use crate::graph::{Graph, NodeId, Orientation};
use crate::params::NodeParam;
use crate::shapley::{Method, ShapleyVector};

const DECAY_CHUNK: usize = 64;

fn vector(g: &Graph, game: GameSpec, scores: Vec<f64>) -> ShapleyVector {
    ShapleyVector {
        scores,
        game,
        graph_id: g.fingerprint(),
        method: Method::Exact,
    }
}

/// g1, `O(V + E)`.
pub fn fringe_shapley(g: &Graph) -> ShapleyVector {
    let share: Vec<f64> = (0..g.node_count())
        .map(|v| 1.0 / (1.0 + g.in_degree(v) as f64))
        .collect();
    let scores = (0..g.node_count())
        .map(|v| {
            let mut s = share[v];
            for &u in g.out_neighbors(v) {
                s += share[u];
            }
            s
        })
        .collect();
    vector(g, GameSpec::Fringe, scores)
}

/// g2 with a uniform or per-node threshold, `O(V + E)`.
pub fn k_threshold_shapley(g: &Graph, k: &NodeParam<u32>) -> Result<ShapleyVector> {
    let spec = GameSpec::KThreshold { k: k.clone() };
    let ks = match spec.resolve(g)? {
        crate::games::Resolved::K(ks) => ks,
        _ => unreachable!(),
    };
    let n = g.node_count();
    // Probability that v pushes neighbor u over its threshold.
    let through: Vec<f64> = (0..n)
        .map(|u| {
            let deg = g.in_degree(u) as i64;
            if deg == 0 {
                return 0.0;
            }
            let num = deg - ks[u] as i64 + 1;
            if num <= 0 {
                0.0
            } else {
                num as f64 / (deg as f64 * (1.0 + deg as f64))
            }
        })
        .collect();
    let scores = (0..n)
        .map(|v| {
            let mut s = (ks[v] as f64 / (1.0 + g.in_degree(v) as f64)).min(1.0);
            for &u in g.out_neighbors(v) {
                s += through[u];
            }
            s
        })
        .collect();
    Ok(vector(g, spec, scores))
}

/// Extended neighborhoods under per-node cutoffs: `out[v]` lists, ascending,
/// every `u != v` with `dist(v -> u) <= cutoff(u)`; `degree[u]` counts the
/// nodes `w != u` with `dist(w -> u) <= cutoff(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ExtendedLists {
    pub out: Vec<Vec<NodeId>>,
    pub degree: Vec<usize>,
}

pub(crate) fn extended_lists(g: &Graph, cutoffs: &[f64]) -> ExtendedLists {
    let n = g.node_count();
    // Reverse search from each u finds exactly the nodes that cover u.
    let covering: Vec<Vec<NodeId>> = (0..n)
        .into_par_iter()
        .map_init(
            || Dijkstra::new(n),
            |dijkstra, u| {
                dijkstra
                    .run(g, u, Orientation::Reverse, cutoffs[u])
                    .iter()
                    .map(|&(w, _)| w)
                    .filter(|&w| w != u)
                    .collect()
            },
        )
        .collect();
    let mut out = vec![Vec::new(); n];
    for (u, ws) in covering.iter().enumerate() {
        for &w in ws {
            out[w].push(u);
        }
    }
    ExtendedLists {
        out,
        degree: covering.iter().map(Vec::len).collect(),
    }
}

/// g3 with a uniform or per-node distance cutoff,
/// `O(V E + V^2 log V)` in the worst case.
pub fn distance_cutoff_shapley(g: &Graph, cutoff: &NodeParam<f64>) -> Result<ShapleyVector> {
    let spec = GameSpec::DistanceCutoff { cutoff: cutoff.clone() };
    let cutoffs = match spec.resolve(g)? {
        crate::games::Resolved::Cutoff(c) => c,
        _ => unreachable!(),
    };
    let ext = extended_lists(g, &cutoffs);
    let share: Vec<f64> = ext.degree.iter().map(|&d| 1.0 / (1.0 + d as f64)).collect();
    let scores = (0..g.node_count())
        .map(|v| {
            let mut s = share[v];
            for &u in &ext.out[v] {
                s += share[u];
            }
            s
        })
        .collect();
    Ok(vector(g, spec, scores))
}

/// g4, `O(V E + V^2 log V)`.
///
/// For each target `t` the other nodes are sorted by their distance to `t`.
/// Walking that list backwards accumulates
/// `sum_{k > idx} f(d_k) / (k (k + 1))`; the node at 1-based position `idx`
/// receives `f(d_idx) / (idx + 1)` minus that tail, and nodes tied at the same
/// distance all receive the value of the last of them. `t` itself receives
/// `f(0)` minus the full sum.
pub fn distance_decay_shapley(g: &Graph, decay: &DecayFn) -> Result<ShapleyVector> {
    let f0 = decay.eval(0.0);
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::param(format!("decay must have a positive finite f(0), got {f0}")));
    }
    let n = g.node_count();
    let targets: Vec<NodeId> = (0..n).collect();
    // Fixed chunking keeps the floating-point reduction order independent of
    // the thread count.
    let partials: Vec<Vec<f64>> = targets
        .par_chunks(DECAY_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut dijkstra = Dijkstra::new(n);
            for &t in chunk {
                let row = row_from(&mut dijkstra, g, t, Orientation::Reverse);
                let mut tail = 0.0;
                let mut prev: Option<(f64, f64)> = None;
                for (pos, entry) in row.entries.iter().enumerate().rev() {
                    let idx = (pos + 1) as f64;
                    let fd = decay.eval(entry.dist);
                    let value = match prev {
                        Some((d, value)) if d == entry.dist => value,
                        _ => fd / (1.0 + idx) - tail,
                    };
                    acc[entry.node] += value;
                    tail += fd / (idx * (1.0 + idx));
                    prev = Some((entry.dist, value));
                }
                acc[t] += f0 - tail;
            }
            acc
        })
        .collect();
    let mut scores = vec![0.0; n];
    for part in &partials {
        for (s, p) in scores.iter_mut().zip(part) {
            *s += p;
        }
    }
    Ok(vector(g, GameSpec::DistanceDecay { decay: decay.clone() }, scores))
}

/// Dispatches to the solver for `spec`. g5 uses the Gaussian approximation
/// with the default brute-force degree limit.
pub fn solve(g: &Graph, spec: &GameSpec) -> Result<ShapleyVector> {
    match spec {
        GameSpec::Fringe => Ok(fringe_shapley(g)),
        GameSpec::KThreshold { k } => k_threshold_shapley(g, k),
        GameSpec::DistanceCutoff { cutoff } => distance_cutoff_shapley(g, cutoff),
        GameSpec::DistanceDecay { decay } => distance_decay_shapley(g, decay),
        GameSpec::WeightThreshold { cutoff } => {
            crate::approx::weight_threshold_shapley(g, cutoff, crate::approx::DEFAULT_BRUTE_FORCE_DEGREE_LIMIT)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    fn path3() -> Graph {
        load_edge_list("0 1\n1 2", false, false).unwrap()
    }

    fn star4() -> Graph {
        load_edge_list("0 1\n0 2\n0 3", false, false).unwrap()
    }

    #[test]
    fn fringe_examples() {
        close(&fringe_shapley(&path3()).scores, &[5.0 / 6.0, 4.0 / 3.0, 5.0 / 6.0], 1e-15);
        let k3 = load_edge_list("0 1\n1 2\n0 2", false, false).unwrap();
        close(&fringe_shapley(&k3).scores, &[1.0; 3], 1e-15);
        let s = fringe_shapley(&star4());
        close(&s.scores, &[1.75, 0.75, 0.75, 0.75], 1e-15);
        assert!((s.sum() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn k_threshold_examples() {
        let s = k_threshold_shapley(&star4(), &NodeParam::Uniform(2)).unwrap();
        close(&s.scores, &[0.5, 7.0 / 6.0, 7.0 / 6.0, 7.0 / 6.0], 1e-15);
        let g = load_edge_list("nodes 3\n0 1", false, false).unwrap();
        let s = k_threshold_shapley(&g, &NodeParam::Uniform(1)).unwrap();
        assert_eq!(s.scores[2], 1.0);
    }

    #[test]
    fn k_one_is_fringe_bitwise() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0\n0 2\n4 0", false, false).unwrap();
        let a = k_threshold_shapley(&g, &NodeParam::Uniform(1)).unwrap();
        assert_eq!(a.scores, fringe_shapley(&g).scores);
    }

    #[test]
    fn per_node_k_out_of_range() {
        let r = k_threshold_shapley(&star4(), &NodeParam::PerNode(vec![5, 1, 1, 1]));
        assert!(r.is_err());
        assert!(k_threshold_shapley(&star4(), &NodeParam::PerNode(vec![4, 2, 2, 2])).is_ok());
    }

    #[test]
    fn cutoff_examples() {
        let g = load_edge_list("0 1 1.0\n1 2 1.0", false, true).unwrap();
        let s = distance_cutoff_shapley(&g, &NodeParam::Uniform(1.5)).unwrap();
        close(&s.scores, &[5.0 / 6.0, 4.0 / 3.0, 5.0 / 6.0], 1e-15);
        let s = distance_cutoff_shapley(&g, &NodeParam::Uniform(0.5)).unwrap();
        assert_eq!(s.scores, vec![1.0; 3]);
        assert!(distance_cutoff_shapley(&g, &NodeParam::PerNode(vec![1.0])).is_err());
        assert!(distance_cutoff_shapley(&g, &NodeParam::Uniform(-1.0)).is_err());
    }

    #[test]
    fn decay_examples() {
        let k2 = load_edge_list("0 1", false, false).unwrap();
        let s = distance_decay_shapley(&k2, &DecayFn::InvLinear).unwrap();
        close(&s.scores, &[1.0, 1.0], 1e-15);
        let s = distance_decay_shapley(&path3(), &DecayFn::InvLinear).unwrap();
        close(&s.scores, &[35.0 / 36.0, 19.0 / 18.0, 35.0 / 36.0], 1e-15);
    }

    #[test]
    fn decay_step_matches_cutoff() {
        let g = load_edge_list("0 1 0.5\n1 2 0.7\n2 3 0.2\n0 3 1.5\n3 4 0.9", false, true).unwrap();
        let a = distance_decay_shapley(&g, &DecayFn::step(1.0).unwrap()).unwrap();
        let b = distance_cutoff_shapley(&g, &NodeParam::Uniform(1.0)).unwrap();
        close(&a.scores, &b.scores, 1e-12);
    }

    #[test]
    fn directed_fringe_uses_in_degree() {
        // 0 -> 1 -> 2
        let g = load_edge_list("0 1\n1 2", true, false).unwrap();
        let s = fringe_shapley(&g);
        close(&s.scores, &[1.5, 1.0, 0.5], 1e-15);
    }
}
