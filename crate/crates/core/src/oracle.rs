//! Brute-force Shapley values by enumeration of every coalition.
//!
//! Deliberately naive: no memoization, no pruning. It exists to check the
//! fast solvers, so it only depends on [`Game::value`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::{Coalition, Game, GameSpec};
use crate::graph::Graph;
use crate::shapley::{Method, ShapleyVector};

pub const DEFAULT_NODE_LIMIT: usize = 16;
/// Hard ceiling for `node_limit`; 20 nodes already means about 10^7
/// coalition evaluations per node.
pub const MAX_NODE_LIMIT: usize = 20;

/// `|C|! (n - |C| - 1)! / n!` for every coalition size `|C| = 0..n`.
fn coalition_weights(n: usize) -> Vec<f64> {
    // 1 / (n * binom(n - 1, s)), with the binomial built incrementally so
    // nothing overflows for n <= 20.
    let mut binom = 1.0f64;
    (0..n)
        .map(|s| {
            if s > 0 {
                binom = binom * (n - s) as f64 / s as f64;
            }
            1.0 / (n as f64 * binom)
        })
        .collect()
}

/// Shapley values from the subset form of the definition. Refuses graphs
/// with more than `node_limit` nodes.
pub fn brute_force_shapley(g: &Graph, spec: &GameSpec, node_limit: usize) -> Result<ShapleyVector> {
    if node_limit > MAX_NODE_LIMIT {
        return Err(Error::param(format!(
            "oracle node limit {node_limit} is above the maximum of {MAX_NODE_LIMIT}"
        )));
    }
    let n = g.node_count();
    if n > node_limit {
        return Err(Error::TooLarge {
            nodes: n,
            limit: node_limit,
        });
    }
    let game = Game::new(g, spec.clone())?;
    let weights = coalition_weights(n);

    let scores = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sv = 0.0;
            for bits in 0u64..1 << n {
                if bits >> i & 1 == 1 {
                    continue;
                }
                let without = Coalition::from_bits(n, bits);
                let with = Coalition::from_bits(n, bits | 1 << i);
                let gain = game.value(&with) - game.value(&without);
                sv += weights[bits.count_ones() as usize] * gain;
            }
            sv
        })
        .collect();

    Ok(ShapleyVector {
        scores,
        game: spec.clone(),
        graph_id: g.fingerprint(),
        method: Method::BruteForce,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::DecayFn;
    use crate::graph::load_edge_list;

    #[test]
    fn weights_sum_to_one_over_coalitions() {
        for n in 1..=20usize {
            let w = coalition_weights(n);
            let mut binom = 1.0;
            let mut total = 0.0;
            for (s, ws) in w.iter().enumerate() {
                if s > 0 {
                    binom = binom * (n - s) as f64 / s as f64;
                }
                total += binom * ws;
            }
            // summed over all coalitions not containing i, times n players
            assert!((total * n as f64 - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn path_examples() {
        let g = load_edge_list("0 1\n1 2", false, false).unwrap();
        let s = brute_force_shapley(&g, &GameSpec::Fringe, 16).unwrap();
        for (a, b) in s.scores.iter().zip([5.0 / 6.0, 4.0 / 3.0, 5.0 / 6.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let decay = GameSpec::DistanceDecay {
            decay: DecayFn::InvLinear,
        };
        let s = brute_force_shapley(&g, &decay, 16).unwrap();
        for (a, b) in s.scores.iter().zip([35.0 / 36.0, 19.0 / 18.0, 35.0 / 36.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(s.method, Method::BruteForce);
    }

    #[test]
    fn single_node() {
        let g = load_edge_list("nodes 1", false, false).unwrap();
        let s = brute_force_shapley(&g, &GameSpec::Fringe, 16).unwrap();
        assert_eq!(s.scores, vec![1.0]);
    }

    #[test]
    fn refuses_large_graphs() {
        let g = load_edge_list("nodes 17", false, false).unwrap();
        assert!(matches!(
            brute_force_shapley(&g, &GameSpec::Fringe, 16),
            Err(Error::TooLarge { nodes: 17, limit: 16 })
        ));
        assert!(brute_force_shapley(&g, &GameSpec::Fringe, 21).is_err());
    }
}
