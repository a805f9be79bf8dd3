//! Seeded random graph generators.

use rand::distributions::{Distribution, Open01};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::montecarlo::RngSeed;

/// `K_n` with i.i.d. `U(0, 1)` edge weights (never exactly 0 or 1).
pub fn gen_complete_weighted(n: usize, seed: RngSeed) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param(format!("complete graph needs at least 2 nodes, got {n}")));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            let weight: f64 = Open01.sample(&mut rng);
            edges.push(Edge { u, v, weight });
        }
    }
    Graph::from_edges(n, false, true, edges)
}

/// Erdős–Rényi `G(n, p)`: each unordered pair (ordered pair when
/// `directed`) is an edge independently with probability `p`. Weights are
/// `U(0, 1)` when `weighted`, otherwise 1. Runs in `O(n + m)` by drawing
/// geometric gaps between consecutive edges.
pub fn gen_gnp(n: usize, p: f64, seed: RngSeed, weighted: bool, directed: bool) -> Result<Graph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("edge probability must be in (0, 1], got {p}")));
    }
    let mut rng = seed.rng();
    let log_q = (1.0 - p).ln();
    let gap = |rng: &mut ChaCha8Rng| -> f64 {
        if p == 1.0 {
            return 0.0;
        }
        let r: f64 = rng.gen();
        ((1.0 - r).ln() / log_q).floor()
    };
    let mut edges = Vec::new();
    let mut push = |rng: &mut ChaCha8Rng, u: usize, v: usize| {
        let weight = if weighted { Open01.sample(rng) } else { 1.0 };
        edges.push(Edge { u, v, weight });
    };
    if directed {
        let row = n.saturating_sub(1) as f64;
        let total = n as f64 * row;
        let mut idx = -1.0f64;
        loop {
            idx += 1.0 + gap(&mut rng);
            if idx >= total {
                break;
            }
            let u = (idx / row) as usize;
            let j = (idx - u as f64 * row) as usize;
            push(&mut rng, u, if j >= u { j + 1 } else { j });
        }
    } else {
        // walk the lower triangle row by row: pairs (w, v) with w < v
        let mut v = 1usize;
        let mut w = -1.0f64;
        while v < n {
            w += 1.0 + gap(&mut rng);
            while w >= v as f64 && v < n {
                w -= v as f64;
                v += 1;
            }
            if v < n {
                push(&mut rng, w as usize, v);
            }
        }
    }
    Graph::from_edges(n, directed, weighted, edges)
}

/// `G(n, p)` with `p` chosen for the given expected average degree.
pub fn gen_gnp_avg_degree(n: usize, avg_degree: f64, seed: RngSeed, weighted: bool) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("average-degree generator needs at least 2 nodes"));
    }
    gen_gnp(n, (avg_degree / (n - 1) as f64).min(1.0), seed, weighted, false)
}
