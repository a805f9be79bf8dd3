//! Game g5 (weighted threshold): Gaussian approximation of the Shapley value
//! with exact enumeration for low-degree nodes.
//!
//! Node `i` brings neighbor `j` over its threshold when `j` has not joined
//! yet, `m` of `j`'s other neighbors precede `i`, and the weight `X` those `m`
//! neighbors send to `j` falls in `[W_cutoff(j) - W(i, j), W_cutoff(j))`.
//! `X` is the sum of a uniformly random `m`-subset of `j`'s other incident
//! weights. For a large degree its distribution is replaced by the normal law
//! with the same mean and variance; for a small degree all subsets are
//! enumerated.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::{GameSpec, Resolved};
use crate::graph::{Graph, NodeId};
use crate::params::NodeParam;
use crate::shapley::{Method, ShapleyVector};

/// Nodes whose (in-)degree is at most this value are handled by exact
/// enumeration over at most `2^12` subsets.
pub const DEFAULT_BRUTE_FORCE_DEGREE_LIMIT: usize = 12;

/// Mean and variance of a subset-sum random variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoment {
    pub mu: f64,
    /// `0` marks a deterministic sum.
    pub sigma2: f64,
}

/// Error function, accurate to about one ulp (the approximation budget is
/// `1.5e-7`).
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `P(lo <= X < hi)` for `X ~ N(mu, sigma2)`. A zero variance is treated as a
/// point mass at `mu` with the half-open rule.
pub fn gaussian_interval_prob(m: GaussianMoment, lo: f64, hi: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::param(format!("empty interval [{lo}, {hi})")));
    }
    if !(m.sigma2 >= 0.0) {
        return Err(Error::param(format!("negative variance {}", m.sigma2)));
    }
    Ok(interval_prob(m, lo, hi))
}

#[inline]
fn interval_prob(m: GaussianMoment, lo: f64, hi: f64) -> f64 {
    if m.sigma2 == 0.0 {
        return if lo <= m.mu && m.mu < hi { 1.0 } else { 0.0 };
    }
    let scale = (2.0 * m.sigma2).sqrt();
    0.5 * (erf((hi - m.mu) / scale) - erf((lo - m.mu) / scale))
}

/// Moments of the sum of a random `m`-subset drawn from `count` weights with
/// sum `alpha` and sum of squares `beta`.
pub fn subset_sum_moments(count: usize, alpha: f64, beta: f64, m: usize) -> GaussianMoment {
    debug_assert!(m <= count);
    if m == 0 || m == count {
        return GaussianMoment {
            mu: if m == 0 { 0.0 } else { alpha },
            sigma2: 0.0,
        };
    }
    let n = count as f64;
    let mf = m as f64;
    let mu = mf / n * alpha;
    let sigma2 = mf * (n - mf) / (n * (n - 1.0)) * (beta - alpha * alpha / n);
    GaussianMoment {
        mu,
        // cancellation can leave a tiny negative residue
        sigma2: sigma2.max(0.0),
    }
}

/// `|S|! (deg - |S|)! / (deg + 1)!` for every subset size, i.e. the
/// probability that exactly the members of a given `|S|`-subset of the `deg`
/// neighbors precede a fixed node (and, for the neighbor term, that the
/// neighbor itself comes later).
fn subset_weights(deg: usize) -> Vec<f64> {
    let mut binom = 1.0f64;
    (0..=deg)
        .map(|m| {
            if m > 0 {
                binom = binom * (deg - m + 1) as f64 / m as f64;
            }
            1.0 / ((deg + 1) as f64 * binom)
        })
        .collect()
}

/// All `2^k` subset sums of `weights`, indexed by bitmask.
fn subset_sums(weights: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; 1 << weights.len()];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + weights[low];
    }
    sums
}

struct NodeStats {
    alpha: f64,
    beta: f64,
}

struct Solver<'a> {
    g: &'a Graph,
    cutoff: Vec<f64>,
    stats: Vec<NodeStats>,
    limit: usize,
}

impl Solver<'_> {
    /// Probability that `i` counts itself: its incoming weight from earlier
    /// nodes is still below its cutoff when it joins.
    fn self_term(&self, i: NodeId) -> f64 {
        let deg = self.g.in_degree(i);
        let cut = self.cutoff[i];
        if deg <= self.limit {
            let weights = subset_weights(deg);
            let sums = subset_sums(self.g.in_weights(i));
            return sums
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s < cut)
                .map(|(mask, _)| weights[mask.count_ones() as usize])
                .sum();
        }
        let NodeStats { alpha, beta } = self.stats[i];
        let hits: f64 = (0..=deg)
            .map(|m| interval_prob(subset_sum_moments(deg, alpha, beta, m), f64::NEG_INFINITY, cut))
            .sum();
        hits / (1.0 + deg as f64)
    }

    /// Probability that `i` is the node that pushes `j` over its cutoff.
    fn through_term(&self, i: NodeId, j: NodeId, w_ij: f64) -> f64 {
        let deg = self.g.in_degree(j);
        let cut = self.cutoff[j];
        if deg <= self.limit {
            let others: Vec<f64> = self
                .g
                .in_edges(j)
                .filter(|&(u, _)| u != i)
                .map(|(_, w)| w)
                .collect();
            let weights = subset_weights(deg);
            return subset_sums(&others)
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s < cut && s + w_ij >= cut)
                .map(|(mask, _)| weights[mask.count_ones() as usize])
                .sum();
        }
        let NodeStats { alpha, beta } = self.stats[j];
        let others = deg - 1;
        let rest_alpha = alpha - w_ij;
        let rest_beta = beta - w_ij * w_ij;
        let norm = deg as f64 * (deg as f64 + 1.0);
        (0..deg)
            .map(|m| {
                let moment = subset_sum_moments(others, rest_alpha, rest_beta, m);
                (deg - m) as f64 / norm * interval_prob(moment, cut - w_ij, cut)
            })
            .sum()
    }

    fn score(&self, i: NodeId) -> f64 {
        let mut s = self.self_term(i);
        for (j, w) in self.g.out_edges(i) {
            s += self.through_term(i, j, w);
        }
        s
    }
}

/// g5 Shapley values. Targets with degree at most `brute_force_degree_limit`
/// (and always those of degree 1 or 2, where the variance formula
/// degenerates) are enumerated exactly; the rest use the normal
/// approximation. Runs in `O(V E)` on the analytic path.
pub fn weight_threshold_shapley(
    g: &Graph,
    cutoff: &NodeParam<f64>,
    brute_force_degree_limit: usize,
) -> Result<ShapleyVector> {
    if brute_force_degree_limit < 2 {
        return Err(Error::param(format!(
            "brute-force degree limit must be at least 2, got {brute_force_degree_limit}"
        )));
    }
    if brute_force_degree_limit > 30 {
        return Err(Error::param("brute-force degree limit above 30 would enumerate over 2^30 subsets"));
    }
    let spec = GameSpec::WeightThreshold { cutoff: cutoff.clone() };
    let cutoff = match spec.resolve(g)? {
        Resolved::Cutoff(c) => c,
        _ => unreachable!(),
    };
    let stats = (0..g.node_count())
        .map(|v| NodeStats {
            alpha: g.in_weights(v).iter().sum(),
            beta: g.in_weights(v).iter().map(|w| w * w).sum(),
        })
        .collect();
    let solver = Solver {
        g,
        cutoff,
        stats,
        limit: brute_force_degree_limit,
    };
    let scores = (0..g.node_count())
        .into_par_iter()
        .map(|i| solver.score(i))
        .collect();
    Ok(ShapleyVector {
        scores,
        game: spec,
        graph_id: g.fingerprint(),
        method: Method::GaussianApprox,
    })
}
