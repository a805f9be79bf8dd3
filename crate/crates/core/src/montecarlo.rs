//! Permutation-sampling estimates of the Shapley value.
//!
//! Each iteration shuffles the nodes and walks the permutation once, using a
//! per-game incremental block that yields the marginal contribution of every
//! node from state carried along the walk instead of re-evaluating `nu`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::extended_lists;
use crate::games::{Game, GameSpec, Resolved};
use crate::graph::{DistanceMatrix, Graph, NodeId};
use crate::shapley::{format_sig, Method, ShapleyVector};

pub const DEFAULT_ERROR_STRIDE: usize = 5;

/// Seed of the permutation stream. Equal seeds give bit-identical runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of the `i`-th run in a batch started from `self`.
    pub fn offset(self, i: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(i))
    }
}

/// What a trace's errors are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    GaussianApprox,
    None,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Exact => "exact",
            ReferenceKind::GaussianApprox => "gaussian_approx",
            ReferenceKind::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Sampling time since the first iteration, excluding precomputation
    /// and error evaluation.
    pub elapsed: Duration,
    pub max_rel_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub error_stride: usize,
    pub reference: ReferenceKind,
    /// One-time setup before sampling (distance tables for g3/g4).
    pub precompute: Duration,
}

impl ConvergenceTrace {
    /// Error recorded at exactly `iteration`, if any.
    pub fn error_at(&self, iteration: usize) -> Option<f64> {
        self.rows
            .binary_search_by_key(&iteration, |r| r.iteration)
            .ok()
            .and_then(|i| self.rows[i].max_rel_error)
    }

    /// First row whose error is at or below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<&TraceRow> {
        self.rows
            .iter()
            .find(|r| r.max_rel_error.is_some_and(|e| e <= threshold))
    }

    /// `iteration,elapsed_ms,max_rel_error`; the error column is empty
    /// without a reference. With `with_time == false` the elapsed column is
    /// left empty, which makes the output reproducible.
    pub fn write_csv<W: Write>(&self, mut out: W, with_time: bool) -> Result<()> {
        writeln!(out, "iteration,elapsed_ms,max_rel_error")?;
        for r in &self.rows {
            let ms = if with_time {
                format!("{:.6}", r.elapsed.as_secs_f64() * 1e3)
            } else {
                String::new()
            };
            let err = r.max_rel_error.map(|e| format_sig(e, 12)).unwrap_or_default();
            writeln!(out, "{},{ms},{err}", r.iteration)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, true).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// `max_v |estimate(v) - reference(v)| / reference(v)`.
pub fn max_relative_error(reference: &ShapleyVector, estimate: &ShapleyVector) -> Result<f64> {
    check_reference(&reference.scores, estimate.len())?;
    Ok(relative_error(&reference.scores, &estimate.scores, 1.0))
}

fn check_reference(reference: &[f64], n: usize) -> Result<()> {
    if reference.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: reference.len(),
        });
    }
    if let Some((v, s)) = reference.iter().enumerate().find(|(_, &s)| !(s > 0.0)) {
        return Err(Error::param(format!(
            "reference score of node {v} is {s}; relative error needs positive scores"
        )));
    }
    Ok(())
}

/// Relative error of `acc * scale` against `reference`.
fn relative_error(reference: &[f64], acc: &[f64], scale: f64) -> f64 {
    reference
        .iter()
        .zip(acc)
        .map(|(&r, &a)| (a * scale - r).abs() / r)
        .fold(0.0, f64::max)
}

enum Block {
    Fringe,
    KThreshold { k: Vec<u32>, edges: Vec<u32> },
    Extended { out: Vec<Vec<NodeId>> },
    Decay { n: usize, reach: Vec<f64>, cur: Vec<f64> },
    Weight { cutoff: Vec<f64>, weights: Vec<f64> },
}

/// Incremental marginal-contribution engine for one game on one graph.
pub struct Sampler<'g> {
    graph: &'g Graph,
    block: Block,
    counted: Vec<bool>,
    grand: f64,
    precompute: Duration,
}

impl<'g> Sampler<'g> {
    /// Validates the game and performs the one-time precomputation (bounded
    /// reverse searches for g3, the full decay table for g4).
    pub fn new(graph: &'g Graph, spec: &GameSpec) -> Result<Self> {
        let started = Instant::now();
        let n = graph.node_count();
        let params = spec.resolve(graph)?;
        let block = match (spec, params) {
            (GameSpec::Fringe, _) => Block::Fringe,
            (GameSpec::KThreshold { .. }, Resolved::K(k)) => Block::KThreshold {
                k,
                edges: vec![0; n],
            },
            (GameSpec::DistanceCutoff { .. }, Resolved::Cutoff(c)) => Block::Extended {
                out: extended_lists(graph, &c).out,
            },
            (GameSpec::DistanceDecay { .. }, Resolved::Decay(f)) => {
                let d = DistanceMatrix::all_pairs(graph);
                let reach = (0..n)
                    .flat_map(|v| d.row(v).iter().map(|&x| f.eval(x)).collect::<Vec<_>>())
                    .collect();
                Block::Decay {
                    n,
                    reach,
                    cur: vec![0.0; n],
                }
            }
            (GameSpec::WeightThreshold { .. }, Resolved::Cutoff(cutoff)) => Block::Weight {
                cutoff,
                weights: vec![0.0; n],
            },
            _ => unreachable!("parameters resolved for a different game"),
        };
        let grand = match &block {
            Block::Decay { n, reach, .. } => (0..*n).map(|v| reach[v * n + v]).sum(),
            _ => n as f64,
        };
        Ok(Sampler {
            graph,
            block,
            counted: vec![false; n],
            grand,
            precompute: started.elapsed(),
        })
    }

    pub fn precompute_time(&self) -> Duration {
        self.precompute
    }

    /// `nu(V)`, which every permutation's contributions add up to.
    pub fn grand_value(&self) -> f64 {
        self.grand
    }

    /// Writes `nu(P ∪ {v}) - nu(P)` into `out[v]` for every `v`, where `P`
    /// is the set of nodes before `v` in `perm`.
    pub fn marginal_contributions(&mut self, perm: &[NodeId], out: &mut [f64]) {
        let g = self.graph;
        let n = g.node_count();
        assert_eq!(perm.len(), n);
        assert_eq!(out.len(), n);
        let counted = &mut self.counted;
        counted.fill(false);
        match &mut self.block {
            Block::Fringe => {
                for &v in perm {
                    let mut mc = 0u32;
                    for u in std::iter::once(v).chain(g.out_neighbors(v).iter().copied()) {
                        if !counted[u] {
                            counted[u] = true;
                            mc += 1;
                        }
                    }
                    out[v] = mc as f64;
                }
            }
            Block::KThreshold { k, edges } => {
                edges.fill(0);
                for &v in perm {
                    let mut mc = 0u32;
                    if !counted[v] {
                        counted[v] = true;
                        mc += 1;
                    }
                    for &u in g.out_neighbors(v) {
                        edges[u] += 1;
                        if !counted[u] && edges[u] >= k[u] {
                            counted[u] = true;
                            mc += 1;
                        }
                    }
                    out[v] = mc as f64;
                }
            }
            Block::Extended { out: reach } => {
                for &v in perm {
                    let mut mc = 0u32;
                    for u in std::iter::once(v).chain(reach[v].iter().copied()) {
                        if !counted[u] {
                            counted[u] = true;
                            mc += 1;
                        }
                    }
                    out[v] = mc as f64;
                }
            }
            Block::Decay { n, reach, cur } => {
                cur.fill(0.0);
                // Differences of running totals, summed in node order like
                // `Game::value`, so both agree bit for bit.
                let mut before = 0.0;
                for &v in perm {
                    let row = &reach[v * *n..(v + 1) * *n];
                    let mut total = 0.0;
                    for (c, &f) in cur.iter_mut().zip(row) {
                        if f > *c {
                            *c = f;
                        }
                        total += *c;
                    }
                    out[v] = total - before;
                    before = total;
                }
            }
            Block::Weight { cutoff, weights } => {
                weights.fill(0.0);
                for &v in perm {
                    let mut mc = 0u32;
                    if !counted[v] {
                        counted[v] = true;
                        mc += 1;
                    }
                    for (u, w) in g.out_edges(v) {
                        weights[u] += w;
                        if !counted[u] && weights[u] >= cutoff[u] {
                            counted[u] = true;
                            mc += 1;
                        }
                    }
                    out[v] = mc as f64;
                }
            }
        }
        debug_assert!(
            (out.iter().sum::<f64>() - self.grand).abs() <= 1e-9 * self.grand.max(1.0),
            "marginal contributions do not add up to nu(V)"
        );
    }
}

/// Knobs of a sampling run.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub max_iter: usize,
    pub seed: RngSeed,
    pub error_stride: usize,
}

impl McConfig {
    pub fn new(max_iter: usize, seed: RngSeed) -> Self {
        McConfig {
            max_iter,
            seed,
            error_stride: DEFAULT_ERROR_STRIDE,
        }
    }
}

/// Averages marginal contributions over `max_iter` random permutations,
/// tracing the error against `reference` every five iterations and after
/// the last one.
pub fn mc_shapley(
    g: &Graph,
    spec: &GameSpec,
    max_iter: usize,
    seed: RngSeed,
    reference: Option<&ShapleyVector>,
) -> Result<(ShapleyVector, ConvergenceTrace)> {
    mc_shapley_with(g, spec, McConfig::new(max_iter, seed), reference)
}

pub fn mc_shapley_with(
    g: &Graph,
    spec: &GameSpec,
    config: McConfig,
    reference: Option<&ShapleyVector>,
) -> Result<(ShapleyVector, ConvergenceTrace)> {
    if config.max_iter == 0 {
        return Err(Error::param("max_iter must be at least 1"));
    }
    if config.error_stride == 0 {
        return Err(Error::param("error stride must be at least 1"));
    }
    let n = g.node_count();
    if let Some(r) = reference {
        check_reference(&r.scores, n)?;
    }
    let reference_kind = match reference.map(|r| r.method) {
        None => ReferenceKind::None,
        Some(Method::GaussianApprox) => ReferenceKind::GaussianApprox,
        Some(_) => ReferenceKind::Exact,
    };

    let mut sampler = Sampler::new(g, spec)?;
    let mut rng = config.seed.rng();
    let mut perm: Vec<NodeId> = (0..n).collect();
    let mut mc = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut rows = Vec::with_capacity(config.max_iter / config.error_stride + 1);
    let mut paused = Duration::ZERO;
    let started = Instant::now();

    for iter in 1..=config.max_iter {
        perm.shuffle(&mut rng);
        sampler.marginal_contributions(&perm, &mut mc);
        for (a, m) in acc.iter_mut().zip(&mc) {
            *a += m;
        }
        if iter % config.error_stride == 0 || iter == config.max_iter {
            let now = Instant::now();
            let elapsed = now.duration_since(started) - paused;
            let max_rel_error = reference.map(|r| relative_error(&r.scores, &acc, 1.0 / iter as f64));
            rows.push(TraceRow {
                iteration: iter,
                elapsed,
                max_rel_error,
            });
            paused += now.elapsed();
        }
    }

    let scale = 1.0 / config.max_iter as f64;
    let estimate = ShapleyVector {
        scores: acc.iter().map(|a| a * scale).collect(),
        game: spec.clone(),
        graph_id: g.fingerprint(),
        method: Method::MonteCarlo,
    };
    let trace = ConvergenceTrace {
        rows,
        error_stride: config.error_stride,
        reference: reference_kind,
        precompute: sampler.precompute_time(),
    };
    Ok((estimate, trace))
}

/// Direct `nu` differences along `perm`; the slow counterpart of
/// [`Sampler::marginal_contributions`].
pub fn marginal_contributions_direct(game: &Game<'_>, perm: &[NodeId]) -> Vec<f64> {
    let n = game.graph().node_count();
    let mut out = vec![0.0; n];
    let mut coalition = crate::games::Coalition::empty(n);
    let mut before = 0.0;
    for &v in perm {
        coalition.insert(v);
        let after = game.value(&coalition);
        out[v] = after - before;
        before = after;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::fringe_shapley;
    use crate::games::DecayFn;
    use crate::graph::load_edge_list;

    fn sv(scores: Vec<f64>) -> ShapleyVector {
        ShapleyVector {
            scores,
            game: GameSpec::Fringe,
            graph_id: 0,
            method: Method::Exact,
        }
    }

    #[test]
    fn relative_error_examples() {
        let a = sv(vec![1.0, 1.0]);
        assert_eq!(max_relative_error(&a, &a).unwrap(), 0.0);
        let e = max_relative_error(&a, &sv(vec![1.1, 0.9])).unwrap();
        assert!((e - 0.1).abs() < 1e-12);
        let e = max_relative_error(&sv(vec![2.0, 4.0]), &sv(vec![2.0, 5.0])).unwrap();
        assert_eq!(e, 0.25);
        assert!(max_relative_error(&sv(vec![0.0, 1.0]), &a).is_err());
        assert!(max_relative_error(&sv(vec![1.0]), &a).is_err());
    }

    #[test]
    fn same_seed_same_run() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0\n1 3", false, false).unwrap();
        let exact = fringe_shapley(&g);
        let (a, ta) = mc_shapley(&g, &GameSpec::Fringe, 200, RngSeed(9), Some(&exact)).unwrap();
        let (b, tb) = mc_shapley(&g, &GameSpec::Fringe, 200, RngSeed(9), Some(&exact)).unwrap();
        assert_eq!(a.scores, b.scores);
        let errs = |t: &ConvergenceTrace| t.rows.iter().map(|r| (r.iteration, r.max_rel_error)).collect::<Vec<_>>();
        assert_eq!(errs(&ta), errs(&tb));
        assert_eq!(ta.rows.len(), 40);
        assert_eq!(ta.reference, ReferenceKind::Exact);
    }

    #[test]
    fn path_converges() {
        let g = load_edge_list("0 1\n1 2", false, false).unwrap();
        let (est, trace) = mc_shapley(&g, &GameSpec::Fringe, 100_000, RngSeed(1), None).unwrap();
        for (e, x) in est.scores.iter().zip([5.0 / 6.0, 4.0 / 3.0, 5.0 / 6.0]) {
            assert!((e - x).abs() / x < 0.02);
        }
        assert!(trace.rows.iter().all(|r| r.max_rel_error.is_none()));
        assert_eq!(trace.reference, ReferenceKind::None);
    }

    #[test]
    fn decay_permutations_telescope() {
        let g = load_edge_list("0 1\n1 2", false, false).unwrap();
        let spec = GameSpec::DistanceDecay { decay: DecayFn::InvLinear };
        let mut s = Sampler::new(&g, &spec).unwrap();
        assert_eq!(s.grand_value(), 3.0);
        let mut out = vec![0.0; 3];
        for perm in [[0, 1, 2], [2, 1, 0], [1, 0, 2], [0, 2, 1], [1, 2, 0], [2, 0, 1]] {
            s.marginal_contributions(&perm, &mut out);
            assert!((out.iter().sum::<f64>() - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_csv_layout() {
        // without edges every marginal contribution is 1
        let g = load_edge_list("nodes 2", false, false).unwrap();
        let exact = fringe_shapley(&g);
        let (_, t) = mc_shapley(&g, &GameSpec::Fringe, 10, RngSeed(3), Some(&exact)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, false).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,elapsed_ms,max_rel_error\n5,,0\n10,,0\n");
        assert_eq!(t.first_below(0.0).unwrap().iteration, 5);
        assert_eq!(t.error_at(10), Some(0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let g = load_edge_list("0 1", false, false).unwrap();
        assert!(mc_shapley(&g, &GameSpec::Fringe, 0, RngSeed(0), None).is_err());
        let short = sv(vec![1.0]);
        assert!(mc_shapley(&g, &GameSpec::Fringe, 5, RngSeed(0), Some(&short)).is_err());
    }
}
