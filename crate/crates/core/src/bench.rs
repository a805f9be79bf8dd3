//! Exact-versus-sampling comparisons and the g5 approximation study.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::approx::weight_threshold_shapley;
use crate::error::{Error, Result};
use crate::exact::solve;
use crate::games::{weight_cutoffs_from_strength, DecayFn, GameSpec};
use crate::generate::{gen_complete_weighted, gen_gnp_avg_degree};
use crate::graph::Graph;
use crate::montecarlo::{max_relative_error, mc_shapley, ConvergenceTrace, ReferenceKind, RngSeed};
use crate::oracle::{brute_force_shapley, DEFAULT_NODE_LIMIT};
use crate::params::NodeParam;
use crate::shapley::{format_sig, Method, ShapleyVector};

const EXACT_TIMINGS: usize = 5;
const Z95: f64 = 1.96;

pub const SCENARIOS: &[&str] = &["g1-er", "g2-er", "g3-er", "g4-er", "g5-small", "g5-large"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub weighted: bool,
    pub directed: bool,
}

impl GraphSummary {
    pub fn of(g: &Graph) -> Self {
        GraphSummary {
            nodes: g.node_count(),
            edges: g.edge_count(),
            weighted: g.is_weighted(),
            directed: g.is_directed(),
        }
    }
}

/// Mean and 95% normal half-width; no half-width for a single sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub half_width: Option<f64>,
}

impl Interval {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let half_width = (xs.len() >= 2).then(|| {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Z95 * (var / n).sqrt()
        });
        Interval { mean, half_width }
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdStats {
    pub threshold: f64,
    /// Runs whose traced error reached the threshold before `max_iter`.
    pub reached: usize,
    pub iterations: Interval,
    /// Time to reach the threshold, in milliseconds; censored runs count
    /// with their full duration.
    pub time_ms: Interval,
    /// Mean sampling time over exact solver time.
    pub speedup: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub scenario: String,
    pub game: String,
    pub graph: GraphSummary,
    pub runs: usize,
    pub max_iter: usize,
    pub base_seed: u64,
    pub reference: ReferenceKind,
    /// Median over repeated timings of the reference solver.
    pub exact_runtime: Duration,
    /// Sorted by descending threshold.
    pub thresholds: Vec<ThresholdStats>,
    pub traces: Vec<ConvergenceTrace>,
}

const REPORT_HEADER: &str = "scenario,game,nodes,edges,directed,weighted,reference,runs,max_iter,base_seed,\
threshold,reached,censored,mean_iterations,iterations_half_width,exact_ms,mc_mean_ms,mc_half_width_ms,speedup";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format_sig(v, 6)).unwrap_or_default()
}

impl BenchReport {
    /// One row per threshold. With `with_time == false` the wall-clock
    /// columns (`*_ms`, `speedup`) are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W, with_time: bool) -> Result<()> {
        writeln!(out, "{REPORT_HEADER}")?;
        let exact_ms = self.exact_runtime.as_secs_f64() * 1e3;
        for t in &self.thresholds {
            let (exact, mean, hw, speedup) = if with_time {
                (
                    format_sig(exact_ms, 6),
                    format_sig(t.time_ms.mean, 6),
                    opt(t.time_ms.half_width),
                    format_sig(t.speedup, 6),
                )
            } else {
                Default::default()
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{exact},{mean},{hw},{speedup}",
                self.scenario,
                self.game,
                self.graph.nodes,
                self.graph.edges,
                self.graph.directed,
                self.graph.weighted,
                self.reference.as_str(),
                self.runs,
                self.max_iter,
                self.base_seed,
                t.threshold,
                t.reached,
                self.runs - t.reached,
                format_sig(t.iterations.mean, 8),
                opt(t.iterations.half_width),
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self, with_time: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, with_time).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let g = &self.graph;
        let _ = writeln!(
            s,
            "{} [{}] n={} m={}{}{}  runs={} max_iter={} reference={}",
            self.scenario,
            self.game,
            g.nodes,
            g.edges,
            if g.directed { " directed" } else { "" },
            if g.weighted { " weighted" } else { "" },
            self.runs,
            self.max_iter,
            self.reference.as_str(),
        );
        let _ = writeln!(s, "  exact solver: {:.3} ms", self.exact_runtime.as_secs_f64() * 1e3);
        let _ = writeln!(
            s,
            "  {:>9}  {:>8}  {:>18}  {:>24}  {:>10}",
            "threshold", "reached", "iterations", "mc time (ms)", "speedup"
        );
        for t in &self.thresholds {
            let pm = |i: &Interval, digits: usize| match i.half_width {
                Some(h) => format!("{:.*} ± {:.*}", digits, i.mean, digits, h),
                None => format!("{:.*} (1 run)", digits, i.mean),
            };
            let _ = writeln!(
                s,
                "  {:>9}  {:>8}  {:>18}  {:>24}  {:>9.1}x",
                format!("{:.0}%", t.threshold * 100.0),
                format!("{}/{}", t.reached, self.runs),
                pm(&t.iterations, 0),
                pm(&t.time_ms, 3),
                t.speedup,
            );
        }
        s
    }

    /// Writes `run_NN.csv` per sampling run into `dir`.
    pub fn save_traces(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (r, trace) in self.traces.iter().enumerate() {
            let file = fs::File::create(dir.join(format!("run_{r:02}.csv")))?;
            trace.write_csv(std::io::BufWriter::new(file), true)?;
        }
        Ok(())
    }
}

/// The reference solver for `spec`: closed form for g1 to g4, the Gaussian
/// approximation for g5.
fn reference_solver(g: &Graph, spec: &GameSpec) -> Result<(ShapleyVector, Duration)> {
    let mut times = Vec::with_capacity(EXACT_TIMINGS);
    let mut result = None;
    for _ in 0..EXACT_TIMINGS {
        let started = Instant::now();
        let sv = solve(g, spec)?;
        times.push(started.elapsed());
        result = Some(sv);
    }
    times.sort();
    Ok((result.expect("at least one timing"), times[EXACT_TIMINGS / 2]))
}

/// Times the reference solver, then runs `runs` seeded sampling runs (seeds
/// `base_seed`, `base_seed + 1`, ...) one after another and records when each
/// first reaches every error threshold.
pub fn run_comparison(
    g: &Graph,
    spec: &GameSpec,
    thresholds: &[f64],
    runs: usize,
    max_iter: usize,
    base_seed: RngSeed,
) -> Result<BenchReport> {
    if thresholds.is_empty() {
        return Err(Error::param("at least one error threshold is required"));
    }
    if runs == 0 {
        return Err(Error::param("runs must be at least 1"));
    }
    let mut thresholds = thresholds.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let (reference, exact_runtime) = reference_solver(g, spec)?;
    let traces = (0..runs)
        .map(|r| mc_shapley(g, spec, max_iter, base_seed.offset(r as u64), Some(&reference)).map(|(_, t)| t))
        .collect::<Result<Vec<_>>>()?;

    let exact_ms = exact_runtime.as_secs_f64() * 1e3;
    let stats = thresholds
        .iter()
        .map(|&threshold| {
            let mut reached = 0;
            let mut iters = Vec::with_capacity(runs);
            let mut times = Vec::with_capacity(runs);
            for t in &traces {
                let row = match t.first_below(threshold) {
                    Some(row) => {
                        reached += 1;
                        row
                    }
                    None => t.rows.last().expect("max_iter >= stride"),
                };
                iters.push(row.iteration as f64);
                times.push(row.elapsed.as_secs_f64() * 1e3);
            }
            let time_ms = Interval::of(&times);
            ThresholdStats {
                threshold,
                reached,
                iterations: Interval::of(&iters),
                speedup: time_ms.mean / exact_ms.max(1e-6),
                time_ms,
            }
        })
        .collect();

    let reference_kind = if reference.method == Method::GaussianApprox {
        ReferenceKind::GaussianApprox
    } else {
        ReferenceKind::Exact
    };
    Ok(BenchReport {
        scenario: String::new(),
        game: game_label(spec),
        graph: GraphSummary::of(g),
        runs,
        max_iter,
        base_seed: base_seed.0,
        reference: reference_kind,
        exact_runtime,
        thresholds: stats,
        traces,
    })
}

/// Short description of a game and its parameters, e.g. `g2(k=2)`.
pub fn game_label(spec: &GameSpec) -> String {
    fn param<T: std::fmt::Display + Copy>(p: &NodeParam<T>) -> String {
        match p {
            NodeParam::Uniform(x) => x.to_string(),
            NodeParam::PerNode(_) => "per-node".into(),
        }
    }
    match spec {
        GameSpec::Fringe => "g1".into(),
        GameSpec::KThreshold { k } => format!("g2(k={})", param(k)),
        GameSpec::DistanceCutoff { cutoff } => format!("g3(d_cutoff={})", param(cutoff)),
        GameSpec::DistanceDecay { decay } => format!("g4(f={})", decay.label()),
        GameSpec::WeightThreshold { cutoff } => format!("g5(W_cutoff={})", param(cutoff)),
    }
}

/// One cell of the g5 study: approximation error against the oracle over
/// random weighted complete graphs.
#[derive(Debug, Clone)]
pub struct G5StudyRow {
    pub nodes: usize,
    /// `W_cutoff(v) = fraction * strength(v)`.
    pub fraction: f64,
    pub instances: usize,
    pub error: Interval,
    pub max_error: f64,
}

#[derive(Debug, Clone)]
pub struct G5Study {
    pub brute_force_degree_limit: usize,
    pub base_seed: u64,
    pub rows: Vec<G5StudyRow>,
}

impl G5Study {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "nodes,fraction,instances,brute_force_degree_limit,base_seed,mean_max_rel_error,half_width,worst_max_rel_error"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.nodes,
                r.fraction,
                r.instances,
                self.brute_force_degree_limit,
                self.base_seed,
                format_sig(r.error.mean, 8),
                opt(r.error.half_width),
                format_sig(r.max_error, 8)
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "g5 approximation vs oracle (brute-force degree limit {})",
            self.brute_force_degree_limit
        );
        let _ = writeln!(s, "  {:>5}  {:>9}  {:>9}  {:>20}  {:>8}", "n", "W_cutoff", "instances", "mean max-rel error", "worst");
        for r in &self.rows {
            let hw = r.error.half_width.map(|h| format!(" ± {:.2}%", h * 100.0)).unwrap_or_default();
            let _ = writeln!(
                s,
                "  {:>5}  {:>9}  {:>9}  {:>20}  {:>7.2}%",
                r.nodes,
                format!("{}·α", r.fraction),
                r.instances,
                format!("{:.2}%{hw}", r.error.mean * 100.0),
                r.max_error * 100.0
            );
        }
        s
    }
}

/// Mean max-relative error of the g5 approximation against the oracle on
/// `instances` random `K_n` (graph seeds `base_seed + i`) for each size and
/// cutoff fraction.
pub fn g5_study(
    sizes: &[usize],
    fractions: &[f64],
    instances: usize,
    brute_force_degree_limit: usize,
    base_seed: RngSeed,
) -> Result<G5Study> {
    if instances == 0 {
        return Err(Error::param("instances must be at least 1"));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        if n > DEFAULT_NODE_LIMIT {
            return Err(Error::TooLarge {
                nodes: n,
                limit: DEFAULT_NODE_LIMIT,
            });
        }
        for &fraction in fractions {
            let mut errors = Vec::with_capacity(instances);
            for i in 0..instances {
                let g = gen_complete_weighted(n, base_seed.offset(i as u64))?;
                let cutoff = NodeParam::PerNode(weight_cutoffs_from_strength(&g, fraction)?);
                let approx = weight_threshold_shapley(&g, &cutoff, brute_force_degree_limit)?;
                let oracle = brute_force_shapley(&g, &GameSpec::WeightThreshold { cutoff }, DEFAULT_NODE_LIMIT)?;
                errors.push(max_relative_error(&oracle, &approx)?);
            }
            rows.push(G5StudyRow {
                nodes: n,
                fraction,
                instances,
                error: Interval::of(&errors),
                max_error: errors.iter().copied().fold(0.0, f64::max),
            });
        }
    }
    Ok(G5Study {
        brute_force_degree_limit,
        base_seed: base_seed.0,
        rows,
    })
}

/// Overrides for a named scenario; `None` picks the scenario default.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioOptions {
    pub runs: usize,
    pub max_iter: Option<usize>,
    pub seed: u64,
    pub nodes: Option<usize>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            runs: 30,
            max_iter: None,
            seed: 1,
            nodes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ScenarioReport {
    Comparison(BenchReport),
    G5Study(G5Study),
}

impl ScenarioReport {
    pub fn to_table(&self) -> String {
        match self {
            ScenarioReport::Comparison(r) => r.to_table(),
            ScenarioReport::G5Study(s) => s.to_table(),
        }
    }

    pub fn to_csv(&self, with_time: bool) -> String {
        match self {
            ScenarioReport::Comparison(r) => r.to_csv(with_time),
            ScenarioReport::G5Study(s) => s.to_csv(),
        }
    }
}

/// Runs a named scenario from [`SCENARIOS`]. The graph is drawn with seed
/// `seed`; sampling run `r` uses seed `seed + 1 + r`.
pub fn run_scenario(name: &str, opts: &ScenarioOptions) -> Result<Vec<ScenarioReport>> {
    let seed = RngSeed(opts.seed);
    let mc_seed = seed.offset(1);
    let thresholds = [0.10, 0.05];
    let er = |default_n: usize, weighted: bool| gen_gnp_avg_degree(opts.nodes.unwrap_or(default_n), 5.0, seed, weighted);
    let compare = |g: &Graph, spec: GameSpec, default_iter: usize| -> Result<ScenarioReport> {
        let mut r = run_comparison(g, &spec, &thresholds, opts.runs, opts.max_iter.unwrap_or(default_iter), mc_seed)?;
        r.scenario = name.to_string();
        Ok(ScenarioReport::Comparison(r))
    };
    match name {
        "g1-er" => Ok(vec![compare(&er(1000, false)?, GameSpec::Fringe, 20_000)?]),
        "g2-er" => Ok(vec![compare(
            &er(1000, false)?,
            GameSpec::KThreshold { k: NodeParam::Uniform(2) },
            20_000,
        )?]),
        "g3-er" => Ok(vec![compare(
            &er(300, true)?,
            GameSpec::DistanceCutoff {
                cutoff: NodeParam::Uniform(0.5),
            },
            20_000,
        )?]),
        "g4-er" => {
            let g = er(100, true)?;
            [DecayFn::InvLinear, DecayFn::InvQuadratic, DecayFn::Exponential]
                .into_iter()
                .map(|decay| compare(&g, GameSpec::DistanceDecay { decay }, 10_000))
                .collect()
        }
        "g5-small" => {
            let sizes = match opts.nodes {
                Some(n) => vec![n],
                None => vec![6, 12],
            };
            Ok(vec![ScenarioReport::G5Study(g5_study(&sizes, &[0.25, 0.75], opts.runs, 2, seed)?)])
        }
        "g5-large" => {
            let g = gen_complete_weighted(opts.nodes.unwrap_or(200), seed)?;
            [0.25, 0.5, 0.75]
                .into_iter()
                .map(|fraction| {
                    let cutoff = NodeParam::PerNode(weight_cutoffs_from_strength(&g, fraction)?);
                    let r = compare(&g, GameSpec::WeightThreshold { cutoff }, 6_000)?;
                    Ok(match r {
                        ScenarioReport::Comparison(mut r) => {
                            r.game = format!("g5(W_cutoff={fraction}·alpha)");
                            ScenarioReport::Comparison(r)
                        }
                        other => other,
                    })
                })
                .collect()
        }
        _ => Err(Error::param(format!(
            "unknown scenario {name:?}; expected one of {}",
            SCENARIOS.join(", ")
        ))),
    }
}
