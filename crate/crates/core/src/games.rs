//! The five coalitional games played on a graph and their characteristic
//! functions.
//!
//! | tag | game                | a node is counted (or contributes) when ...                  |
//! |-----|---------------------|--------------------------------------------------------------|
//! | g1  | [`GameSpec::Fringe`]          | it is in `C` or has an in-neighbor in `C`          |
//! | g2  | [`GameSpec::KThreshold`]      | it is in `C` or has at least `k(v)` in-neighbors in `C` |
//! | g3  | [`GameSpec::DistanceCutoff`]  | some member of `C` reaches it within `d_cutoff(v)` |
//! | g4  | [`GameSpec::DistanceDecay`]   | it adds `f(min distance from C)`                   |
//! | g5  | [`GameSpec::WeightThreshold`] | it is in `C` or its in-edge weight from `C` is `>= W_cutoff(v)` |
//!
//! On undirected graphs "in-neighbor" is simply "neighbor". Distances run from
//! the coalition towards the counted node.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, NodeId};
use crate::params::NodeParam;

type DecayClosure = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Non-increasing, nonnegative distance decay with `f(0) > 0` and
/// `f(+inf) = 0`.
#[derive(Clone)]
pub enum DecayFn {
    /// `1 / (1 + d)`
    InvLinear,
    /// `1 / (1 + d^2)`
    InvQuadratic,
    /// `exp(-d)`
    Exponential,
    /// `1` if `d <= c`, else `0`.
    Step(f64),
    Custom { name: String, f: DecayClosure },
}

impl fmt::Debug for DecayFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl DecayFn {
    pub fn step(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::param(format!("step decay threshold must be finite and >= 0, got {c}")));
        }
        Ok(DecayFn::Step(c))
    }

    /// Wraps an arbitrary function after probing it on a grid of distances
    /// for the decay contract.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        let f0 = f(0.0);
        if !(f0.is_finite() && f0 > 0.0) {
            return Err(Error::param(format!("decay `{name}`: f(0) must be positive and finite, got {f0}")));
        }
        let mut prev = f0;
        let mut d = 1e-6;
        while d < 1e9 {
            let y = f(d);
            if !(y.is_finite() && y >= 0.0) {
                return Err(Error::param(format!("decay `{name}`: f({d}) = {y} is not a nonnegative number")));
            }
            if y > prev {
                return Err(Error::param(format!("decay `{name}` increases at d = {d}")));
            }
            prev = y;
            d *= 1.05;
        }
        Ok(DecayFn::Custom { name, f: Arc::new(f) })
    }

    /// Piecewise-linear decay through `(distance, value)` knots; the first
    /// knot must sit at distance 0 and the last value is held beyond the last
    /// knot.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() || knots[0].0 != 0.0 {
            return Err(Error::param("tabulated decay needs a first knot at distance 0"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::param("tabulated decay distances must increase strictly"));
            }
        }
        let table = knots.clone();
        Self::custom("table", move |d| {
            let i = table.partition_point(|&(x, _)| x <= d);
            if i == table.len() {
                return table[i - 1].1;
            }
            let (x0, y0) = table[i - 1];
            let (x1, y1) = table[i];
            y0 + (y1 - y0) * (d - x0) / (x1 - x0)
        })
    }

    /// Parses the command-line names `inv-linear`, `inv-quadratic`, `exp`
    /// and `step:<c>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inv-linear" => Ok(DecayFn::InvLinear),
            "inv-quadratic" => Ok(DecayFn::InvQuadratic),
            "exp" => Ok(DecayFn::Exponential),
            _ => match s.strip_prefix("step:") {
                Some(c) => {
                    let c: f64 = c
                        .parse()
                        .map_err(|_| Error::param(format!("bad step threshold in `{s}`")))?;
                    DecayFn::step(c)
                }
                None => Err(Error::param(format!(
                    "unknown decay `{s}` (expected inv-linear, inv-quadratic, exp or step:<c>)"
                ))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            DecayFn::InvLinear => "inv-linear".into(),
            DecayFn::InvQuadratic => "inv-quadratic".into(),
            DecayFn::Exponential => "exp".into(),
            DecayFn::Step(c) => format!("step:{c}"),
            DecayFn::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    #[inline]
    pub fn eval(&self, d: f64) -> f64 {
        if d == f64::INFINITY {
            return 0.0;
        }
        match self {
            DecayFn::InvLinear => 1.0 / (1.0 + d),
            DecayFn::InvQuadratic => 1.0 / (1.0 + d * d),
            DecayFn::Exponential => (-d).exp(),
            DecayFn::Step(c) => {
                if d <= *c {
                    1.0
                } else {
                    0.0
                }
            }
            DecayFn::Custom { f, .. } => f(d),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GameSpec {
    /// g1: size of the one-hop fringe.
    Fringe,
    /// g2: nodes in `C` or with at least `k(v)` neighbors in `C`.
    KThreshold { k: NodeParam<u32> },
    /// g3: nodes within `d_cutoff(v)` of `C`.
    DistanceCutoff { cutoff: NodeParam<f64> },
    /// g4: sum of `f(distance(v, C))`.
    DistanceDecay { decay: DecayFn },
    /// g5: nodes in `C` or with incident weight from `C` at least `W_cutoff(v)`.
    WeightThreshold { cutoff: NodeParam<f64> },
}

impl GameSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            GameSpec::Fringe => "g1",
            GameSpec::KThreshold { .. } => "g2",
            GameSpec::DistanceCutoff { .. } => "g3",
            GameSpec::DistanceDecay { .. } => "g4",
            GameSpec::WeightThreshold { .. } => "g5",
        }
    }

    pub fn needs_distances(&self) -> bool {
        matches!(self, GameSpec::DistanceCutoff { .. } | GameSpec::DistanceDecay { .. })
    }

    /// Checks the parameters against `g` and expands per-node maps.
    pub(crate) fn resolve(&self, g: &Graph) -> Result<Resolved> {
        let n = g.node_count();
        Ok(match self {
            GameSpec::Fringe => Resolved::None,
            GameSpec::KThreshold { k } => {
                let ks = k.resolve(n)?;
                for (v, &kv) in ks.iter().enumerate() {
                    if kv == 0 {
                        return Err(Error::param(format!("k({v}) must be at least 1")));
                    }
                    // A uniform k larger than 1 + deg(v) behaves exactly like
                    // 1 + deg(v); an explicit per-node value must be in range.
                    if !k.is_uniform() && kv as usize > 1 + g.in_degree(v) {
                        return Err(Error::param(format!(
                            "k({v}) = {kv} exceeds 1 + degree = {}",
                            1 + g.in_degree(v)
                        )));
                    }
                }
                Resolved::K(ks)
            }
            GameSpec::DistanceCutoff { cutoff } => Resolved::Cutoff(positive(cutoff.resolve(n)?, "d_cutoff")?),
            GameSpec::DistanceDecay { decay } => Resolved::Decay(decay.clone()),
            GameSpec::WeightThreshold { cutoff } => {
                Resolved::Cutoff(positive(cutoff.resolve(n)?, "W_cutoff")?)
            }
        })
    }
}

fn positive(values: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    for (v, &x) in values.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::param(format!("{what}({v}) must be positive and finite, got {x}")));
        }
    }
    Ok(values)
}

#[derive(Debug, Clone)]
pub(crate) enum Resolved {
    None,
    K(Vec<u32>),
    Cutoff(Vec<f64>),
    Decay(DecayFn),
}

/// Sum of incoming edge weights for every node (the node's "strength").
pub fn node_strengths(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|v| g.in_weights(v).iter().sum())
        .collect()
}

/// `W_cutoff(v) = fraction * strength(v)`. Nodes without incoming weight
/// get `fraction` instead; any positive cutoff is equivalent for them.
pub fn weight_cutoffs_from_strength(g: &Graph, fraction: f64) -> Result<Vec<f64>> {
    if !(fraction.is_finite() && fraction > 0.0) {
        return Err(Error::param(format!("strength fraction must be positive, got {fraction}")));
    }
    Ok(node_strengths(g)
        .into_iter()
        .map(|a| if a > 0.0 { fraction * a } else { fraction })
        .collect())
}

/// A subset of the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalition {
    mask: Vec<bool>,
    members: Vec<NodeId>,
}

impl Coalition {
    pub fn empty(node_count: usize) -> Self {
        Coalition {
            mask: vec![false; node_count],
            members: Vec::new(),
        }
    }

    pub fn grand(node_count: usize) -> Self {
        Coalition {
            mask: vec![true; node_count],
            members: (0..node_count).collect(),
        }
    }

    pub fn from_members<I: IntoIterator<Item = NodeId>>(node_count: usize, members: I) -> Result<Self> {
        let mut c = Coalition::empty(node_count);
        for v in members {
            if v >= node_count {
                return Err(Error::InvalidNode { node: v, node_count });
            }
            c.insert(v);
        }
        Ok(c)
    }

    /// Bit `i` of `bits` selects node `i`.
    pub fn from_bits(node_count: usize, bits: u64) -> Self {
        debug_assert!(node_count <= 64);
        let mut c = Coalition::empty(node_count);
        for v in 0..node_count {
            if bits >> v & 1 == 1 {
                c.insert(v);
            }
        }
        c
    }

    pub fn insert(&mut self, v: NodeId) {
        if !self.mask[v] {
            self.mask[v] = true;
            self.members.push(v);
        }
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.mask[v]
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.mask.len()
    }
}

/// A game bound to a graph with validated parameters and, for the distance
/// games, the all-pairs distance table.
#[derive(Debug, Clone)]
pub struct Game<'g> {
    graph: &'g Graph,
    spec: GameSpec,
    params: Resolved,
    distances: Option<Arc<DistanceMatrix>>,
}

impl<'g> Game<'g> {
    pub fn new(graph: &'g Graph, spec: GameSpec) -> Result<Self> {
        let distances = spec
            .needs_distances()
            .then(|| Arc::new(DistanceMatrix::all_pairs(graph)));
        Self::build(graph, spec, distances)
    }

    /// Reuses a precomputed distance table (ignored by games that do not
    /// need one).
    pub fn with_distances(graph: &'g Graph, spec: GameSpec, distances: Arc<DistanceMatrix>) -> Result<Self> {
        if distances.node_count() != graph.node_count() {
            return Err(Error::LengthMismatch {
                expected: graph.node_count(),
                actual: distances.node_count(),
            });
        }
        let distances = spec.needs_distances().then_some(distances);
        Self::build(graph, spec, distances)
    }

    fn build(graph: &'g Graph, spec: GameSpec, distances: Option<Arc<DistanceMatrix>>) -> Result<Self> {
        let params = spec.resolve(graph)?;
        Ok(Game {
            graph,
            spec,
            params,
            distances,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn distances(&self) -> Option<&DistanceMatrix> {
        self.distances.as_deref()
    }

    /// `nu(C)`. Panics if the coalition was built for a different node count;
    /// use [`characteristic_value`] for a checked entry point.
    pub fn value(&self, c: &Coalition) -> f64 {
        assert_eq!(c.node_count(), self.graph.node_count());
        if c.is_empty() {
            return 0.0;
        }
        let g = self.graph;
        let n = g.node_count();
        match (&self.spec, &self.params) {
            (GameSpec::Fringe, _) => (0..n)
                .filter(|&v| c.contains(v) || g.in_neighbors(v).iter().any(|&u| c.contains(u)))
                .count() as f64,
            (GameSpec::KThreshold { .. }, Resolved::K(k)) => (0..n)
                .filter(|&v| {
                    c.contains(v)
                        || g.in_neighbors(v).iter().filter(|&&u| c.contains(u)).count() >= k[v] as usize
                })
                .count() as f64,
            (GameSpec::DistanceCutoff { .. }, Resolved::Cutoff(cut)) => {
                let d = self.distances.as_ref().expect("distance table");
                (0..n)
                    .filter(|&v| c.members().iter().any(|&m| d.get(m, v) <= cut[v]))
                    .count() as f64
            }
            (GameSpec::DistanceDecay { .. }, Resolved::Decay(f)) => {
                let d = self.distances.as_ref().expect("distance table");
                (0..n)
                    .map(|v| {
                        let nearest = c
                            .members()
                            .iter()
                            .map(|&m| d.get(m, v))
                            .fold(f64::INFINITY, f64::min);
                        f.eval(nearest)
                    })
                    .sum()
            }
            (GameSpec::WeightThreshold { .. }, Resolved::Cutoff(cut)) => (0..n)
                .filter(|&v| {
                    c.contains(v)
                        || g
                            .in_edges(v)
                            .filter(|&(u, _)| c.contains(u))
                            .map(|(_, w)| w)
                            .sum::<f64>()
                            >= cut[v]
                })
                .count() as f64,
            _ => unreachable!("parameters resolved for a different game"),
        }
    }

    /// `nu(V)`.
    pub fn grand_value(&self) -> f64 {
        self.value(&Coalition::grand(self.graph.node_count()))
    }
}

/// Checked one-shot evaluation of `nu(C)`. `ctx` may carry an all-pairs
/// distance table for the distance games; otherwise one is computed.
pub fn characteristic_value(
    g: &Graph,
    spec: &GameSpec,
    c: &Coalition,
    ctx: Option<&DistanceMatrix>,
) -> Result<f64> {
    if c.node_count() != g.node_count() {
        return Err(Error::LengthMismatch {
            expected: g.node_count(),
            actual: c.node_count(),
        });
    }
    let game = match ctx {
        Some(d) => Game::with_distances(g, spec.clone(), Arc::new(d.clone()))?,
        None => Game::new(g, spec.clone())?,
    };
    Ok(game.value(c))
}
