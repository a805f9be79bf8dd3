use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use netshap::approx::{weight_threshold_shapley, DEFAULT_BRUTE_FORCE_DEGREE_LIMIT};
use netshap::bench::{run_scenario, ScenarioOptions, ScenarioReport, SCENARIOS};
use netshap::exact::solve;
use netshap::games::weight_cutoffs_from_strength;
use netshap::generate::{gen_complete_weighted, gen_gnp};
use netshap::graph::{read_edge_list, write_edge_list};
use netshap::montecarlo::{mc_shapley_with, McConfig, DEFAULT_ERROR_STRIDE};
use netshap::oracle::{brute_force_shapley, DEFAULT_NODE_LIMIT};
use netshap::params::parse_node_values;
use netshap::shapley::parse_scores;
use netshap::{DecayFn, GameSpec, Graph, Method, NodeParam, RngSeed, ShapleyVector};

/// Shapley-value centrality for coalitional games on graphs.
///
/// Edge lists are whitespace separated `u v` lines (`u v w` with
/// --weighted), `#` comments and an optional `nodes N` line. Per-node
/// parameter files are `node,value` CSV. Scores are printed as
/// `node,score`, ascending node id, 12 significant digits.
#[derive(Parser, Debug)]
#[command(name = "netshap", version, about, long_about)]
struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form solvers for g1-g4, Gaussian approximation for g5.
    Exact {
        #[command(flatten)]
        game: GameArgs,
        /// g5 only: in-degrees up to this value are enumerated exactly.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_BRUTE_FORCE_DEGREE_LIMIT)]
        bf_degree_limit: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Brute-force enumeration of all coalitions (small graphs only).
    Oracle {
        #[command(flatten)]
        game: GameArgs,
        /// Refuse graphs with more nodes than this (at most 20).
        #[arg(long, value_name = "N", default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Permutation sampling estimate.
    Mc {
        #[command(flatten)]
        game: GameArgs,
        /// Number of sampled permutations.
        #[arg(long, value_name = "N")]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Score CSV to measure the error against.
        #[arg(long, value_name = "PATH")]
        reference: Option<PathBuf>,
        /// Record a trace row every N iterations.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_ERROR_STRIDE)]
        stride: usize,
        /// Write the convergence trace (iteration,elapsed_ms,max_rel_error).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        /// Leave the elapsed_ms column of the trace empty.
        #[arg(long)]
        omit_timing: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Random graph generators; output is an edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a named benchmark scenario.
    Bench {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SCENARIOS))]
        scenario: String,
        /// Sampling runs per comparison (instances per cell for g5-small).
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// Iterations per sampling run (scenario default if omitted).
        #[arg(long, value_name = "N")]
        max_iter: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Graph size (scenario default if omitted).
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Write report CSVs and per-run traces under DIR/<scenario>/.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Complete graph with U(0,1) weights.
    CompleteWeighted {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Erdős–Rényi G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw U(0,1) weights.
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        directed: bool,
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GameTag {
    G1,
    G2,
    G3,
    G4,
    G5,
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long, value_enum)]
    game: GameTag,
    /// Edge list, or `-` for standard input.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long)]
    directed: bool,
    /// Edge lines carry a third weight column.
    #[arg(long)]
    weighted: bool,
    /// g2: uniform neighbor threshold.
    #[arg(long, value_name = "N", conflicts_with = "k_file")]
    k: Option<u32>,
    /// g2: per-node thresholds.
    #[arg(long, value_name = "PATH")]
    k_file: Option<PathBuf>,
    /// g3: uniform distance cutoff.
    #[arg(long, value_name = "X", conflicts_with = "cutoff_file")]
    cutoff: Option<f64>,
    /// g3: per-node distance cutoffs.
    #[arg(long, value_name = "PATH")]
    cutoff_file: Option<PathBuf>,
    /// g4: inv-linear, inv-quadratic, exp or step:<c>.
    #[arg(long, value_name = "F")]
    decay: Option<String>,
    /// g5: uniform weight cutoff.
    #[arg(long, value_name = "X", conflicts_with_all = ["w_cutoff_file", "w_cutoff_alpha"])]
    w_cutoff: Option<f64>,
    /// g5: per-node weight cutoffs.
    #[arg(long, value_name = "PATH", conflicts_with = "w_cutoff_alpha")]
    w_cutoff_file: Option<PathBuf>,
    /// g5: cutoff = F times each node's incoming weight.
    #[arg(long, value_name = "F")]
    w_cutoff_alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write scores here instead of standard output.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Tsv,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<netshap::Error> for Failure {
    fn from(e: netshap::Error) -> Self {
        Failure::Data(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_graph(args: &GameArgs) -> CliResult<Graph> {
    let reader: Box<dyn BufRead> = if args.input == Path::new("-") {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let file = fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
        Box::new(BufReader::new(file))
    };
    read_edge_list(reader, args.directed, args.weighted)
        .with_context(|| format!("loading {}", args.input.display()))
        .map_err(Failure::Data)
}

fn per_node<T>(path: &Path, g: &Graph) -> CliResult<NodeParam<T>>
where
    T: std::str::FromStr + Copy,
{
    let text = read_text(path)?;
    let values = parse_node_values(&text, g.node_count()).with_context(|| format!("in {}", path.display()))?;
    Ok(NodeParam::PerNode(values))
}

fn game_spec(args: &GameArgs, g: &Graph) -> CliResult<GameSpec> {
    Ok(match args.game {
        GameTag::G1 => GameSpec::Fringe,
        GameTag::G2 => {
            let k = match (&args.k, &args.k_file) {
                (Some(k), _) => NodeParam::Uniform(*k),
                (None, Some(path)) => per_node(path, g)?,
                (None, None) => return Err(usage("g2 needs --k or --k-file")),
            };
            GameSpec::KThreshold { k }
        }
        GameTag::G3 => {
            let cutoff = match (&args.cutoff, &args.cutoff_file) {
                (Some(c), _) => NodeParam::Uniform(*c),
                (None, Some(path)) => per_node(path, g)?,
                (None, None) => return Err(usage("g3 needs --cutoff or --cutoff-file")),
            };
            GameSpec::DistanceCutoff { cutoff }
        }
        GameTag::G4 => {
            let name = args
                .decay
                .as_deref()
                .ok_or_else(|| usage("g4 needs --decay (inv-linear, inv-quadratic, exp or step:<c>)"))?;
            GameSpec::DistanceDecay {
                decay: DecayFn::parse(name).map_err(|e| usage(e.to_string()))?,
            }
        }
        GameTag::G5 => {
            let cutoff = match (&args.w_cutoff, &args.w_cutoff_file, &args.w_cutoff_alpha) {
                (Some(c), _, _) => NodeParam::Uniform(*c),
                (None, Some(path), _) => per_node(path, g)?,
                (None, None, Some(f)) => NodeParam::PerNode(weight_cutoffs_from_strength(g, *f)?),
                (None, None, None) => {
                    return Err(usage("g5 needs --w-cutoff, --w-cutoff-file or --w-cutoff-alpha"))
                }
            };
            GameSpec::WeightThreshold { cutoff }
        }
    })
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn emit(sv: &ShapleyVector, out: &OutputArgs) -> CliResult<()> {
    let sep = match out.format {
        Format::Csv => ',',
        Format::Tsv => '\t',
    };
    let mut w = open_output(out.output.as_deref())?;
    sv.write_delimited(&mut w, sep)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Data(e.into()))?;
    }
    match cli.command {
        Command::Exact {
            game,
            bf_degree_limit,
            out,
        } => {
            let g = load_graph(&game)?;
            let spec = game_spec(&game, &g)?;
            let sv = match &spec {
                GameSpec::WeightThreshold { cutoff } => weight_threshold_shapley(&g, cutoff, bf_degree_limit)?,
                _ => solve(&g, &spec)?,
            };
            emit(&sv, &out)
        }
        Command::Oracle { game, node_limit, out } => {
            let g = load_graph(&game)?;
            let spec = game_spec(&game, &g)?;
            emit(&brute_force_shapley(&g, &spec, node_limit)?, &out)
        }
        Command::Mc {
            game,
            iters,
            seed,
            reference,
            stride,
            trace,
            omit_timing,
            out,
        } => {
            if iters == 0 || stride == 0 {
                return Err(usage("--iters and --stride must be at least 1"));
            }
            let g = load_graph(&game)?;
            let spec = game_spec(&game, &g)?;
            let reference = match reference {
                Some(path) => {
                    let text = read_text(&path)?;
                    let scores = parse_scores(&text).with_context(|| format!("in {}", path.display()))?;
                    let method = if game.game == GameTag::G5 {
                        Method::GaussianApprox
                    } else {
                        Method::Exact
                    };
                    Some(ShapleyVector {
                        scores,
                        game: spec.clone(),
                        graph_id: g.fingerprint(),
                        method,
                    })
                }
                None => None,
            };
            let config = McConfig {
                max_iter: iters,
                seed: RngSeed(seed),
                error_stride: stride,
            };
            let (sv, tr) = mc_shapley_with(&g, &spec, config, reference.as_ref())?;
            if let Some(path) = trace {
                let mut w = open_output(Some(&path))?;
                tr.write_csv(&mut w, !omit_timing)?;
                w.flush()?;
            }
            emit(&sv, &out)
        }
        Command::Gen { kind } => {
            let (g, output) = match kind {
                GenKind::CompleteWeighted { n, seed, output } => (gen_complete_weighted(n, RngSeed(seed))?, output),
                GenKind::Gnp {
                    n,
                    p,
                    seed,
                    weighted,
                    directed,
                    output,
                } => (gen_gnp(n, p, RngSeed(seed), weighted, directed)?, output),
            };
            let mut w = open_output(output.as_deref())?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Bench {
            scenario,
            runs,
            max_iter,
            seed,
            n,
            out_dir,
        } => {
            let opts = ScenarioOptions {
                runs,
                max_iter,
                seed,
                nodes: n,
            };
            let reports = run_scenario(&scenario, &opts)?;
            let stdout = io::stdout();
            let mut console = stdout.lock();
            for r in &reports {
                writeln!(console, "{}", r.to_table())?;
            }
            if let Some(dir) = out_dir {
                save_reports(&dir.join(&scenario), &reports)?;
                writeln!(console, "reports written to {}", dir.join(&scenario).display())?;
            }
            Ok(())
        }
    }
}

fn save_reports(dir: &Path, reports: &[ScenarioReport]) -> CliResult<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut combined = String::new();
    for (i, r) in reports.iter().enumerate() {
        let csv = r.to_csv(true);
        let body = if combined.is_empty() {
            csv.as_str()
        } else {
            csv.split_once('\n').map_or("", |(_, rest)| rest)
        };
        combined.push_str(body);
        if let ScenarioReport::Comparison(report) = r {
            report.save_traces(&dir.join(format!("traces_{i}")))?;
        }
    }
    let name = match reports.first() {
        Some(ScenarioReport::G5Study(_)) => "study.csv",
        _ => "report.csv",
    };
    fs::write(dir.join(name), combined).with_context(|| format!("writing {}", dir.join(name).display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
