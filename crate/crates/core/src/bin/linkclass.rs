use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use linkclass::graph::{load_edge_list, write_edge_list};
use linkclass::harness::{
    clean_directed_snapshot, generate_planted_graph, run_experiment, stats, write_outputs,
    Algorithm, ExperimentConfig, GeneratorSpec, InputSpec, PositiveClass, OUTPUT_DIR_ENV,
};
use linkclass::labeling::{p_stochastic_flip, FlipMode, LabelAssignment};
use linkclass::{Error, Result, SignedGraph};

const USAGE_ERROR: u8 = 1;
const TRIAL_FAILURE: u8 = 2;

/// Active learning of edge signs in signed graphs.
#[derive(Parser)]
#[command(name = "linkclass", version)]
struct Cli {
    /// Directory for files whose path is not given explicitly.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a connected graph with a planted two-clustering.
    Generate(GenerateArgs),
    /// Turn a directed snapshot into an undirected connected edge list.
    Clean(CleanArgs),
    /// Print graph statistics as JSON.
    Stats(StatsArgs),
    /// Flip edge signs p-stochastically and write the result.
    Perturb(PerturbArgs),
    /// Run seeded trials of one learner.
    Run(RunArgs),
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    edges: usize,
    /// Fraction of nodes in the first cluster.
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    /// Target fraction of negative edges.
    #[arg(long)]
    negative_fraction: Option<f64>,
    #[arg(long = "graph-seed", default_value_t = 0)]
    graph_seed: u64,
}

impl GeneratorArgs {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            nodes: self.nodes,
            target_edges: self.edges,
            cluster_split: self.split,
            negative_fraction_target: self.negative_fraction,
            seed: self.graph_seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Edge list to write; `<output-dir>/planted.txt` by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CleanArgs {
    /// Directed signed edge list.
    #[arg(long)]
    input: PathBuf,
    /// Edge list to write; `<output-dir>/cleaned.txt` by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Also compute the diameter (one BFS per node).
    #[arg(long)]
    diameter: bool,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "iid")]
    flip_mode: FlipMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list to write; `<output-dir>/perturbed.txt` by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algorithm: Algorithm,
    /// Treelet height for treecutter and treeletstar.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value = "iid")]
    flip_mode: FlipMode,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list whose signs are the ground truth. Without it a planted
    /// graph is generated from the generator flags.
    #[arg(long, conflicts_with_all = ["nodes", "edges"])]
    input: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    #[arg(long)]
    negative_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    /// Directory for trials.csv and summary.json; `<output-dir>` by default.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "minority")]
    positive_class: PositiveClass,
    /// Spanning tree root; the highest-degree node by default.
    #[arg(long)]
    root: Option<usize>,
    /// Grow the spanning tree in edge-list order instead of a random one.
    #[arg(long)]
    no_shuffle: bool,
    /// Write 0 for elapsed_ms so that outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(Error),
    Trials(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Generate(a) => generate(&cli.output_dir, a).map_err(Failure::from),
        Command::Clean(a) => clean(&cli.output_dir, a).map_err(Failure::from),
        Command::Stats(a) => print_stats(a).map_err(Failure::from),
        Command::Perturb(a) => perturb(&cli.output_dir, a).map_err(Failure::from),
        Command::Run(a) => run(&cli.output_dir, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
        Err(Failure::Trials(n)) => {
            eprintln!("error: {n} trial(s) failed");
            ExitCode::from(TRIAL_FAILURE)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_graph(path: &Path, g: &SignedGraph, ids: Option<&[u64]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_edge_list(&mut out, g, ids)?;
    out.flush()?;
    Ok(())
}

fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn load(path: &Path) -> Result<SignedGraph> {
    Ok(load_edge_list(BufReader::new(File::open(path)?))?.graph)
}

#[derive(Serialize)]
struct ClusteringSidecar<'a> {
    spec: &'a GeneratorSpec,
    negative_fraction: f64,
    skeleton_edges: usize,
    regenerations: usize,
    /// Cluster of every node, 0 or 1.
    sides: Vec<u8>,
}

fn generate(dir: &Path, a: &GenerateArgs) -> Result<()> {
    let spec = a.generator.spec();
    let planted = generate_planted_graph(&spec)?;
    let path = a.out.clone().unwrap_or_else(|| dir.join("planted.txt"));
    write_graph(&path, &planted.graph, None)?;
    let sidecar = ClusteringSidecar {
        spec: &spec,
        negative_fraction: planted.negative_fraction,
        skeleton_edges: planted.skeleton_edges,
        regenerations: planted.regenerations,
        sides: planted.clustering.side.iter().map(|&s| s as u8).collect(),
    };
    write_json(&sidecar_path(&path, ".clustering.json"), &sidecar)?;
    eprintln!(
        "wrote {} ({} nodes, {} edges, {:.1}% negative)",
        path.display(),
        planted.graph.node_count(),
        planted.graph.edge_count(),
        100.0 * planted.negative_fraction
    );
    Ok(())
}

fn clean(dir: &Path, a: &CleanArgs) -> Result<()> {
    let cleaned = clean_directed_snapshot(BufReader::new(File::open(&a.input)?))?;
    let path = a.out.clone().unwrap_or_else(|| dir.join("cleaned.txt"));
    write_graph(&path, &cleaned.graph, Some(&cleaned.original_ids))?;
    print_json(&cleaned.report)
}

fn print_stats(a: &StatsArgs) -> Result<()> {
    print_json(&stats(&load(&a.input)?, a.diameter))
}

fn perturb(dir: &Path, a: &PerturbArgs) -> Result<()> {
    let g = load(&a.input)?;
    let base = LabelAssignment::unperturbed(g.signs().to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let labels = p_stochastic_flip(&base, a.p, a.flip_mode, &mut rng)?;
    let path = a.out.clone().unwrap_or_else(|| dir.join("perturbed.txt"));
    write_graph(&path, &labels.realize(g.graph())?, None)?;
    write_json(&sidecar_path(&path, ".labels.json"), &labels.sidecar(Some(a.seed)))
}

fn run(dir: &Path, a: &RunArgs) -> std::result::Result<(), Failure> {
    let input = match (&a.input, a.nodes, a.edges) {
        (Some(path), _, _) => InputSpec::File(path.clone()),
        (None, Some(nodes), Some(edges)) => InputSpec::Generate(GeneratorSpec {
            nodes,
            target_edges: edges,
            cluster_split: a.split,
            negative_fraction_target: a.negative_fraction,
            seed: a.graph_seed,
        }),
        _ => {
            return Err(Failure::Usage(Error::InvalidParameter(
                "give either --input or both --nodes and --edges".into(),
            )))
        }
    };
    let out_dir = a.out.clone().unwrap_or_else(|| dir.to_path_buf());
    let mut cfg = ExperimentConfig::new(a.algorithm, input);
    cfg.k = a.k.or(cfg.k);
    cfg.p = a.p;
    cfg.flip_mode = a.flip_mode;
    cfg.trials = a.trials;
    cfg.master_seed = a.seed;
    cfg.output = Some(out_dir.clone());
    cfg.positive_class = a.positive_class;
    cfg.root = a.root;
    cfg.shuffle_neighbors = !a.no_shuffle;
    cfg.record_timing = !a.no_timing;
    cfg.threads = a.threads;

    let outcome = run_experiment(&cfg)?;
    let (csv, json) = write_outputs(&outcome, &out_dir)?;
    let s = &outcome.summary;
    eprintln!(
        "{}: {} trials, mistakes {:.2} ± {:.2} (floor {:.2}), F {:.3}, queries {:.1}",
        cfg.algorithm,
        s.trials,
        s.mistakes.mean,
        s.mistakes.sd,
        s.mistake_lower_bound,
        s.f_measure.mean,
        s.query_count.mean
    );
    eprintln!("wrote {} and {}", csv.display(), json.display());
    if outcome.failed() {
        return Err(Failure::Trials(outcome.failures.len()));
    }
    Ok(())
}
