use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use thiserror::Error;

use triad_census::bench::{run_bench, BenchError, BenchPlan};
use triad_census::gen::{
    degree_histogram, fit_exponent, generate, Direction, GenError, GenSpec, Model, Preset, DEFAULT_K_MIN,
};
use triad_census::graph::{build_graph, BuildOptions, BuildOutput, GraphError, SelfLoopPolicy};
use triad_census::io::{load_graph, save_binary, save_edge_list, save_id_map, IoError};
use triad_census::kernel::{Selection, TriadCodeTable};
use triad_census::oracle::{OracleError, DEFAULT_CAP};
use triad_census::parallel::{
    census_parallel_with_stats, Accumulation, ParallelError, RunConfig, DEFAULT_CHUNK, DEFAULT_SHARDS,
};
use triad_census::verify::{cross_check, verification_corpus, VerifyError, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "triad-census", version, about = "Parallel triad census for large directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the triad census of a graph file.
    Census(CensusArgs),
    /// Write a synthetic graph as an edge list.
    Generate(GenerateArgs),
    /// Check brute force, sequential and parallel censuses against each other.
    Verify(VerifyArgs),
    /// Time the parallel census across worker counts.
    Bench(BenchArgs),
    /// Degree histogram and power-law exponent fit.
    Degrees(DegreesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LoopPolicy {
    Reject,
    Drop,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Atomic,
    Private,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fault {
    OffByOne,
}

#[derive(Debug, Args)]
struct LoadArgs {
    /// Edge-list text or binary cache.
    #[arg(long)]
    input: PathBuf,
    /// Node count override, for isolated trailing nodes.
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long, value_enum, default_value_t = LoopPolicy::Drop)]
    self_loops: LoopPolicy,
    /// Remap sparse ids to 0..n.
    #[arg(long)]
    remap: bool,
    /// Where to write the dense-to-original id map when remapping.
    #[arg(long, requires = "remap")]
    id_map: Option<PathBuf>,
    /// Also write the built graph as a binary cache.
    #[arg(long)]
    save_binary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_SHARDS)]
    shards: usize,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: usize,
    #[arg(long, value_enum, default_value_t = Mode::Atomic)]
    mode: Mode,
}

#[derive(Debug, Args)]
struct CensusArgs {
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Census output file (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Named preset; overrides model and exponent, and size unless given.
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    model: Option<Model>,
    /// Node count of the generated graph.
    #[arg(long = "nodes")]
    gen_nodes: Option<u64>,
    #[arg(long)]
    arcs: Option<u64>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl GenArgs {
    fn is_set(&self) -> bool {
        self.preset.is_some() || self.model.is_some()
    }

    fn spec(&self) -> Result<GenSpec, CliError> {
        let mut spec = match (self.preset, self.model) {
            (Some(p), _) => p.spec(self.seed),
            (None, Some(model)) => GenSpec {
                model,
                node_count: self
                    .gen_nodes
                    .ok_or_else(|| CliError::Usage("--nodes is required with --model".into()))?,
                target_arcs: self
                    .arcs
                    .ok_or_else(|| CliError::Usage("--arcs is required with --model".into()))?,
                exponent: Preset::OrkutLike.exponent(),
                seed: self.seed,
            },
            (None, None) => return Err(CliError::Usage("give --preset or --model".into())),
        };
        if let Some(n) = self.gen_nodes {
            spec.node_count = n;
        }
        if let Some(m) = self.arcs {
            spec.target_arcs = m;
        }
        if let Some(g) = self.exponent {
            spec.exponent = g;
        }
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Edge-list output file.
    #[arg(long)]
    output: PathBuf,
    /// Also write the built graph as a binary cache.
    #[arg(long)]
    save_binary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Graph to check; otherwise a generator spec or --random.
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LoopPolicy::Drop)]
    self_loops: LoopPolicy,
    #[command(flatten)]
    gen: GenArgs,
    /// Check this many seeded random graphs.
    #[arg(long)]
    random: Option<usize>,
    /// Largest node count in the random corpus.
    #[arg(long, default_value_t = 200)]
    max_nodes: u64,
    /// Brute-force node cap.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 4)]
    threads: usize,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LoopPolicy::Drop)]
    self_loops: LoopPolicy,
    #[command(flatten)]
    gen: GenArgs,
    /// Comma-separated worker counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DegreesArgs {
    #[command(flatten)]
    load: LoadArgs,
    #[arg(long, default_value = "out")]
    direction: Direction,
    #[arg(long, default_value_t = DEFAULT_K_MIN)]
    k_min: u64,
    /// Histogram CSV file (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the power-law fit as JSON here.
    #[arg(long)]
    fit: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Parallel(ParallelError::InvalidConfig(_)) => 1,
            CliError::Parallel(_) => 3,
            _ => 1,
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Oracle(e) => CliError::Oracle(e),
            VerifyError::Parallel(e) => CliError::Parallel(e),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Parallel(e) => CliError::Parallel(e),
            e @ BenchError::ChecksumMismatch { .. } => CliError::Verification(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn policy(p: LoopPolicy) -> SelfLoopPolicy {
    match p {
        LoopPolicy::Reject => SelfLoopPolicy::Reject,
        LoopPolicy::Drop => SelfLoopPolicy::Drop,
    }
}

fn run_config(workers: usize, run: &RunArgs) -> RunConfig {
    RunConfig {
        accumulation: match run.mode {
            Mode::Atomic => Accumulation::SharedAtomic,
            Mode::Private => Accumulation::WorkerPrivate,
        },
        ..RunConfig::new(workers, run.shards, run.chunk)
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn load(args: &LoadArgs) -> Result<BuildOutput, CliError> {
    let opts = BuildOptions {
        self_loops: policy(args.self_loops),
        node_count: args.nodes,
        remap: args.remap,
    };
    let started = Instant::now();
    let out = load_graph(&args.input, &opts)?;
    report_build(&out, started);
    if let (Some(path), Some(map)) = (&args.id_map, &out.id_map) {
        save_id_map(map, path)?;
    }
    if let Some(path) = &args.save_binary {
        save_binary(&out.graph, path)?;
    }
    Ok(out)
}

fn report_build(out: &BuildOutput, started: Instant) {
    if out.dropped_self_loops > 0 {
        warn!("dropped {} self-loop(s)", out.dropped_self_loops);
    }
    if out.duplicate_arcs > 0 {
        info!("collapsed {} duplicate arc(s)", out.duplicate_arcs);
    }
    info!(
        "built graph: n={} m={} entries={} in {:.3}s",
        out.graph.node_count(),
        out.graph.arc_count(),
        out.graph.entry_count(),
        started.elapsed().as_secs_f64()
    );
}

fn from_spec(spec: &GenSpec) -> Result<BuildOutput, CliError> {
    let started = Instant::now();
    let edges = generate(spec)?;
    let opts = BuildOptions {
        node_count: Some(spec.node_count),
        ..BuildOptions::default()
    };
    let out = build_graph(&edges, &opts)?;
    report_build(&out, started);
    Ok(out)
}

fn cmd_census(args: CensusArgs) -> Result<(), CliError> {
    let built = load(&args.load)?;
    let g = &built.graph;
    let cfg = run_config(args.threads.unwrap_or_else(|| RunConfig::default().workers), &args.run);
    let run = census_parallel_with_stats(g, TriadCodeTable::standard(), &cfg)?;
    eprintln!(
        "n={} m={} workers={} time={:.6}s self_loops_dropped={}",
        g.node_count(),
        g.arc_count(),
        cfg.workers,
        run.stats.wall_seconds,
        built.dropped_self_loops
    );
    let text = match args.format {
        Format::Json => run.census.to_json_pretty() + "\n",
        Format::Csv => run.census.to_csv(),
    };
    emit(args.output.as_deref(), &text)
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let spec = args.gen.spec()?;
    let edges = generate(&spec)?;
    save_edge_list(&edges, &args.output)?;
    info!("wrote {} arcs to {}", edges.len(), args.output.display());
    if let Some(path) = &args.save_binary {
        let opts = BuildOptions {
            node_count: Some(spec.node_count),
            ..BuildOptions::default()
        };
        save_binary(&build_graph(&edges, &opts)?.graph, path)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let table = TriadCodeTable::standard();
    let mut cfg = run_config(args.threads, &args.run);
    if let Some(Fault::OffByOne) = args.inject_fault {
        cfg.selection = Selection::OffByOne;
    }
    let mut report = VerifyReport::new(table);

    if let Some(count) = args.random {
        for (label, spec) in verification_corpus(count, args.max_nodes, args.gen.seed) {
            let built = from_spec(&spec)?;
            report.add(cross_check(&label, &built.graph, table, &cfg, args.cap)?);
        }
    } else {
        let (label, built) = match &args.input {
            Some(path) => {
                let opts = BuildOptions {
                    self_loops: policy(args.self_loops),
                    node_count: None,
                    remap: false,
                };
                (path.display().to_string(), load_graph(path, &opts)?)
            }
            None if args.gen.is_set() => ("generated".to_string(), from_spec(&args.gen.spec()?)?),
            None => return Err(CliError::Usage("give --input, --random or a generator spec".into())),
        };
        report.add(cross_check(&label, &built.graph, table, &cfg, args.cap)?);
    }

    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(None, &json)?;
    if report.passed {
        Ok(())
    } else {
        let first = report
            .mismatches
            .first()
            .map(|m| m.input.clone())
            .or_else(|| report.code_table.mismatches.first().map(|m| m.input.clone()))
            .unwrap_or_default();
        Err(CliError::Verification(format!("first difference: {first}")))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let (source, built) = match &args.input {
        Some(path) => {
            let opts = BuildOptions {
                self_loops: policy(args.self_loops),
                ..BuildOptions::default()
            };
            let started = Instant::now();
            let out = load_graph(path, &opts)?;
            report_build(&out, started);
            (path.display().to_string(), out)
        }
        None if args.gen.is_set() => {
            let spec = args.gen.spec()?;
            let source = match args.gen.preset {
                Some(p) => format!("{p} seed={}", spec.seed),
                None => format!("{:?} n={} m={} seed={}", spec.model, spec.node_count, spec.target_arcs, spec.seed),
            };
            (source, from_spec(&spec)?)
        }
        None => return Err(CliError::Usage("give --input or a generator spec".into())),
    };
    let cfg = run_config(1, &args.run);
    let plan = BenchPlan {
        threads: args.threads.clone(),
        shards: cfg.shards,
        chunk_size: cfg.chunk_size,
        accumulation: cfg.accumulation,
        repeats: args.repeats,
    };
    let result = run_bench(&built.graph, TriadCodeTable::standard(), &plan, &source)?;
    for r in &result.rows {
        eprintln!(
            "workers={:<3} median={:.4}s speedup={:.2} checksum={}",
            r.workers, r.median_seconds, r.speedup, r.checksum
        );
    }
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&result).expect("bench result serializes") + "\n",
        Format::Csv => result.to_csv(),
    };
    emit(args.output.as_deref(), &text)
}

fn cmd_degrees(args: DegreesArgs) -> Result<(), CliError> {
    let built = load(&args.load)?;
    let hist = degree_histogram(&built.graph, args.direction);
    emit(args.output.as_deref(), &hist.to_csv())?;
    match fit_exponent(&hist, args.k_min) {
        Ok(fit) => {
            eprintln!(
                "exponent={:.4} k_min={} samples={} ks={:.4} poor_fit={}",
                fit.exponent, fit.k_min, fit.sample_size, fit.ks_distance, fit.poor_fit
            );
            if let Some(path) = &args.fit {
                let json = serde_json::to_string_pretty(&fit).expect("fit serializes") + "\n";
                emit(Some(path), &json)?;
            }
        }
        Err(e) if args.fit.is_none() => warn!("{e}"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Census(a) => cmd_census(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Degrees(a) => cmd_degrees(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
