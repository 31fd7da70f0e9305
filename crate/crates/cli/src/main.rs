use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use gpminer::base::{compute_base_patterns, PatternStore};
use gpminer::emit::{serialize_json, serialize_rdf, write_atomic, DiscoveryRun, Hyperparameters, InputDigest};
use gpminer::miner::{discover, Checkpoint, MinerConfig, Pruning, RunOutcome, RunStatus};
use gpminer::ranges::RangeConfig;
use gpminer::rdf::{build_graph, parse_ntriples, KnowledgeGraph, ParseMode, RDF_TYPE};
use gpminer::Error;
use serde_json::json;

const EXIT_CONFIG: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_PARTIAL: u8 = 5;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Rdf,
}

/// Mine recurrent graph patterns from N-Triples files.
///
/// Exit codes: 0 done, 2 bad configuration, 3 unreadable input graph,
/// 4 I/O failure, 5 interrupted with partial results written.
#[derive(Debug, Parser)]
#[command(name = "gpminer", version)]
struct Args {
    /// N-Triples files to mine, read as one graph.
    #[arg(long, short, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    min_support: usize,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 8)]
    max_length: usize,
    #[arg(long, default_value_t = 4)]
    max_width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads [default: all cores].
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = RDF_TYPE)]
    type_predicate: String,
    /// No Gaussian ranges over numeric literals.
    #[arg(long)]
    no_numeric: bool,
    /// No Gaussian ranges over dates, times and durations.
    #[arg(long)]
    no_temporal: bool,
    /// No regular expressions over strings.
    #[arg(long)]
    no_textual: bool,
    #[arg(long, default_value_t = 5)]
    modes_max: usize,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Fraction of a string cluster its expression must match.
    #[arg(long, default_value_t = 1.0)]
    text_coverage: f64,
    /// Smallest literal population that gets value ranges (raised to the min support).
    #[arg(long, default_value_t = 20)]
    min_range_sample: usize,
    /// Keep extensions whose clauses do not all narrow the support.
    #[arg(long)]
    no_reduction_filter: bool,
    /// Only deduplicate; try every candidate everywhere. Slow, for checking.
    #[arg(long)]
    dedup_only: bool,
    /// Output path without extension; `.json` and `.nt` are appended.
    #[arg(long, default_value = "patterns")]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,rdf")]
    format: Vec<Format>,
    /// Skip malformed lines instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Record start and finish times in the run record.
    #[arg(long)]
    stamp_time: bool,
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::LiteralSubject { .. } => EXIT_PARSE,
            Error::Config(_) => EXIT_CONFIG,
            Error::Io(_) | Error::Json(_) | Error::Lineage(_) => EXIT_IO,
        };
        Failure(code, e.to_string())
    }
}

fn config(args: &Args) -> Result<(MinerConfig, RangeConfig), Failure> {
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure(EXIT_CONFIG, "--workers must be at least 1".into()));
    }
    if args.modes_max == 0 || args.restarts == 0 {
        return Err(Failure(EXIT_CONFIG, "--modes-max and --restarts must be at least 1".into()));
    }
    if !(args.text_coverage > 0.0 && args.text_coverage <= 1.0) {
        return Err(Failure(EXIT_CONFIG, "--text-coverage must lie in (0, 1]".into()));
    }
    let miner = MinerConfig {
        min_support: args.min_support,
        max_depth: args.max_depth,
        max_length: args.max_length,
        max_width: args.max_width,
        require_reduction: !args.no_reduction_filter,
        pruning: if args.dedup_only { Pruning::DedupOnly } else { Pruning::Full },
        workers,
    };
    miner.validate()?;
    let ranges = RangeConfig {
        numeric: !args.no_numeric,
        temporal: !args.no_temporal,
        textual: !args.no_textual,
        modes_max: args.modes_max,
        restarts: args.restarts,
        text_coverage: args.text_coverage,
        min_range_sample: args.min_range_sample,
    };
    Ok((miner, ranges))
}

fn load(args: &Args) -> Result<(KnowledgeGraph, Vec<InputDigest>), Failure> {
    for path in &args.input {
        if !path.is_file() {
            return Err(Failure(EXIT_CONFIG, format!("{}: no such input file", path.display())));
        }
    }
    let mode = if args.lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let mut triples = Vec::new();
    let mut digests = Vec::new();
    for path in &args.input {
        let bytes = fs::read(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?;
        let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let parsed = parse_ntriples(bytes.as_slice(), mode).map_err(|e| {
            let f = Failure::from(e);
            Failure(f.0, format!("{}: {}", path.display(), f.1))
        })?;
        if parsed.skipped > 0 {
            eprintln!("{}: skipped {} malformed lines", path.display(), parsed.skipped);
            for e in &parsed.errors {
                eprintln!("  {e}");
            }
        }
        triples.extend(parsed.triples);
        digests.push(InputDigest::of(name, &bytes));
    }
    let graph = build_graph(&triples, &args.type_predicate)?;
    Ok((graph, digests))
}

fn with_extension(out: &Path, ext: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

struct Writer<'a> {
    graph: &'a KnowledgeGraph,
    run: DiscoveryRun,
    out: &'a Path,
    formats: &'a [Format],
    stamp_time: bool,
}

impl Writer<'_> {
    fn write(&mut self, store: &PatternStore, at: &Checkpoint) -> gpminer::Result<()> {
        self.run.status = at.status;
        self.run.last_complete_depth = at.last_complete_generation;
        if self.stamp_time && at.status != RunStatus::Running {
            self.run.finished = Some(now());
        }
        for f in self.formats {
            match f {
                Format::Json => write_atomic(
                    &with_extension(self.out, "json"),
                    serialize_json(store, self.graph, self.run.clone()).as_bytes(),
                )?,
                Format::Rdf => write_atomic(
                    &with_extension(self.out, "nt"),
                    serialize_rdf(store, self.graph, &self.run).as_bytes(),
                )?,
            }
        }
        Ok(())
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn report(args: &Args, hyper: &Hyperparameters, run_id: &str, store: &PatternStore, outcome: &RunOutcome, seconds: f64) {
    let per_generation: Vec<usize> = (0..store.generations.len()).map(|g| store.generation(g).count()).collect();
    let value = json!({
        "runId": run_id,
        "status": outcome.status,
        "lastCompleteGeneration": outcome.last_complete_generation,
        "patterns": store.len(),
        "patternsPerGeneration": per_generation,
        "telemetry": outcome.telemetry,
        "configuration": {
            "inputs": args.input,
            "workers": hyper.miner.workers,
            "out": args.out,
            "format": args.format.iter().map(|f| format!("{f:?}").to_lowercase()).collect::<Vec<_>>(),
            "lenient": args.lenient,
            "hyperparameters": hyper,
        },
        "wallSeconds": (seconds * 1000.0).round() / 1000.0,
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
}

fn run(args: Args) -> Result<RunStatus, Failure> {
    let (miner, ranges) = config(&args)?;
    let started = Instant::now();
    let stamp = args.stamp_time.then(now);
    let (graph, inputs) = load(&args)?;
    eprintln!(
        "graph: {} assertions, {} resources, {} types",
        graph.assertions().len(),
        graph.dictionary().len(),
        graph.types().count()
    );

    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = stop.clone();
        if let Err(e) = ctrlc::set_handler(move || stop.store(true, Ordering::SeqCst)) {
            eprintln!("warning: no interrupt handler: {e}");
        }
    }

    let pool = worker_pool(miner.workers)?;
    let mut store = pool.install(|| compute_base_patterns(&graph, miner.min_support, &ranges, args.seed));
    let d = &store.diagnostics;
    eprintln!(
        "base: {} patterns, {} literal populations ({} too small), {} range patterns, {} unparseable literals",
        store.len(),
        d.populations,
        d.populations_too_small,
        d.range_patterns,
        d.unparseable_literals
    );

    let hyper = Hyperparameters {
        miner: miner.clone(),
        seed: args.seed,
        type_predicate: args.type_predicate.clone(),
        value_ranges: ranges,
    };
    let mut run = DiscoveryRun::new(inputs, hyper.clone());
    run.started = stamp;
    let run_id = run.run_id.clone();
    let mut writer = Writer {
        graph: &graph,
        run,
        out: &args.out,
        formats: &args.format,
        stamp_time: args.stamp_time,
    };
    let mut sink = |s: &PatternStore, at: &Checkpoint| writer.write(s, at);
    let outcome = discover(&graph, &mut store, &miner, &stop, &mut sink)?;
    report(&args, &hyper, &run_id, &store, &outcome, started.elapsed().as_secs_f64());
    match outcome.status {
        RunStatus::Aborted => Err(Failure(EXIT_IO, outcome.error.unwrap_or_default())),
        status => Ok(status),
    }
}

/// Base patterns run on the same pool size as mining.
fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure(EXIT_CONFIG, e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(RunStatus::Interrupted) => {
            eprintln!("interrupted: partial results written");
            ExitCode::from(EXIT_PARTIAL)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
