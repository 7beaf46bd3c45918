use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use streamgraph_cli::adjacency::{emit_adjacency, load_graph};
use streamgraph_cli::queries::{lookup, QueryCtx};
use streamgraph_cli::rmat::{to_adjacency, RmatParams};
use streamgraph_cli::stats::measure;
use streamgraph_cli::stream::{run_stream, StreamConfig};
use streamgraph_cli::updates::{parse_updates, UpdateOp};
use streamgraph_cli::CliError;
use streamgraph_core::algorithms::TraversalOpts;
use streamgraph_core::graph::GraphVersion;

/// Streaming-graph toolbox: ingest graphs, run traversal benchmarks, apply
/// concurrent update streams, and report memory statistics.
#[derive(Parser)]
#[command(name = "streamgraph", version, about)]
struct Cli {
    /// Emit one JSON object {command, params, results, timings} instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Breadth-first search from a source, timed over several rounds.
    BenchBfs {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        src: u64,
        /// Skip the per-query flat snapshot.
        #[arg(long)]
        no_flat_snapshot: bool,
        /// Never switch to dense (pull) traversal.
        #[arg(long)]
        no_direction_opt: bool,
        #[arg(long, default_value_t = 3)]
        rounds: u32,
        /// Expected chunk size for edge sets.
        #[arg(long, default_value_t = 256)]
        b: u64,
        /// Insert each edge in both directions at ingestion.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Single-source betweenness dependency scores.
    BenchBc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        src: u64,
        #[arg(long, default_value_t = 256)]
        b: u64,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Maximal independent set with per-seed deterministic priorities.
    BenchMis {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        b: u64,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Vertices within two hops of a source.
    TwoHop {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        src: u64,
        #[arg(long, default_value_t = 256)]
        b: u64,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Apply an update stream with one writer while query threads read.
    Stream {
        #[arg(long)]
        graph: PathBuf,
        /// Update file: lines of `+ u v` / `- u v`, `#` comments.
        #[arg(long, conflicts_with = "rmat")]
        updates: Option<PathBuf>,
        /// Synthetic insert stream: LOGN,M,A,B,C.
        #[arg(long)]
        rmat: Option<String>,
        #[arg(long)]
        batch_size: usize,
        /// Query kernel to run concurrently: bfs|none.
        #[arg(long, default_value = "none")]
        query: String,
        #[arg(long, default_value_t = 0)]
        query_threads: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        b: u64,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Memory statistics under the three storage models.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 256)]
        b: u64,
        #[arg(long)]
        symmetrize: bool,
    },
    /// Generate a synthetic graph file from the recursive-matrix model.
    Rmat {
        #[arg(long)]
        log_n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(
    json: bool,
    command: &str,
    params: serde_json::Value,
    results: serde_json::Value,
    timings: serde_json::Value,
) {
    if json {
        let report = serde_json::json!({
            "command": command,
            "params": params,
            "results": results,
            "timings": timings,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        println!("== {command} ==");
        println!("params:  {params}");
        println!("results: {results}");
        println!("timings: {timings}");
    }
}

fn load(path: &std::path::Path, symmetrize: bool, b: u64) -> Result<(GraphVersion, f64), CliError> {
    let begin = Instant::now();
    let g = load_graph(path, symmetrize, b)?;
    Ok((g, begin.elapsed().as_secs_f64()))
}

fn parse_rmat_spec(spec: &str, seed: u64) -> Result<RmatParams, CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 5 {
        return Err(CliError::Invalid(format!(
            "--rmat expects LOGN,M,A,B,C, got '{spec}'"
        )));
    }
    let params = RmatParams {
        log_n: parts[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid("rmat LOGN must be an integer".into()))?,
        m: parts[1]
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid("rmat M must be an integer".into()))?,
        a: parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid("rmat A must be a float".into()))?,
        b: parts[3]
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid("rmat B must be a float".into()))?,
        c: parts[4]
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid("rmat C must be a float".into()))?,
        seed,
    };
    params.validate()?;
    Ok(params)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::BenchBfs {
            graph,
            src,
            no_flat_snapshot,
            no_direction_opt,
            rounds,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let opts = TraversalOpts {
                use_flat_snapshot: !no_flat_snapshot,
                direction_opt: !no_direction_opt,
            };
            let q = lookup("bfs").expect("registered");
            let ctx = QueryCtx { src, seed: 0, opts };
            let mut times = Vec::new();
            let mut out = None;
            for _ in 0..rounds.max(1) {
                let begin = Instant::now();
                out = Some(q.run(&g, &ctx)?);
                times.push(begin.elapsed().as_secs_f64());
            }
            let out = out.expect("at least one round");
            let (n, m) = g.counts();
            emit(
                cli.json,
                "bench-bfs",
                serde_json::json!({
                    "graph": graph.display().to_string(), "src": src, "b": b,
                    "symmetrize": symmetrize, "rounds": rounds,
                    "flat_snapshot": !no_flat_snapshot, "direction_opt": !no_direction_opt,
                }),
                serde_json::json!({
                    "n": n, "m": m,
                    "summary": out.summary(),
                    "digest": format!("{:016x}", out.digest()),
                }),
                serde_json::json!({
                    "load_s": load_s,
                    "query_mean_s": times.iter().sum::<f64>() / times.len() as f64,
                    "query_min_s": times.iter().copied().fold(f64::INFINITY, f64::min),
                }),
            );
        }
        Cmd::BenchBc {
            graph,
            src,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let q = lookup("bc").expect("registered");
            let ctx = QueryCtx {
                src,
                seed: 0,
                opts: TraversalOpts::default(),
            };
            let begin = Instant::now();
            let out = q.run(&g, &ctx)?;
            let query_s = begin.elapsed().as_secs_f64();
            let (n, m) = g.counts();
            emit(
                cli.json,
                "bench-bc",
                serde_json::json!({
                    "graph": graph.display().to_string(), "src": src, "b": b,
                    "symmetrize": symmetrize,
                }),
                serde_json::json!({
                    "n": n, "m": m,
                    "summary": out.summary(),
                    "digest": format!("{:016x}", out.digest()),
                }),
                serde_json::json!({"load_s": load_s, "query_s": query_s}),
            );
        }
        Cmd::BenchMis {
            graph,
            seed,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let q = lookup("mis").expect("registered");
            let ctx = QueryCtx {
                src: 0,
                seed,
                opts: TraversalOpts::default(),
            };
            let begin = Instant::now();
            let out = q.run(&g, &ctx)?;
            let query_s = begin.elapsed().as_secs_f64();
            let (n, m) = g.counts();
            emit(
                cli.json,
                "bench-mis",
                serde_json::json!({
                    "graph": graph.display().to_string(), "seed": seed, "b": b,
                    "symmetrize": symmetrize,
                }),
                serde_json::json!({
                    "n": n, "m": m,
                    "summary": out.summary(),
                    "digest": format!("{:016x}", out.digest()),
                }),
                serde_json::json!({"load_s": load_s, "query_s": query_s}),
            );
        }
        Cmd::TwoHop {
            graph,
            src,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let q = lookup("two-hop").expect("registered");
            let ctx = QueryCtx {
                src,
                seed: 0,
                opts: TraversalOpts::default(),
            };
            let begin = Instant::now();
            let out = q.run(&g, &ctx)?;
            let query_s = begin.elapsed().as_secs_f64();
            emit(
                cli.json,
                "two-hop",
                serde_json::json!({
                    "graph": graph.display().to_string(), "src": src, "b": b,
                    "symmetrize": symmetrize,
                }),
                serde_json::json!({
                    "summary": out.summary(),
                    "digest": format!("{:016x}", out.digest()),
                }),
                serde_json::json!({"load_s": load_s, "query_s": query_s}),
            );
        }
        Cmd::Stream {
            graph,
            updates,
            rmat,
            batch_size,
            query,
            query_threads,
            seed,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let ops: Vec<UpdateOp> = match (&updates, &rmat) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)?;
                    parse_updates(&text, &path.display().to_string())?
                }
                (None, Some(spec)) => {
                    let params = parse_rmat_spec(spec, seed)?;
                    streamgraph_cli::rmat::generate(&params)?
                        .into_iter()
                        .map(|(u, v)| UpdateOp::Insert(u, v))
                        .collect()
                }
                _ => {
                    return Err(CliError::Invalid(
                        "stream needs exactly one of --updates or --rmat".into(),
                    ))
                }
            };
            let query_kernel = match query.as_str() {
                "none" => None,
                name => Some(lookup(name).ok_or_else(|| {
                    CliError::Invalid(format!("unknown query '{name}' (try bfs|none)"))
                })?),
            };
            let cfg = StreamConfig {
                batch_size,
                query: query_kernel,
                query_threads,
                seed,
                verify: true,
                reader_pause_ms: 0,
            };
            let begin = Instant::now();
            let report = run_stream(&g, &ops, &cfg)?;
            let total_s = begin.elapsed().as_secs_f64();
            if report.consistency_violations > 0 || report.oracle_final_matches == Some(false) {
                return Err(CliError::Invalid(format!(
                    "consistency check failed: {} violations, final matches: {:?}",
                    report.consistency_violations, report.oracle_final_matches
                )));
            }
            emit(
                cli.json,
                "stream",
                serde_json::json!({
                    "graph": graph.display().to_string(),
                    "updates": updates.map(|p| p.display().to_string()),
                    "rmat": rmat,
                    "batch_size": batch_size, "query": query,
                    "query_threads": query_threads, "seed": seed, "b": b,
                    "symmetrize": symmetrize,
                }),
                report.to_json(),
                serde_json::json!({"load_s": load_s, "total_s": total_s,
                                   "update_wall_s": report.update_wall_s}),
            );
        }
        Cmd::Stats {
            graph,
            b,
            symmetrize,
        } => {
            let (g, load_s) = load(&graph, symmetrize, b)?;
            let begin = Instant::now();
            let stats = measure(&g);
            let measure_s = begin.elapsed().as_secs_f64();
            emit(
                cli.json,
                "stats",
                serde_json::json!({
                    "graph": graph.display().to_string(), "b": b, "symmetrize": symmetrize,
                }),
                stats.to_json(),
                serde_json::json!({"load_s": load_s, "measure_s": measure_s}),
            );
        }
        Cmd::Rmat {
            log_n,
            m,
            a,
            b,
            c,
            seed,
            out,
        } => {
            let params = RmatParams {
                log_n,
                m,
                a,
                b,
                c,
                seed,
            };
            let begin = Instant::now();
            let adj = to_adjacency(&params, false)?;
            let text = emit_adjacency(&adj);
            std::fs::write(&out, text)?;
            let gen_s = begin.elapsed().as_secs_f64();
            let edges: usize = adj.iter().map(Vec::len).sum();
            emit(
                cli.json,
                "rmat",
                serde_json::json!({
                    "log_n": log_n, "m": m, "a": a, "b": b, "c": c, "seed": seed,
                    "out": out.display().to_string(),
                }),
                serde_json::json!({"n": adj.len(), "distinct_edges": edges}),
                serde_json::json!({"generate_s": gen_s}),
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
