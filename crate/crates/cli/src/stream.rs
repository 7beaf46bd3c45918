//! Concurrent update/query driver.
//!
//! One writer thread (the caller) folds the update stream into batches,
//! applies each batch with the pure graph update operations, and publishes
//! the result through the versioned graph. Reader threads acquire whatever
//! version is current, optionally digest it for a later replay check,
//! optionally run one registered query against it, and release.
//!
//! Consistency checking replays the update stream over a plain map and
//! demands that every version any reader observed hashes identically to the
//! replayed prefix it claims to be — there is no in-between state a reader
//! can catch.
//!
//! Reported latencies: per-edge visibility latency is per-batch commit time
//! divided by the batch's update count, averaged over batches; query
//! latency is reported both concurrent with the writer and isolated on the
//! final graph with the same reader parallelism.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use streamgraph_core::graph::{AdjacencyHasher, GraphVersion};
use streamgraph_core::hash64::SplitMix64;
use streamgraph_core::versioning::VersionedGraph;

use crate::queries::{Query, QueryCtx};
use crate::updates::UpdateOp;
use crate::CliError;

pub struct StreamConfig {
    pub batch_size: usize,
    pub query: Option<&'static dyn Query>,
    pub query_threads: usize,
    pub seed: u64,
    /// Hash every acquired version and verify against the replay oracle.
    pub verify: bool,
    /// Pause between reader iterations; 0 means readers spin on queries.
    pub reader_pause_ms: u64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LatencySummary {
    pub count: u64,
    pub mean_s: f64,
    pub max_s: f64,
}

impl LatencySummary {
    fn from_samples(samples: &[f64]) -> LatencySummary {
        if samples.is_empty() {
            return LatencySummary::default();
        }
        LatencySummary {
            count: samples.len() as u64,
            mean_s: samples.iter().sum::<f64>() / samples.len() as f64,
            max_s: samples.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StreamReport {
    pub batches: u64,
    pub updates_applied: u64,
    pub update_wall_s: f64,
    pub updates_per_sec: f64,
    pub per_edge_visibility_latency_s: f64,
    pub final_n: u64,
    pub final_m: u64,
    pub final_hash: u64,
    pub query_concurrent: Option<LatencySummary>,
    pub query_isolated: Option<LatencySummary>,
    /// Digest of reader thread 0's first query output (reproducible from
    /// the seed when the stream is empty).
    pub first_query_digest: Option<u64>,
    pub observed_versions: u64,
    pub consistency_violations: u64,
    pub oracle_final_matches: Option<bool>,
}

impl StreamReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "batches": self.batches,
            "updates_applied": self.updates_applied,
            "updates_per_sec": self.updates_per_sec,
            // per-batch commit time divided by batch size, averaged
            "per_edge_visibility_latency_s": self.per_edge_visibility_latency_s,
            "final_n": self.final_n,
            "final_m": self.final_m,
            "final_hash": format!("{:016x}", self.final_hash),
            "query_concurrent": self.query_concurrent.map(|l| serde_json::json!({
                "count": l.count, "mean_s": l.mean_s, "max_s": l.max_s})),
            "query_isolated": self.query_isolated.map(|l| serde_json::json!({
                "count": l.count, "mean_s": l.mean_s, "max_s": l.max_s})),
            "first_query_digest": self.first_query_digest.map(|d| format!("{d:016x}")),
            "observed_versions": self.observed_versions,
            "consistency_violations": self.consistency_violations,
            "oracle_final_matches": self.oracle_final_matches,
        })
    }
}

struct ReaderLog {
    observations: Vec<(u64, u64)>, // (timestamp, adjacency hash)
    query_latencies: Vec<f64>,
    first_digest: Option<u64>,
}

fn oracle_hash(state: &BTreeMap<u64, BTreeSet<u64>>) -> u64 {
    let mut h = AdjacencyHasher::new();
    for (v, ns) in state {
        h.visit_vertex(*v);
        for e in ns {
            h.visit_neighbor(*e);
        }
    }
    h.finish()
}

fn apply_op(state: &mut BTreeMap<u64, BTreeSet<u64>>, op: UpdateOp) {
    match op {
        UpdateOp::Insert(u, v) => {
            state.entry(u).or_default().insert(v);
        }
        UpdateOp::Delete(u, v) => {
            if let Some(ns) = state.get_mut(&u) {
                ns.remove(&v);
            }
        }
    }
}

/// Extends the vertex set so every id named by the stream is present,
/// keeping the id space compact for flat snapshots during queries.
fn cover_ids(initial: &GraphVersion, updates: &[UpdateOp]) -> GraphVersion {
    let mut max_id = initial.dense_bound().saturating_sub(1);
    for op in updates {
        let (u, v) = op.endpoints();
        max_id = max_id.max(u).max(v);
    }
    if updates.is_empty() {
        return initial.clone();
    }
    let ids: Vec<u64> = (0..=max_id).collect();
    initial.insert_vertices(&ids)
}

pub fn run_stream(
    initial: &GraphVersion,
    updates: &[UpdateOp],
    cfg: &StreamConfig,
) -> Result<StreamReport, CliError> {
    if cfg.batch_size == 0 {
        return Err(CliError::Invalid("batch size must be positive".into()));
    }
    let base = cover_ids(initial, updates);
    let base_state: BTreeMap<u64, BTreeSet<u64>> = base
        .adjacency()
        .into_iter()
        .map(|(v, ns)| (v, ns.into_iter().collect()))
        .collect();
    let (n, _) = base.counts();

    let vg = Arc::new(VersionedGraph::new(base));
    let done = Arc::new(AtomicBool::new(false));

    // Reader threads: pin a version, optionally digest and query it.
    let mut readers = Vec::new();
    for tid in 0..cfg.query_threads.max(if cfg.verify { 1 } else { 0 }) {
        let vg = Arc::clone(&vg);
        let done = Arc::clone(&done);
        let verify = cfg.verify;
        let query = cfg.query;
        let run_queries = tid < cfg.query_threads;
        let pause = std::time::Duration::from_millis(cfg.reader_pause_ms);
        let seed = cfg.seed ^ (tid as u64).wrapping_mul(0x9e37_79b9);
        readers.push(std::thread::spawn(move || -> Result<ReaderLog, String> {
            let mut rng = SplitMix64::new(seed);
            let mut log = ReaderLog {
                observations: Vec::new(),
                query_latencies: Vec::new(),
                first_digest: None,
            };
            // At least one pass even when the writer finishes immediately,
            // so an empty stream still exercises the configured query.
            loop {
                let finished = done.load(Ordering::Acquire);
                let version = vg.acquire();
                if verify {
                    log.observations
                        .push((version.timestamp(), version.adjacency_hash()));
                }
                if let (true, Some(q)) = (run_queries, query) {
                    let ctx = QueryCtx {
                        src: if n > 0 { rng.next_below(n) } else { 0 },
                        seed: rng.next_u64(),
                        opts: Default::default(),
                    };
                    let begin = Instant::now();
                    let out = q.run(&version, &ctx).map_err(|e| e.to_string())?;
                    log.query_latencies.push(begin.elapsed().as_secs_f64());
                    if log.first_digest.is_none() {
                        log.first_digest = Some(out.digest());
                    }
                }
                vg.release(version);
                if finished {
                    break;
                }
                if !pause.is_zero() {
                    std::thread::sleep(pause);
                }
            }
            Ok(log)
        }));
    }

    // Writer: one batch per publish; mixed batches apply their insert and
    // delete runs in stream order before the single set.
    let guard = vg.writer().map_err(CliError::Core)?;
    let mut cur = vg.acquire().snapshot();
    let mut published: Vec<(u64, usize)> = vec![(cur.timestamp(), 0)]; // (ts, ops applied)
    let mut ops_applied = 0usize;
    let mut batch_times: Vec<(f64, usize)> = Vec::new();
    let update_start = Instant::now();
    for batch in updates.chunks(cfg.batch_size) {
        let begin = Instant::now();
        let mut next = (*cur).clone();
        let mut run_start = 0usize;
        while run_start < batch.len() {
            let is_insert = matches!(batch[run_start], UpdateOp::Insert(..));
            let run_end = batch[run_start..]
                .iter()
                .position(|op| matches!(op, UpdateOp::Insert(..)) != is_insert)
                .map_or(batch.len(), |p| run_start + p);
            let pairs: Vec<(u64, u64)> = batch[run_start..run_end]
                .iter()
                .map(UpdateOp::endpoints)
                .collect();
            next = if is_insert {
                next.insert_edges(&pairs)
            } else {
                next.delete_edges(&pairs, false)
            };
            run_start = run_end;
        }
        let next = Arc::new(next);
        vg.set(&guard, Arc::clone(&next));
        cur = next;
        ops_applied += batch.len();
        published.push((cur.timestamp(), ops_applied));
        batch_times.push((begin.elapsed().as_secs_f64(), batch.len()));
    }
    let update_wall_s = update_start.elapsed().as_secs_f64();
    done.store(true, Ordering::Release);

    let mut observations: Vec<(u64, u64)> = Vec::new();
    let mut concurrent_latencies: Vec<f64> = Vec::new();
    let mut per_thread_counts: Vec<usize> = Vec::new();
    let mut first_query_digest = None;
    for r in readers {
        let log = r
            .join()
            .map_err(|_| CliError::Invalid("reader thread panicked".into()))?
            .map_err(CliError::Invalid)?;
        observations.extend(log.observations);
        per_thread_counts.push(log.query_latencies.len());
        concurrent_latencies.extend(log.query_latencies);
        if first_query_digest.is_none() {
            first_query_digest = log.first_digest;
        }
    }

    // Replay the stream over a plain adjacency map; every observed version
    // must hash to the prefix its timestamp was published for.
    let mut observed_versions = 0u64;
    let mut violations = 0u64;
    let mut oracle_final_matches = None;
    if cfg.verify {
        let ts_to_ops: BTreeMap<u64, usize> = published.iter().copied().collect();
        let mut needed: BTreeMap<usize, Vec<(u64, u64)>> = BTreeMap::new();
        for (ts, hash) in &observations {
            match ts_to_ops.get(ts) {
                Some(&ops) => needed.entry(ops).or_default().push((*ts, *hash)),
                None => violations += 1, // a version nobody published
            }
            observed_versions += 1;
        }
        let mut state = base_state;
        let mut cursor = 0usize;
        for (&ops, checks) in &needed {
            while cursor < ops {
                apply_op(&mut state, updates[cursor]);
                cursor += 1;
            }
            let want = oracle_hash(&state);
            for (_, got) in checks {
                if *got != want {
                    violations += 1;
                }
            }
        }
        while cursor < updates.len() {
            apply_op(&mut state, updates[cursor]);
            cursor += 1;
        }
        oracle_final_matches = Some(oracle_hash(&state) == cur.adjacency_hash());
    }

    // Isolated query phase: same thread count, same per-thread query count,
    // against the final version, writer idle.
    let query_isolated = if let (Some(q), true) = (cfg.query, cfg.query_threads > 0) {
        let mut handles = Vec::new();
        for (tid, &count) in per_thread_counts.iter().enumerate() {
            let version = Arc::clone(&cur);
            let seed = cfg.seed ^ (tid as u64).wrapping_mul(0x9e37_79b9) ^ 0x1501_a7ed;
            handles.push(std::thread::spawn(move || -> Result<Vec<f64>, String> {
                let mut rng = SplitMix64::new(seed);
                let mut lat = Vec::with_capacity(count);
                for _ in 0..count {
                    let ctx = QueryCtx {
                        src: if n > 0 { rng.next_below(n) } else { 0 },
                        seed: rng.next_u64(),
                        opts: Default::default(),
                    };
                    let begin = Instant::now();
                    q.run(&version, &ctx).map_err(|e| e.to_string())?;
                    lat.push(begin.elapsed().as_secs_f64());
                }
                Ok(lat)
            }));
        }
        let mut all = Vec::new();
        for h in handles {
            all.extend(
                h.join()
                    .map_err(|_| CliError::Invalid("isolated query thread panicked".into()))?
                    .map_err(CliError::Invalid)?,
            );
        }
        Some(LatencySummary::from_samples(&all))
    } else {
        None
    };

    let per_edge: f64 = if batch_times.is_empty() {
        0.0
    } else {
        batch_times
            .iter()
            .map(|(t, sz)| t / *sz as f64)
            .sum::<f64>()
            / batch_times.len() as f64
    };
    let (final_n, final_m) = cur.counts();
    Ok(StreamReport {
        batches: batch_times.len() as u64,
        updates_applied: ops_applied as u64,
        update_wall_s,
        updates_per_sec: if update_wall_s > 0.0 {
            ops_applied as f64 / update_wall_s
        } else {
            0.0
        },
        per_edge_visibility_latency_s: per_edge,
        final_n,
        final_m,
        final_hash: cur.adjacency_hash(),
        query_concurrent: if cfg.query_threads > 0 && cfg.query.is_some() {
            Some(LatencySummary::from_samples(&concurrent_latencies))
        } else {
            None
        },
        query_isolated,
        first_query_digest,
        observed_versions,
        consistency_violations: violations,
        oracle_final_matches,
    })
}
