//! Query registry: each analytics kernel sits behind one trait object,
//! registered under the name the command line selects it by. The bench
//! subcommands and the stream driver's `--query` flag both resolve through
//! [`lookup`], so adding a kernel means adding one entry here.

use streamgraph_core::algorithms::{bc, bfs, mis, two_hop, TraversalOpts, UNREACHED};
use streamgraph_core::error::Result;
use streamgraph_core::graph::GraphVersion;
use streamgraph_core::hash64::mix64;

/// Per-invocation parameters shared by all kernels; each kernel reads the
/// fields that apply to it.
#[derive(Clone, Copy, Debug, Default)]
pub struct QueryCtx {
    pub src: u64,
    pub seed: u64,
    pub opts: TraversalOpts,
}

#[derive(Clone, Debug)]
pub enum QueryOutput {
    Distances(Vec<u32>),
    Scores(Vec<f64>),
    Membership(Vec<bool>),
    VertexIds(Vec<u64>),
}

impl QueryOutput {
    /// Deterministic digest of the result, for reports and equivalence
    /// checks across runs.
    pub fn digest(&self) -> u64 {
        let mut h = 0x2545_f491_4f6c_dd1du64;
        let mut eat = |x: u64| h = mix64(h ^ x);
        match self {
            QueryOutput::Distances(d) => d.iter().for_each(|&x| eat(u64::from(x))),
            QueryOutput::Scores(s) => s.iter().for_each(|&x| eat(x.to_bits())),
            QueryOutput::Membership(m) => m.iter().for_each(|&x| eat(u64::from(x))),
            QueryOutput::VertexIds(v) => v.iter().for_each(|&x| eat(x)),
        }
        h
    }

    /// Small human-facing summary of the result.
    pub fn summary(&self) -> serde_json::Value {
        match self {
            QueryOutput::Distances(d) => {
                let reached = d.iter().filter(|&&x| x != UNREACHED).count();
                let max = d
                    .iter()
                    .filter(|&&x| x != UNREACHED)
                    .max()
                    .copied()
                    .unwrap_or(0);
                serde_json::json!({"reached": reached, "max_dist": max})
            }
            QueryOutput::Scores(s) => {
                let sum: f64 = s.iter().sum();
                let max = s.iter().copied().fold(0.0f64, f64::max);
                serde_json::json!({"sum": sum, "max": max})
            }
            QueryOutput::Membership(m) => {
                serde_json::json!({"selected": m.iter().filter(|&&x| x).count()})
            }
            QueryOutput::VertexIds(v) => serde_json::json!({"count": v.len()}),
        }
    }
}

pub trait Query: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, g: &GraphVersion, ctx: &QueryCtx) -> Result<QueryOutput>;
}

struct BfsQuery;
impl Query for BfsQuery {
    fn name(&self) -> &'static str {
        "bfs"
    }
    fn run(&self, g: &GraphVersion, ctx: &QueryCtx) -> Result<QueryOutput> {
        Ok(QueryOutput::Distances(bfs(g, ctx.src, ctx.opts)?))
    }
}

struct BcQuery;
impl Query for BcQuery {
    fn name(&self) -> &'static str {
        "bc"
    }
    fn run(&self, g: &GraphVersion, ctx: &QueryCtx) -> Result<QueryOutput> {
        Ok(QueryOutput::Scores(bc(g, ctx.src, ctx.opts)?))
    }
}

struct MisQuery;
impl Query for MisQuery {
    fn name(&self) -> &'static str {
        "mis"
    }
    fn run(&self, g: &GraphVersion, ctx: &QueryCtx) -> Result<QueryOutput> {
        Ok(QueryOutput::Membership(mis(g, ctx.seed)))
    }
}

struct TwoHopQuery;
impl Query for TwoHopQuery {
    fn name(&self) -> &'static str {
        "two-hop"
    }
    fn run(&self, g: &GraphVersion, ctx: &QueryCtx) -> Result<QueryOutput> {
        Ok(QueryOutput::VertexIds(two_hop(g, ctx.src)?))
    }
}

pub fn registry() -> &'static [&'static dyn Query] {
    &[&BfsQuery, &BcQuery, &MisQuery, &TwoHopQuery]
}

pub fn lookup(name: &str) -> Option<&'static dyn Query> {
    registry().iter().copied().find(|q| q.name() == name)
}
