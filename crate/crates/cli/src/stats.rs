//! Memory accounting for a graph snapshot under three storage models:
//!
//! 1. `uncompressed`: chunking disabled — every neighbor id gets its own
//!    tree node (the layout of a head node with an empty tail), no chunks.
//! 2. `chunked_raw`: the chunked structure with tails and prefixes kept as
//!    raw 8-byte arrays (a length word plus `count` words each).
//! 3. `chunked_diff`: the real representation — chunks in their serialized
//!    byte layout (count, first, last as varints, then the difference
//!    payload).
//!
//! Node costs come from the actual node layouts ([`node_heap_bytes`]);
//! modes 2 and 3 walk the real structure, mode 1 is computed from `n` and
//! `m`. The models are nested: demoting a node to a chunk element always
//! trades a full node for at most nine payload bytes, and chunk merging
//! only sheds nodes and headers, so 3 <= 2 <= 1 on any graph and the
//! compressed size is nonincreasing in the chunking parameter.

use streamgraph_core::chunk::Chunk;
use streamgraph_core::ctree::CTree;
use streamgraph_core::graph::GraphVersion;
use streamgraph_core::pftree::node_heap_bytes;

#[derive(Clone, Copy, Debug)]
pub struct MemoryStats {
    pub n: u64,
    pub m: u64,
    pub heads: u64,
    pub chunks: u64,
    pub uncompressed_bytes: u64,
    pub chunked_raw_bytes: u64,
    pub chunked_diff_bytes: u64,
}

impl MemoryStats {
    pub fn savings_ratio(&self) -> f64 {
        if self.chunked_diff_bytes == 0 {
            return 1.0;
        }
        self.uncompressed_bytes as f64 / self.chunked_diff_bytes as f64
    }

    pub fn bytes_per_edge(&self, bytes: u64) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        bytes as f64 / self.m as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "m": self.m,
            "heads": self.heads,
            "chunks": self.chunks,
            "uncompressed_bytes": self.uncompressed_bytes,
            "chunked_raw_bytes": self.chunked_raw_bytes,
            "chunked_diff_bytes": self.chunked_diff_bytes,
            "uncompressed_bytes_per_edge": self.bytes_per_edge(self.uncompressed_bytes),
            "chunked_raw_bytes_per_edge": self.bytes_per_edge(self.chunked_raw_bytes),
            "chunked_diff_bytes_per_edge": self.bytes_per_edge(self.chunked_diff_bytes),
            "savings_ratio": self.savings_ratio(),
        })
    }
}

pub fn measure(g: &GraphVersion) -> MemoryStats {
    let (n, m) = g.counts();

    let vertex_node = node_heap_bytes::<u64, CTree, u64>();
    let head_node = node_heap_bytes::<u64, Option<Chunk>, u64>();

    let mut heads = 0u64;
    let mut chunks = 0u64;
    let mut raw_chunk_bytes = 0u64;
    let mut diff_chunk_bytes = 0u64;
    let mut eat_chunk = |c: &Chunk| {
        chunks += 1;
        raw_chunk_bytes += 8 + 8 * c.len();
        diff_chunk_bytes += c.serialized_len() as u64;
    };
    g.for_each_vertex(&mut |_, t| {
        heads += t.head_count();
        if let Some(p) = t.prefix() {
            eat_chunk(p);
        }
        t.for_each_head(&mut |_, tail| {
            if let Some(tail) = tail {
                eat_chunk(tail);
            }
        });
    });

    MemoryStats {
        n,
        m,
        heads,
        chunks,
        uncompressed_bytes: n * vertex_node + m * head_node,
        chunked_raw_bytes: n * vertex_node + heads * head_node + raw_chunk_bytes,
        chunked_diff_bytes: n * vertex_node + heads * head_node + diff_chunk_bytes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use streamgraph_core::hash64::SplitMix64;

    #[test]
    fn empty_graph_has_zero_edge_bytes() {
        let s = measure(&GraphVersion::new_empty(256));
        assert_eq!((s.n, s.m), (0, 0));
        assert_eq!(s.uncompressed_bytes, 0);
        assert_eq!(s.chunked_diff_bytes, 0);
    }

    #[test]
    fn modes_are_ordered() {
        let mut rng = SplitMix64::new(3);
        for &b in &[1u64, 8, 256] {
            let mut adj: Vec<Vec<u64>> = vec![Vec::new(); 500];
            for _ in 0..5000 {
                let u = rng.next_below(500) as usize;
                adj[u].push(rng.next_below(500));
            }
            let g = GraphVersion::build(&adj, b);
            let s = measure(&g);
            assert!(s.chunked_diff_bytes <= s.chunked_raw_bytes);
            assert!(s.chunked_raw_bytes <= s.uncompressed_bytes);
        }
    }

    #[test]
    fn doubling_b_never_grows_memory() {
        let mut rng = SplitMix64::new(9);
        let mut adj: Vec<Vec<u64>> = vec![Vec::new(); 2000];
        for _ in 0..20_000 {
            let u = rng.next_below(2000) as usize;
            adj[u].push(rng.next_below(2000));
        }
        let mut prev = u64::MAX;
        for k in 1..=10 {
            let s = measure(&GraphVersion::build(&adj, 1 << k));
            assert!(
                s.chunked_diff_bytes <= prev,
                "b=2^{k}: {} > {prev}",
                s.chunked_diff_bytes
            );
            prev = s.chunked_diff_bytes;
        }
    }
}
