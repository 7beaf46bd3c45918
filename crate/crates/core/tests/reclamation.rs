//! Reclamation audits against the process-wide live node counter. Everything
//! runs inside one test function: the counter is global, so these scenarios
//! must not run concurrently with other allocating tests in the same
//! process.

use std::sync::Arc;

use streamgraph_core::ctree::CTree;
use streamgraph_core::graph::GraphVersion;
use streamgraph_core::hash64::SplitMix64;
use streamgraph_core::pftree::{live_node_count, PfTree};
use streamgraph_core::versioning::VersionedGraph;

#[test]
fn live_node_accounting() {
    let baseline = live_node_count();

    // Dropping every handle returns the counter to its baseline.
    {
        let mut rng = SplitMix64::new(0xdead);
        let entries: Vec<(u64, u64)> = {
            let mut ks: Vec<u64> = (0..5000).map(|_| rng.next_u64() >> 16).collect();
            ks.sort_unstable();
            ks.dedup();
            ks.into_iter().map(|k| (k, k)).collect()
        };
        let t: PfTree<u64, u64, ()> = PfTree::build(&entries).unwrap();
        assert!(live_node_count() >= baseline + t.len());
        let (l, _, r) = t.split(&entries[entries.len() / 2].0);
        let u = l.union(&r, &|a, _| *a);
        drop((l, r, u, t));
    }
    assert_eq!(live_node_count(), baseline, "tree handles leaked nodes");

    // Shared structure: after dropping one version, the nodes unique to it
    // go away and the survivor accounts for every remaining node.
    {
        let mut rng = SplitMix64::new(0xbeef);
        let xs: Vec<u64> = (0..20_000).map(|_| rng.next_below(100_000)).collect();
        let v0 = CTree::build(&xs, 8);
        let batch: Vec<u64> = (0..5000).map(|_| rng.next_below(100_000)).collect();
        let v1 = v0.multi_insert(&batch);

        let mut both = std::collections::HashSet::new();
        v0.collect_node_addrs(&mut both);
        v1.collect_node_addrs(&mut both);
        assert_eq!(live_node_count(), baseline + both.len() as u64);

        let mut v1_only = std::collections::HashSet::new();
        v1.collect_node_addrs(&mut v1_only);
        drop(v0);
        assert_eq!(
            live_node_count(),
            baseline + v1_only.len() as u64,
            "dropping the old version must leave exactly the survivor's nodes"
        );
        drop(v1);
    }
    assert_eq!(live_node_count(), baseline);

    // Versioned graph: run a writer with held readers, release everything
    // but the latest, and match the reachable-node count exactly.
    {
        let g0 = GraphVersion::build(&vec![Vec::new(); 256], 8);
        let vg = VersionedGraph::new(g0);
        let guard = vg.writer().unwrap();
        let mut rng = SplitMix64::new(0xf00d);

        let mut held = Vec::new();
        let mut cur = vg.acquire().snapshot();
        for i in 0..200u64 {
            let batch: Vec<(u64, u64)> = (0..64)
                .map(|_| (rng.next_below(256), rng.next_below(256)))
                .collect();
            let next = Arc::new(cur.insert_edges(&batch));
            vg.set(&guard, Arc::clone(&next));
            cur = next;
            if i % 50 == 0 {
                held.push(vg.acquire());
            }
        }
        drop(cur);

        // Old versions pinned by readers keep their nodes alive.
        let latest = vg.acquire();
        let reachable_latest = latest.reachable_nodes();
        assert!(live_node_count() > baseline + reachable_latest);

        for (i, v) in held.into_iter().enumerate() {
            let last_copy = vg.release(v);
            assert!(last_copy, "held version {i} had a single holder");
        }
        assert!(!vg.release(latest), "latest is also held by the structure");
        let latest = vg.acquire();
        assert_eq!(
            live_node_count(),
            baseline + latest.reachable_nodes(),
            "after releasing old versions only the latest's nodes remain"
        );
        vg.release(latest);
        drop(guard);
        drop(vg);
    }
    assert_eq!(live_node_count(), baseline, "full teardown must reach zero");
}
