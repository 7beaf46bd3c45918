//! Queries over a single graph snapshot.
//!
//! Every query here is a pure function of one immutable [`GraphVersion`]:
//! it may run concurrently with the writer and with other queries, and its
//! output never changes while newer versions are being published. All of
//! them assume the compact id space `[0, n)` produced by ingestion, and the
//! traversal-based ones follow the symmetrized-input convention for
//! direction-optimized frontiers.

use crate::error::{Error, Result};
use crate::graph::{edge_map, Direction, EdgeMapOp, FlatSnapshot, GraphVersion, VertexSubset};
use crate::hash64::mix64;

/// Distance sentinel for vertices a search never reached.
pub const UNREACHED: u32 = u32::MAX;

/// Traversal toggles: whether to precompute a flat snapshot and whether the
/// frontier may switch to dense (pull) scans.
#[derive(Clone, Copy, Debug)]
pub struct TraversalOpts {
    pub use_flat_snapshot: bool,
    pub direction_opt: bool,
}

impl Default for TraversalOpts {
    fn default() -> Self {
        TraversalOpts {
            use_flat_snapshot: true,
            direction_opt: true,
        }
    }
}

impl TraversalOpts {
    fn direction(&self) -> Direction {
        if self.direction_opt {
            Direction::Auto
        } else {
            Direction::Sparse
        }
    }

    fn snapshot(&self, g: &GraphVersion) -> Result<Option<FlatSnapshot>> {
        if self.use_flat_snapshot {
            Ok(Some(g.flat_snapshot()?))
        } else {
            Ok(None)
        }
    }
}

fn require_present(g: &GraphVersion, src: u64) -> Result<()> {
    if g.find_vertex(src).is_none() {
        return Err(Error::VertexNotFound(src));
    }
    Ok(())
}

struct BfsOp<'a> {
    dist: &'a mut [u32],
    next: u32,
}

impl EdgeMapOp for BfsOp<'_> {
    fn update(&mut self, _u: u64, v: u64) -> bool {
        if self.dist[v as usize] == UNREACHED {
            self.dist[v as usize] = self.next;
            true
        } else {
            false
        }
    }
    fn cond(&self, v: u64) -> bool {
        self.dist[v as usize] == UNREACHED
    }
}

/// Hop distances from `src` (`UNREACHED` where no path exists), computed
/// frontier by frontier.
pub fn bfs(g: &GraphVersion, src: u64, opts: TraversalOpts) -> Result<Vec<u32>> {
    require_present(g, src)?;
    let snapshot = opts.snapshot(g)?;
    let bound = g.dense_bound() as usize;
    let mut dist = vec![UNREACHED; bound];
    dist[src as usize] = 0;
    let mut frontier = VertexSubset::sparse(vec![src]);
    let mut level = 0u32;
    while !frontier.is_empty() {
        level += 1;
        let mut op = BfsOp {
            dist: &mut dist,
            next: level,
        };
        frontier = edge_map(g, &frontier, &mut op, snapshot.as_ref(), opts.direction());
    }
    Ok(dist)
}

struct BcForwardOp<'a> {
    dist: &'a mut [u32],
    sigma: &'a mut [u64],
    next: u32,
    overflow: bool,
}

impl EdgeMapOp for BcForwardOp<'_> {
    fn update(&mut self, u: u64, v: u64) -> bool {
        let (u, v) = (u as usize, v as usize);
        if self.dist[v] == UNREACHED {
            self.dist[v] = self.next;
            self.sigma[v] = self.sigma[u];
            true
        } else if self.dist[v] == self.next {
            // another shortest path into v through u
            match self.sigma[v].checked_add(self.sigma[u]) {
                Some(s) => self.sigma[v] = s,
                None => self.overflow = true,
            }
            false
        } else {
            false
        }
    }
    fn cond(&self, v: u64) -> bool {
        let v = v as usize;
        self.dist[v] == UNREACHED || self.dist[v] == self.next
    }
}

/// Single-source dependency scores: for each `v`, the sum over shortest
/// paths from `src` of the fraction passing through `v` (Brandes). Shortest
/// path counts use exact 64-bit integers with overflow detection; the
/// accumulation runs in doubles.
pub fn bc(g: &GraphVersion, src: u64, opts: TraversalOpts) -> Result<Vec<f64>> {
    require_present(g, src)?;
    let snapshot = opts.snapshot(g)?;
    let bound = g.dense_bound() as usize;
    let mut dist = vec![UNREACHED; bound];
    let mut sigma = vec![0u64; bound];
    dist[src as usize] = 0;
    sigma[src as usize] = 1;

    let mut levels: Vec<Vec<u64>> = vec![vec![src]];
    let mut frontier = VertexSubset::sparse(vec![src]);
    let mut level = 0u32;
    while !frontier.is_empty() {
        level += 1;
        let mut op = BcForwardOp {
            dist: &mut dist,
            sigma: &mut sigma,
            next: level,
            overflow: false,
        };
        frontier = edge_map(g, &frontier, &mut op, snapshot.as_ref(), opts.direction());
        if op.overflow {
            return Err(Error::contract("shortest-path count overflows u64"));
        }
        let ids = frontier.to_sorted_ids();
        if ids.is_empty() {
            break;
        }
        levels.push(ids);
    }

    // Backward accumulation over the level structure; predecessors are the
    // distance-(d-1) endpoints of incident edges (symmetrized inputs).
    let mut delta = vec![0.0f64; bound];
    let neighbor_sets = |v: u64, f: &mut dyn FnMut(u64)| match &snapshot {
        Some(s) => {
            if let Some(t) = s.get(v) {
                t.for_each(f);
            }
        }
        None => {
            if let Some(h) = g.find_vertex(v) {
                h.edges().for_each(f);
            }
        }
    };
    for d in (1..levels.len()).rev() {
        for &w in &levels[d] {
            let coeff = 1.0 + delta[w as usize];
            let sw = sigma[w as usize] as f64;
            neighbor_sets(w, &mut |u| {
                if dist[u as usize] == (d - 1) as u32 {
                    delta[u as usize] += sigma[u as usize] as f64 / sw * coeff;
                }
            });
        }
    }
    // The source's own dependency is zero by definition.
    delta[src as usize] = 0.0;
    Ok(delta)
}

/// Maximal independent set by rounds of hash-priority local minima: a
/// vertex joins when its priority beats every undecided neighbor, then it
/// and its neighbors leave the pool. Deterministic per seed.
pub fn mis(g: &GraphVersion, seed: u64) -> Vec<bool> {
    let bound = g.dense_bound() as usize;
    let snapshot = g.flat_snapshot().ok();
    let prio = |v: u64| (mix64(seed ^ mix64(v.wrapping_add(1))), v);
    let neighbors = |v: u64, f: &mut dyn FnMut(u64)| match &snapshot {
        Some(s) => {
            if let Some(t) = s.get(v) {
                t.for_each(f);
            }
        }
        None => {
            if let Some(h) = g.find_vertex(v) {
                h.edges().for_each(f);
            }
        }
    };

    let mut in_set = vec![false; bound];
    let mut undecided = vec![false; bound];
    let mut pool: Vec<u64> = Vec::new();
    g.for_each_vertex(&mut |v, _| {
        undecided[v as usize] = true;
        pool.push(v);
    });

    while !pool.is_empty() {
        let before = undecided.clone();
        let mut selected: Vec<u64> = Vec::new();
        for &v in &pool {
            let mut wins = true;
            neighbors(v, &mut |u| {
                if wins && u != v && before[u as usize] && prio(u) < prio(v) {
                    wins = false;
                }
            });
            if wins {
                selected.push(v);
            }
        }
        for &v in &selected {
            in_set[v as usize] = true;
            undecided[v as usize] = false;
            neighbors(v, &mut |u| undecided[u as usize] = false);
        }
        pool.retain(|&v| undecided[v as usize]);
    }
    in_set
}

/// Vertices within two hops of `src`, excluding `src`, deduplicated and
/// sorted.
pub fn two_hop(g: &GraphVersion, src: u64) -> Result<Vec<u64>> {
    require_present(g, src)?;
    let bound = g.dense_bound() as usize;
    let mut seen = vec![false; bound];
    seen[src as usize] = true;

    struct SeenOp<'a> {
        seen: &'a mut [bool],
    }
    impl EdgeMapOp for SeenOp<'_> {
        fn update(&mut self, _u: u64, v: u64) -> bool {
            if self.seen[v as usize] {
                false
            } else {
                self.seen[v as usize] = true;
                true
            }
        }
        fn cond(&self, v: u64) -> bool {
            !self.seen[v as usize]
        }
    }

    let frontier = VertexSubset::sparse(vec![src]);
    let mut op = SeenOp { seen: &mut seen };
    let hop1 = edge_map(g, &frontier, &mut op, None, Direction::Sparse);
    let mut op = SeenOp { seen: &mut seen };
    let hop2 = edge_map(g, &hop1, &mut op, None, Direction::Sparse);

    let mut out = hop1.to_sorted_ids();
    out.extend(hop2.to_sorted_ids());
    out.sort_unstable();
    Ok(out)
}
