//! Immutable graph snapshots: a vertex tree whose values are per-vertex
//! edge sets.
//!
//! A [`GraphVersion`] is a purely-functional snapshot. The vertex tree maps
//! vertex id to its out-neighbor set (a [`CTree`]) and is augmented with the
//! total directed edge count, so `counts` is constant work. Batch updates
//! sort the edge batch, collapse duplicates, build one c-tree per touched
//! source, and bulk-insert into the vertex tree combining old and new
//! neighbor sets with a set union (difference for deletions). Updates return
//! a new version; the input version is never modified, so any number of
//! readers can keep traversing it.
//!
//! Frontier traversal is `edge_map`: apply `update(u, v)` over edges leaving
//! a [`VertexSubset`] where `cond(v)` holds and collect the targets where
//! `update` returned true. A sparse (push) traversal walks the frontier's
//! out-edges; a dense (pull) traversal scans candidate targets and their
//! in-neighbors, which on symmetrized inputs are the same sets. The
//! traversal mode never changes the result, only the cost; `Auto` switches
//! to dense when the frontier's out-degree mass exceeds `m / 20`.
//!
//! A [`FlatSnapshot`] is the per-vertex array of edge-set handles built by
//! one vertex-tree traversal; handing it to `edge_map` replaces the
//! per-vertex tree search with an array load. It requires the compact id
//! space `[0, n)`.

use std::collections::HashSet;

use crate::ctree::CTree;
use crate::error::{Error, Result};
use crate::hash64::mix64;
use crate::pftree::{Augment, PfTree};

/// Vertex-tree augmentation: total directed edges below.
impl Augment<u64, CTree> for u64 {
    fn identity() -> Self {
        0
    }
    fn from_entry(_v: &u64, edges: &CTree) -> Self {
        edges.size()
    }
    fn combine(a: &Self, b: &Self) -> Self {
        a + b
    }
}

type VertexTree = PfTree<u64, CTree, u64>;

#[derive(Clone)]
pub struct GraphVersion {
    vertices: VertexTree,
    b: u64,
    timestamp: u64,
}

impl std::fmt::Debug for GraphVersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (n, m) = self.counts();
        f.debug_struct("GraphVersion")
            .field("n", &n)
            .field("m", &m)
            .field("timestamp", &self.timestamp)
            .finish()
    }
}

/// Borrowed view of one vertex and its neighbor set.
pub struct VertexHandle {
    id: u64,
    edges: CTree,
}

impl VertexHandle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn degree(&self) -> u64 {
        self.edges.size()
    }

    pub fn edges(&self) -> &CTree {
        &self.edges
    }

    pub fn for_each_neighbor(&self, f: &mut (impl FnMut(u64) + ?Sized)) {
        self.edges.for_each(f);
    }

    pub fn neighbors(&self) -> Vec<u64> {
        self.edges.collect()
    }

    /// Neighbor-set intersection of two vertices.
    pub fn intersect_neighbors(&self, other: &VertexHandle) -> Result<CTree> {
        self.edges.intersection(&other.edges)
    }
}

impl GraphVersion {
    pub fn new_empty(b: u64) -> GraphVersion {
        GraphVersion {
            vertices: VertexTree::empty(),
            b,
            timestamp: 0,
        }
    }

    /// Builds a graph with vertices `0..neighbors.len()`; vertex `i`'s edge
    /// set is the deduplicated contents of `neighbors[i]`.
    pub fn build(neighbors: &[Vec<u64>], b: u64) -> GraphVersion {
        let entries: Vec<(u64, CTree)> = neighbors
            .iter()
            .enumerate()
            .map(|(i, ns)| (i as u64, CTree::build(ns, b)))
            .collect();
        GraphVersion {
            vertices: VertexTree::build(&entries).expect("ids are sorted"),
            b,
            timestamp: 0,
        }
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn timestamp(&self) -> u64 {
        self.timestamp
    }

    /// `(n, m)`: vertex count and directed edge count, both constant work.
    pub fn counts(&self) -> (u64, u64) {
        (self.vertices.len(), self.vertices.aug())
    }

    pub fn find_vertex(&self, v: u64) -> Option<VertexHandle> {
        self.vertices.find(&v).map(|edges| VertexHandle {
            id: v,
            edges: edges.clone(),
        })
    }

    /// Smallest array length covering every present vertex id.
    pub fn dense_bound(&self) -> u64 {
        let max_id = self.vertices.last().map_or(0, |(v, _)| *v + 1);
        max_id.max(self.vertices.len())
    }

    pub fn for_each_vertex(&self, f: &mut impl FnMut(u64, &CTree)) {
        self.vertices.for_each(&mut |v, t| f(*v, t));
    }

    /// Inserts directed edges; duplicate pairs collapse, absent sources are
    /// created, targets are not. Returns the successor version.
    pub fn insert_edges(&self, batch: &[(u64, u64)]) -> GraphVersion {
        if batch.is_empty() {
            return self.clone();
        }
        let mut sorted = batch.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let b = self.b;
        let entries: Vec<(u64, CTree)> = sorted
            .chunk_by(|x, y| x.0 == y.0)
            .map(|group| {
                let targets: Vec<u64> = group.iter().map(|p| p.1).collect();
                (group[0].0, CTree::from_sorted(&targets, b))
            })
            .collect();
        let vertices = self
            .vertices
            .multi_insert(&entries, &|old, new| {
                old.union(new).expect("same chunking parameter")
            })
            .expect("grouped batch is sorted");
        GraphVersion {
            vertices,
            b: self.b,
            timestamp: self.timestamp + 1,
        }
    }

    /// Deletes directed edges. Absent sources and absent edges are no-ops.
    /// With `remove_singletons`, sources whose edge set becomes empty are
    /// dropped from the vertex tree.
    pub fn delete_edges(&self, batch: &[(u64, u64)], remove_singletons: bool) -> GraphVersion {
        if batch.is_empty() {
            return self.clone();
        }
        let mut sorted = batch.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let b = self.b;
        let entries: Vec<(u64, CTree)> = sorted
            .chunk_by(|x, y| x.0 == y.0)
            .filter(|group| self.vertices.find(&group[0].0).is_some())
            .map(|group| {
                let targets: Vec<u64> = group.iter().map(|p| p.1).collect();
                (group[0].0, CTree::from_sorted(&targets, b))
            })
            .collect();
        let mut vertices = self
            .vertices
            .multi_insert(&entries, &|old, del| {
                old.difference(del).expect("same chunking parameter")
            })
            .expect("grouped batch is sorted");
        if remove_singletons {
            for (u, _) in &entries {
                if vertices.find(u).is_some_and(CTree::is_empty) {
                    vertices = vertices.remove(u);
                }
            }
        }
        GraphVersion {
            vertices,
            b: self.b,
            timestamp: self.timestamp + 1,
        }
    }

    /// Inserts vertices with empty edge sets; existing ids are unchanged.
    pub fn insert_vertices(&self, ids: &[u64]) -> GraphVersion {
        if ids.is_empty() {
            return self.clone();
        }
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let entries: Vec<(u64, CTree)> = sorted
            .into_iter()
            .map(|v| (v, CTree::empty(self.b)))
            .collect();
        let vertices = self
            .vertices
            .multi_insert(&entries, &|old, _new| old.clone())
            .expect("sorted ids");
        GraphVersion {
            vertices,
            b: self.b,
            timestamp: self.timestamp + 1,
        }
    }

    /// Drops vertices and their out-edge sets. In-edges pointing at a
    /// dropped id are left dangling by design.
    pub fn delete_vertices(&self, ids: &[u64]) -> GraphVersion {
        if ids.is_empty() {
            return self.clone();
        }
        let mut vertices = self.vertices.clone();
        for v in ids {
            vertices = vertices.remove(v);
        }
        GraphVersion {
            vertices,
            b: self.b,
            timestamp: self.timestamp + 1,
        }
    }

    /// Full adjacency dump in ascending vertex order.
    pub fn adjacency(&self) -> Vec<(u64, Vec<u64>)> {
        let mut out = Vec::with_capacity(self.vertices.len() as usize);
        self.for_each_vertex(&mut |v, t| out.push((v, t.collect())));
        out
    }

    /// Order-sensitive digest of the full adjacency; two versions agree iff
    /// their dumps agree.
    pub fn adjacency_hash(&self) -> u64 {
        let mut h = AdjacencyHasher::new();
        self.for_each_vertex(&mut |v, t| {
            h.visit_vertex(v);
            t.for_each(&mut |e| h.visit_neighbor(e));
        });
        h.finish()
    }

    /// Edge count recomputed by traversal; equals `counts().1` whenever the
    /// augmentation is coherent.
    pub fn recount_edges(&self) -> u64 {
        let mut m = 0u64;
        self.for_each_vertex(&mut |_, t| m += t.size());
        m
    }

    /// Number of distinct tree nodes reachable from this version (vertex
    /// tree plus all edge trees), for reclamation audits.
    pub fn reachable_nodes(&self) -> u64 {
        let mut addrs: HashSet<usize> = HashSet::new();
        self.vertices.collect_node_addrs(&mut addrs);
        self.for_each_vertex(&mut |_, t| t.collect_node_addrs(&mut addrs));
        addrs.len() as u64
    }

    /// Structural audit of the vertex tree and every edge set.
    pub fn audit(&self) -> std::result::Result<(), String> {
        self.vertices.validate()?;
        let mut problem = None;
        self.for_each_vertex(&mut |v, t| {
            if problem.is_some() {
                return;
            }
            if t.b() != self.b {
                problem = Some(format!(
                    "vertex {v}: chunk parameter {} != {}",
                    t.b(),
                    self.b
                ));
            } else if let Err(e) = t.audit() {
                problem = Some(format!("vertex {v}: {e}"));
            }
        });
        match problem {
            Some(p) => Err(p),
            None => {
                if self.recount_edges() != self.counts().1 {
                    return Err("edge-count augmentation incoherent".into());
                }
                Ok(())
            }
        }
    }

    /// Array of per-vertex edge-set handles for the compact id space
    /// `[0, n)`; errors if any present id falls outside it.
    pub fn flat_snapshot(&self) -> Result<FlatSnapshot> {
        let (n, _) = self.counts();
        let mut entries: Vec<Option<CTree>> = vec![None; n as usize];
        let mut bad = None;
        self.for_each_vertex(&mut |v, t| {
            if v >= n {
                bad.get_or_insert(v);
            } else {
                entries[v as usize] = Some(t.clone());
            }
        });
        match bad {
            Some(v) => Err(Error::contract(format!(
                "flat snapshot needs ids below n={n}, found {v}"
            ))),
            None => Ok(FlatSnapshot { entries }),
        }
    }
}

/// Chained digest used for both graph versions and replay oracles.
pub struct AdjacencyHasher {
    state: u64,
}

impl AdjacencyHasher {
    #[allow(clippy::new_without_default)]
    pub fn new() -> Self {
        AdjacencyHasher {
            state: 0xcbf2_9ce4_8422_2325,
        }
    }

    pub fn visit_vertex(&mut self, v: u64) {
        self.state = mix64(self.state ^ mix64(v.wrapping_add(1)));
    }

    pub fn visit_neighbor(&mut self, e: u64) {
        self.state = mix64(self.state ^ mix64(e.wrapping_add(0x51ed_270b)));
    }

    pub fn finish(&self) -> u64 {
        self.state
    }
}

/// Per-vertex edge-set handles for one version, indexed by vertex id.
pub struct FlatSnapshot {
    entries: Vec<Option<CTree>>,
}

impl FlatSnapshot {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, v: u64) -> Option<&CTree> {
        self.entries.get(v as usize).and_then(Option::as_ref)
    }

    pub fn degree(&self, v: u64) -> u64 {
        self.get(v).map_or(0, CTree::size)
    }
}

/// A set of vertex ids in either sparse (id list) or dense (flag array)
/// form. Both denote the same set; `edge_map` converts as the traversal
/// mode demands.
#[derive(Clone, Debug)]
pub enum VertexSubset {
    Sparse(Vec<u64>),
    Dense(Vec<bool>),
}

impl VertexSubset {
    pub fn sparse(ids: Vec<u64>) -> VertexSubset {
        debug_assert!({
            let mut s = ids.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        });
        VertexSubset::Sparse(ids)
    }

    pub fn dense(flags: Vec<bool>) -> VertexSubset {
        VertexSubset::Dense(flags)
    }

    pub fn len(&self) -> u64 {
        match self {
            VertexSubset::Sparse(ids) => ids.len() as u64,
            VertexSubset::Dense(flags) => flags.iter().filter(|&&f| f).count() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            VertexSubset::Sparse(ids) => ids.is_empty(),
            VertexSubset::Dense(flags) => !flags.iter().any(|&f| f),
        }
    }

    /// Ascending id list.
    pub fn to_sorted_ids(&self) -> Vec<u64> {
        match self {
            VertexSubset::Sparse(ids) => {
                let mut s = ids.clone();
                s.sort_unstable();
                s
            }
            VertexSubset::Dense(flags) => flags
                .iter()
                .enumerate()
                .filter_map(|(i, &f)| f.then_some(i as u64))
                .collect(),
        }
    }

    fn to_flags(&self, bound: usize) -> Vec<bool> {
        match self {
            VertexSubset::Sparse(ids) => {
                let mut flags = vec![false; bound];
                for &v in ids {
                    flags[v as usize] = true;
                }
                flags
            }
            VertexSubset::Dense(flags) => {
                let mut f = flags.clone();
                f.resize(bound, false);
                f
            }
        }
    }
}

/// Edge operator for `edge_map`: `update` is applied to traversed edges and
/// votes targets into the output frontier; `cond` prunes targets. One object
/// carries both so stateful operators (BFS distance arrays and the like) can
/// borrow their state mutably once.
pub trait EdgeMapOp {
    fn update(&mut self, u: u64, v: u64) -> bool;
    fn cond(&self, v: u64) -> bool;
}

/// Stateless operator from a pair of closures.
pub struct PureOp<F, C>
where
    F: FnMut(u64, u64) -> bool,
    C: Fn(u64) -> bool,
{
    pub update: F,
    pub cond: C,
}

impl<F, C> EdgeMapOp for PureOp<F, C>
where
    F: FnMut(u64, u64) -> bool,
    C: Fn(u64) -> bool,
{
    fn update(&mut self, u: u64, v: u64) -> bool {
        (self.update)(u, v)
    }
    fn cond(&self, v: u64) -> bool {
        (self.cond)(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Pick sparse or dense per frontier from the out-degree mass.
    Auto,
    Sparse,
    Dense,
}

/// Ligra-style frontier map. Returns the deduplicated set of targets `v`
/// with an edge `(u, v)` from the frontier where `cond(v)` held and
/// `update(u, v)` returned true.
///
/// The dense traversal scans each candidate target's neighbor set as its
/// in-neighbors, which matches the sparse result on symmetrized graphs (the
/// convention all direction-optimized callers here follow).
pub fn edge_map(
    g: &GraphVersion,
    frontier: &VertexSubset,
    op: &mut impl EdgeMapOp,
    snapshot: Option<&FlatSnapshot>,
    direction: Direction,
) -> VertexSubset {
    let bound = g.dense_bound() as usize;
    let (_, m) = g.counts();
    let use_dense = match direction {
        Direction::Sparse => false,
        Direction::Dense => true,
        Direction::Auto => {
            let ids = frontier.to_sorted_ids();
            let mut mass = ids.len() as u64;
            for &u in &ids {
                mass += match snapshot {
                    Some(s) => s.degree(u),
                    None => g.find_vertex(u).map_or(0, |h| h.degree()),
                };
            }
            mass > m / 20
        }
    };
    if use_dense {
        edge_map_dense(g, frontier, op, snapshot, bound)
    } else {
        edge_map_sparse(g, frontier, op, snapshot, bound)
    }
}

fn edge_map_sparse(
    g: &GraphVersion,
    frontier: &VertexSubset,
    op: &mut impl EdgeMapOp,
    snapshot: Option<&FlatSnapshot>,
    bound: usize,
) -> VertexSubset {
    let mut in_out = vec![false; bound];
    let mut out = Vec::new();
    for u in frontier.to_sorted_ids() {
        let mut visit = |v: u64| {
            if op.cond(v) && op.update(u, v) && !in_out[v as usize] {
                in_out[v as usize] = true;
                out.push(v);
            }
        };
        match snapshot {
            Some(s) => {
                if let Some(t) = s.get(u) {
                    t.for_each(&mut visit);
                }
            }
            None => {
                if let Some(h) = g.find_vertex(u) {
                    h.edges().for_each(&mut visit);
                }
            }
        }
    }
    VertexSubset::Sparse(out)
}

fn edge_map_dense(
    g: &GraphVersion,
    frontier: &VertexSubset,
    op: &mut impl EdgeMapOp,
    snapshot: Option<&FlatSnapshot>,
    bound: usize,
) -> VertexSubset {
    let in_frontier = frontier.to_flags(bound);
    let mut out = vec![false; bound];
    let mut scan = |v: u64, edges: &CTree| {
        if !op.cond(v) {
            return;
        }
        let mut hit = false;
        let mut done = false;
        edges.for_each(&mut |u| {
            if done || !in_frontier[u as usize] {
                return;
            }
            if op.update(u, v) {
                hit = true;
            }
            if !op.cond(v) {
                done = true;
            }
        });
        if hit {
            out[v as usize] = true;
        }
    };
    match snapshot {
        Some(s) => {
            for v in 0..bound as u64 {
                if let Some(t) = s.get(v) {
                    scan(v, t);
                }
            }
        }
        None => g.for_each_vertex(&mut |v, t| scan(v, t)),
    }
    VertexSubset::Dense(out)
}
