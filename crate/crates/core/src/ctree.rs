//! Chunked ordered integer sets over hash-selected heads.
//!
//! A [`CTree`] stores an ordered set of integers as:
//!
//! - a purely-functional tree ([`crate::pftree`]) keyed by the *heads* —
//!   elements `e` with `mix64(e ^ HEAD_SEED) % b == 0` — whose value at each
//!   head is the *tail*: the run of non-head elements strictly between that
//!   head and the next one, difference-coded as a [`Chunk`];
//! - one optional *prefix* chunk holding the elements before the first head.
//!
//! Because head selection depends only on the element, the chunking
//! parameter `b`, and a process-wide seed, an element is a head in every
//! set that contains it. That makes the structure canonical — two sets with
//! equal elements and equal `b` have identical heads, tails, and prefix —
//! and lets the set algebra below splice chunks across inputs without ever
//! re-deriving head status.
//!
//! The expected chunk length is `b`, so the tree holds ~`n/b` nodes and the
//! bulk of the elements live in compressed runs.
//!
//! Set operations follow the join-based recursions of the underlying tree:
//! `union` exposes the second argument's root head, splits the first
//! argument by it, splices the root's tail and the split-off prefix by the
//! neighboring smallest heads, and recurses; `union_bc` handles the base
//! case where one side has no heads at all. `difference`/`intersection`
//! mirror `union` but may drop the exposed head, rejoining with a keyless
//! join. All operations allocate fresh nodes only; inputs are never mutated.

use crate::chunk::Chunk;
use crate::error::{Error, Result};
use crate::hash64::{mix64, HEAD_SEED};
use crate::pftree::{Augment, PfTree};

/// Default expected chunk size.
pub const DEFAULT_CHUNK_PARAM: u64 = 256;

/// Head predicate: fixed for the whole process so that all c-trees agree.
#[inline]
pub fn is_head(e: u64, b: u64) -> bool {
    debug_assert!(b >= 1);
    mix64(e ^ HEAD_SEED).is_multiple_of(b)
}

/// Element count carried as the head tree's augmentation: each entry counts
/// its head plus its tail.
impl Augment<u64, Option<Chunk>> for u64 {
    fn identity() -> Self {
        0
    }
    fn from_entry(_head: &u64, tail: &Option<Chunk>) -> Self {
        1 + tail.as_ref().map_or(0, Chunk::len)
    }
    fn combine(a: &Self, b: &Self) -> Self {
        a + b
    }
}

type HeadTree = PfTree<u64, Option<Chunk>, u64>;

/// Tree-plus-prefix pair the recursive algorithms operate on; `b` rides
/// along only at the public surface.
#[derive(Clone)]
struct Parts {
    tree: HeadTree,
    prefix: Option<Chunk>,
}

impl Parts {
    fn empty() -> Self {
        Parts {
            tree: HeadTree::empty(),
            prefix: None,
        }
    }

    fn is_empty(&self) -> bool {
        self.tree.is_empty() && self.prefix.is_none()
    }

    fn count(&self) -> u64 {
        self.prefix.as_ref().map_or(0, Chunk::len) + self.tree.aug()
    }
}

#[derive(Clone)]
pub struct CTree {
    parts: Parts,
    b: u64,
}

impl std::fmt::Debug for CTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CTree")
            .field("b", &self.b)
            .field("len", &self.size())
            .field("heads", &self.head_count())
            .finish()
    }
}

impl CTree {
    pub fn empty(b: u64) -> CTree {
        assert!(b >= 1, "chunking parameter must be >= 1");
        CTree {
            parts: Parts::empty(),
            b,
        }
    }

    /// Builds the set of the distinct values of `xs` (duplicates collapse).
    pub fn build(xs: &[u64], b: u64) -> CTree {
        assert!(b >= 1, "chunking parameter must be >= 1");
        let mut sorted = xs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        CTree {
            parts: parts_from_sorted(&sorted, b),
            b,
        }
    }

    /// As `build`, but for input that is already sorted and duplicate-free.
    pub fn from_sorted(xs: &[u64], b: u64) -> CTree {
        assert!(b >= 1, "chunking parameter must be >= 1");
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        CTree {
            parts: parts_from_sorted(xs, b),
            b,
        }
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total element count, maintained as the head tree's augmentation plus
    /// the prefix length; constant work.
    pub fn size(&self) -> u64 {
        self.parts.count()
    }

    /// Number of heads (tree nodes).
    pub fn head_count(&self) -> u64 {
        self.parts.tree.len()
    }

    pub fn prefix(&self) -> Option<&Chunk> {
        self.parts.prefix.as_ref()
    }

    /// Visits `(head, tail)` pairs in ascending head order.
    pub fn for_each_head(&self, f: &mut impl FnMut(u64, Option<&Chunk>)) {
        self.parts.tree.for_each(&mut |h, t| f(*h, t.as_ref()));
    }

    pub fn find(&self, e: u64) -> bool {
        find_parts(&self.parts, e)
    }

    /// Applies `f` to every element in ascending order: prefix first, then
    /// per head the head itself followed by its tail.
    pub fn for_each(&self, f: &mut (impl FnMut(u64) + ?Sized)) {
        if let Some(p) = &self.parts.prefix {
            for e in p.iter() {
                f(e);
            }
        }
        self.parts.tree.for_each(&mut |h, t| {
            f(*h);
            if let Some(t) = t {
                for e in t.iter() {
                    f(e);
                }
            }
        });
    }

    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.size() as usize);
        self.for_each(&mut |e| out.push(e));
        out
    }

    /// Splits into elements `< k`, membership of `k`, and elements `> k`.
    /// The left side keeps this tree's prefix role; the right side may gain
    /// a prefix cut out of a tail.
    pub fn split(&self, k: u64) -> (CTree, bool, CTree) {
        let (l, found, r) = split_parts(&self.parts, k);
        (
            CTree {
                parts: l,
                b: self.b,
            },
            found,
            CTree {
                parts: r,
                b: self.b,
            },
        )
    }

    /// Set union. Both sides must carry the same chunking parameter.
    pub fn union(&self, other: &CTree) -> Result<CTree> {
        self.check_param(other)?;
        Ok(CTree {
            parts: union_parts(&self.parts, &other.parts),
            b: self.b,
        })
    }

    /// Union of a prefix-only set (no heads) with an arbitrary set; the base
    /// case of `union`, exposed for direct use. Errors if `self` has heads.
    pub fn union_bc(&self, other: &CTree) -> Result<CTree> {
        self.check_param(other)?;
        if !self.parts.tree.is_empty() {
            return Err(Error::contract("union_bc: first argument has heads"));
        }
        Ok(CTree {
            parts: union_bc_parts(self.parts.prefix.as_ref(), &other.parts),
            b: self.b,
        })
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &CTree) -> Result<CTree> {
        self.check_param(other)?;
        Ok(CTree {
            parts: difference_parts(&self.parts, &other.parts),
            b: self.b,
        })
    }

    /// Elements present in both.
    pub fn intersection(&self, other: &CTree) -> Result<CTree> {
        self.check_param(other)?;
        Ok(CTree {
            parts: intersection_parts(&self.parts, &other.parts),
            b: self.b,
        })
    }

    /// Inserts a batch (unsorted, duplicates allowed).
    pub fn multi_insert(&self, xs: &[u64]) -> CTree {
        if xs.is_empty() {
            return self.clone();
        }
        let batch = CTree::build(xs, self.b);
        self.union(&batch).expect("same chunking parameter")
    }

    /// Deletes a batch (unsorted, duplicates allowed).
    pub fn multi_delete(&self, xs: &[u64]) -> CTree {
        if xs.is_empty() {
            return self.clone();
        }
        let batch = CTree::build(xs, self.b);
        self.difference(&batch).expect("same chunking parameter")
    }

    /// Structural audit for tests: underlying tree invariants, the head
    /// predicate on every position, global element order, and count
    /// coherence.
    pub fn audit(&self) -> std::result::Result<(), String> {
        self.parts.tree.validate()?;
        if let Some(p) = &self.parts.prefix {
            p.decode().map_err(|e| format!("prefix: {e}"))?;
        }
        let mut prev: Option<u64> = None;
        let mut walked = 0u64;
        let mut problem: Option<String> = None;
        let mut step = |e: u64, head_expected: bool, problem: &mut Option<String>| {
            if problem.is_some() {
                return;
            }
            if is_head(e, self.b) != head_expected {
                *problem = Some(format!(
                    "element {e} in a {} position has head status {}",
                    if head_expected { "head" } else { "chunk" },
                    is_head(e, self.b)
                ));
                return;
            }
            if prev.is_some_and(|p| p >= e) {
                *problem = Some(format!("order violated at {e}"));
                return;
            }
            prev = Some(e);
            walked += 1;
        };
        if let Some(p) = &self.parts.prefix {
            for e in p.iter() {
                step(e, false, &mut problem);
            }
        }
        self.parts.tree.for_each(&mut |h, t| {
            step(*h, true, &mut problem);
            if let Some(t) = t {
                if let Err(e) = t.decode() {
                    problem.get_or_insert(format!("tail of {h}: {e}"));
                }
                for e in t.iter() {
                    step(e, false, &mut problem);
                }
            }
        });
        if let Some(p) = problem {
            return Err(p);
        }
        if walked != self.size() {
            return Err(format!(
                "cached count {} != walked count {walked}",
                self.size()
            ));
        }
        Ok(())
    }

    /// Records the addresses of all reachable tree nodes (for reclamation
    /// audits).
    pub fn collect_node_addrs(&self, out: &mut std::collections::HashSet<usize>) {
        self.parts.tree.collect_node_addrs(out);
    }

    fn check_param(&self, other: &CTree) -> Result<()> {
        if self.b != other.b {
            return Err(Error::ChunkParamMismatch(self.b, other.b));
        }
        Ok(())
    }
}

fn parts_from_sorted(sorted: &[u64], b: u64) -> Parts {
    let first_head = sorted.iter().position(|&e| is_head(e, b));
    let Some(first_head) = first_head else {
        return Parts {
            tree: HeadTree::empty(),
            prefix: Chunk::from_sorted(sorted),
        };
    };
    let prefix = Chunk::from_sorted(&sorted[..first_head]);
    let mut entries: Vec<(u64, Option<Chunk>)> = Vec::new();
    let mut i = first_head;
    while i < sorted.len() {
        let head = sorted[i];
        let tail_start = i + 1;
        let mut j = tail_start;
        while j < sorted.len() && !is_head(sorted[j], b) {
            j += 1;
        }
        entries.push((head, Chunk::from_sorted(&sorted[tail_start..j])));
        i = j;
    }
    Parts {
        tree: HeadTree::build(&entries).expect("sorted by construction"),
        prefix,
    }
}

fn find_parts(parts: &Parts, e: u64) -> bool {
    match parts.tree.find_le(&e) {
        Some((h, tail)) => {
            if *h == e {
                true
            } else {
                tail.as_ref().is_some_and(|t| t.contains(e))
            }
        }
        None => parts.prefix.as_ref().is_some_and(|p| p.contains(e)),
    }
}

fn smallest_head(t: &HeadTree) -> Option<u64> {
    t.first().map(|(k, _)| *k)
}

/// Splits a chunk at an optional boundary; `None` sends everything left.
/// The boundary is always a head and chunks hold non-heads, so it can never
/// be a member.
fn split_chunk_below(c: Option<&Chunk>, bound: Option<u64>) -> (Option<Chunk>, Option<Chunk>) {
    match bound {
        None => (c.cloned(), None),
        Some(k) => {
            let (l, found, r) = Chunk::split(c, k);
            debug_assert!(!found, "a head can never live inside a chunk");
            (l, r)
        }
    }
}

/// Split of a headed tree with no prefix; the left result never has a
/// prefix, the right result may gain one cut out of a tail.
fn split_tree(t: &HeadTree, k: u64) -> (HeadTree, bool, Parts) {
    let Some((l, h, tail, r)) = t.expose() else {
        return (HeadTree::empty(), false, Parts::empty());
    };
    let h = *h;
    match k.cmp(&h) {
        std::cmp::Ordering::Equal => (
            l,
            true,
            Parts {
                tree: r,
                prefix: tail.clone(),
            },
        ),
        std::cmp::Ordering::Less => {
            let (ll, found, lr) = split_tree(&l, k);
            (
                ll,
                found,
                Parts {
                    tree: HeadTree::join_unchecked(&lr.tree, h, tail.clone(), &r),
                    prefix: lr.prefix,
                },
            )
        }
        std::cmp::Ordering::Greater => {
            if tail.as_ref().is_some_and(|t| k <= t.last()) {
                let (vl, found, vr) = Chunk::split(tail.as_ref(), k);
                (
                    HeadTree::join_unchecked(&l, h, vl, &HeadTree::empty()),
                    found,
                    Parts {
                        tree: r,
                        prefix: vr,
                    },
                )
            } else {
                let (rl, found, rr) = split_tree(&r, k);
                (
                    HeadTree::join_unchecked(&l, h, tail.clone(), &rl),
                    found,
                    rr,
                )
            }
        }
    }
}

fn split_parts(parts: &Parts, k: u64) -> (Parts, bool, Parts) {
    if let Some(p) = &parts.prefix {
        if k <= p.last() {
            let (pl, found, pr) = Chunk::split(Some(p), k);
            return (
                Parts {
                    tree: HeadTree::empty(),
                    prefix: pl,
                },
                found,
                Parts {
                    tree: parts.tree.clone(),
                    prefix: pr,
                },
            );
        }
    }
    let (lt, found, r) = split_tree(&parts.tree, k);
    (
        Parts {
            tree: lt,
            prefix: parts.prefix.clone(),
        },
        found,
        r,
    )
}

fn union_parts(a: &Parts, b: &Parts) -> Parts {
    if a.tree.is_empty() {
        return union_bc_parts(a.prefix.as_ref(), b);
    }
    if b.tree.is_empty() {
        return union_bc_parts(b.prefix.as_ref(), a);
    }
    let (l2, k2, v2, r2) = b.tree.expose().expect("nonempty");
    let k2 = *k2;
    let v2 = v2.clone();
    let (b1, _, b2) = split_parts(a, k2);
    // Tail elements of k2 that land beyond b2's first head belong to heads
    // inside b2; symmetrically b2's prefix may reach past r2's first head.
    let (v_l, v_r) = split_chunk_below(v2.as_ref(), smallest_head(&b2.tree));
    let (p_l, p_r) = split_chunk_below(b2.prefix.as_ref(), smallest_head(&r2));
    let new_tail = Chunk::union(v_l.as_ref(), p_l.as_ref());
    let cl = union_parts(
        &b1,
        &Parts {
            tree: l2,
            prefix: b.prefix.clone(),
        },
    );
    let cr = union_parts(
        &Parts {
            tree: b2.tree,
            prefix: p_r,
        },
        &Parts {
            tree: r2,
            prefix: v_r,
        },
    );
    debug_assert!(cr.prefix.is_none(), "right union result keeps no prefix");
    Parts {
        tree: HeadTree::join_unchecked(&cl.tree, k2, new_tail, &cr.tree),
        prefix: cl.prefix,
    }
}

/// Union where the first side is a prefix with no heads.
fn union_bc_parts(p1: Option<&Chunk>, c2: &Parts) -> Parts {
    let Some(p1) = p1 else {
        return c2.clone();
    };
    let (p_l, p_r) = split_chunk_below(Some(p1), smallest_head(&c2.tree));
    let tree = match p_r {
        None => c2.tree.clone(),
        Some(p_r) => {
            // Group the spilled elements by the head that owns them and
            // rewrite those heads' tails in one bulk insert.
            let mut updates: Vec<(u64, Option<Chunk>)> = Vec::new();
            let mut group: Vec<u64> = Vec::new();
            let mut group_head: Option<u64> = None;
            let flush = |head: Option<u64>,
                         group: &mut Vec<u64>,
                         updates: &mut Vec<(u64, Option<Chunk>)>| {
                if let Some(h) = head {
                    let old = c2.tree.find(&h).expect("owning head present").clone();
                    let add = Chunk::from_sorted(group);
                    updates.push((h, Chunk::union(old.as_ref(), add.as_ref())));
                    group.clear();
                }
            };
            for e in p_r.iter() {
                let (h, _) = c2.tree.find_le(&e).expect("element past the first head");
                if group_head != Some(*h) {
                    flush(group_head, &mut group, &mut updates);
                    group_head = Some(*h);
                }
                group.push(e);
            }
            flush(group_head, &mut group, &mut updates);
            c2.tree
                .multi_insert(&updates, &|_old, new| new.clone())
                .expect("updates sorted by head")
        }
    };
    Parts {
        tree,
        prefix: Chunk::union(p_l.as_ref(), c2.prefix.as_ref()),
    }
}

/// Joins two part-pairs where everything in `l` precedes everything in `r`.
/// `r`'s prefix is absorbed into `l`'s last tail (or `l`'s prefix when `l`
/// has no heads).
fn join2_parts(l: Parts, r: Parts) -> Parts {
    if l.tree.is_empty() {
        return Parts {
            tree: r.tree,
            prefix: Chunk::concat(l.prefix.as_ref(), r.prefix.as_ref()),
        };
    }
    let (rest, (last_head, last_tail)) = l.tree.split_last_entry().expect("nonempty");
    let tail = Chunk::concat(last_tail.as_ref(), r.prefix.as_ref());
    Parts {
        tree: HeadTree::join_unchecked(&rest, last_head, tail, &r.tree),
        prefix: l.prefix,
    }
}

fn difference_parts(a: &Parts, b: &Parts) -> Parts {
    if a.is_empty() || b.is_empty() {
        return a.clone();
    }
    if b.tree.is_empty() {
        return subtract_chunk(a, b.prefix.as_ref().expect("nonempty"));
    }
    if a.tree.is_empty() {
        let keep: Vec<u64> = a
            .prefix
            .as_ref()
            .expect("nonempty")
            .iter()
            .filter(|&e| !find_parts(b, e))
            .collect();
        return Parts {
            tree: HeadTree::empty(),
            prefix: Chunk::from_sorted(&keep),
        };
    }
    let (l2, k2, v2, r2) = b.tree.expose().expect("nonempty");
    let k2 = *k2;
    // Splitting by k2 drops it from `a` when present, which is exactly the
    // difference semantics for the exposed head.
    let (b1, _, b2) = split_parts(a, k2);
    let cl = difference_parts(
        &b1,
        &Parts {
            tree: l2,
            prefix: b.prefix.clone(),
        },
    );
    let cr = difference_parts(
        &b2,
        &Parts {
            tree: r2,
            prefix: v2.clone(),
        },
    );
    join2_parts(cl, cr)
}

/// Removes the elements of the run `s` from `a`.
fn subtract_chunk(a: &Parts, s: &Chunk) -> Parts {
    // Prefix part: filter out removed elements.
    let prefix = match &a.prefix {
        None => None,
        Some(p) => {
            if p.last() < s.first() || p.first() > s.last() {
                Some(p.clone())
            } else {
                let keep: Vec<u64> = p.iter().filter(|&e| !s.contains(e)).collect();
                Chunk::from_sorted(&keep)
            }
        }
    };
    let mut out = subtract_chunk_tree(&a.tree, s);
    out.prefix = match out.prefix {
        None => prefix,
        Some(op) => Chunk::concat(prefix.as_ref(), Some(&op)),
    };
    out
}

fn subtract_chunk_tree(t: &HeadTree, s: &Chunk) -> Parts {
    let Some((l, h, tail, r)) = t.expose() else {
        return Parts::empty();
    };
    let h = *h;
    let (s_lo, h_removed, s_hi) = Chunk::split(Some(s), h);
    let (s_mid, s_r) = split_chunk_below(s_hi.as_ref(), smallest_head(&r));
    let left = match s_lo {
        None => Parts {
            tree: l,
            prefix: None,
        },
        Some(s_lo) => subtract_chunk_tree(&l, &s_lo),
    };
    let right = match s_r {
        None => Parts {
            tree: r,
            prefix: None,
        },
        Some(s_r) => subtract_chunk_tree(&r, &s_r),
    };
    let new_tail = match s_mid {
        None => tail.clone(),
        Some(s_mid) => match &tail {
            None => None,
            Some(t) => {
                let keep: Vec<u64> = t.iter().filter(|&e| !s_mid.contains(e)).collect();
                Chunk::from_sorted(&keep)
            }
        },
    };
    if h_removed {
        let mid = Parts {
            tree: HeadTree::empty(),
            prefix: new_tail,
        };
        join2_parts(join2_parts(left, mid), right)
    } else {
        let tail = Chunk::concat(new_tail.as_ref(), right.prefix.as_ref());
        Parts {
            tree: HeadTree::join_unchecked(&left.tree, h, tail, &right.tree),
            prefix: left.prefix,
        }
    }
}

fn intersection_parts(a: &Parts, b: &Parts) -> Parts {
    if a.is_empty() || b.is_empty() {
        return Parts::empty();
    }
    if b.tree.is_empty() {
        let keep: Vec<u64> = b
            .prefix
            .as_ref()
            .expect("nonempty")
            .iter()
            .filter(|&e| find_parts(a, e))
            .collect();
        return Parts {
            tree: HeadTree::empty(),
            prefix: Chunk::from_sorted(&keep),
        };
    }
    if a.tree.is_empty() {
        let keep: Vec<u64> = a
            .prefix
            .as_ref()
            .expect("nonempty")
            .iter()
            .filter(|&e| find_parts(b, e))
            .collect();
        return Parts {
            tree: HeadTree::empty(),
            prefix: Chunk::from_sorted(&keep),
        };
    }
    let (l2, k2, v2, r2) = b.tree.expose().expect("nonempty");
    let k2 = *k2;
    let (b1, k2_in_a, b2) = split_parts(a, k2);
    let cl = intersection_parts(
        &b1,
        &Parts {
            tree: l2,
            prefix: b.prefix.clone(),
        },
    );
    let cr = intersection_parts(
        &b2,
        &Parts {
            tree: r2,
            prefix: v2.clone(),
        },
    );
    if k2_in_a {
        // k2 survives; the right side's leading run becomes its tail.
        Parts {
            tree: HeadTree::join_unchecked(&cl.tree, k2, cr.prefix, &cr.tree),
            prefix: cl.prefix,
        }
    } else {
        join2_parts(cl, cr)
    }
}
