//! Purely-functional join-based weight-balanced binary tree.
//!
//! This is the substrate for both the chunked integer sets (`ctree`) and the
//! graph's vertex tree. Nodes are immutable: every update allocates fresh
//! nodes along the touched path and shares everything else through atomic
//! use counts (`Arc`). A tree handle can therefore be cloned in O(1) and read
//! from any number of threads while newer trees are built from it.
//!
//! All structural operations are expressed through a single rebalancing
//! primitive, [`PfTree::join`], in the join-based style: `split`, `union`,
//! `join2`, and `multi_insert` never rebalance on their own.
//!
//! Balance is the weight-balance predicate with `ALPHA = 0.29`: for every
//! node, `ALPHA <= w(left) / (w(left) + w(right)) <= 1 - ALPHA`, where
//! `w(t) = size(t) + 1`. Rebalancing uses single/double rotations inside the
//! heavy-side join walk.
//!
//! Each node carries a monoid summary of its subtree (see [`Augment`]);
//! summaries are recomputed locally on node construction, so they are always
//! coherent with the entries below.
//!
//! Node allocations are instrumented with a process-wide live counter
//! ([`live_node_count`]) so reclamation can be audited: once every handle to
//! a version is dropped, the nodes unique to it are freed recursively by the
//! use counts, and the counter reflects exactly the nodes still reachable.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Weight-balance parameter as a rational (0.29). The valid range for
/// rotation-based rebalancing is roughly [0.25, 0.2929]; 0.29 sits inside it.
const BAL_NUM: u64 = 29;
const BAL_DEN: u64 = 100;

static LIVE_NODES: AtomicU64 = AtomicU64::new(0);

/// Number of tree nodes currently alive in this process, across all key and
/// value types. Intended for reclamation audits.
pub fn live_node_count() -> u64 {
    LIVE_NODES.load(AtomicOrdering::SeqCst)
}

/// Heap footprint of one tree node for the given instantiation: the node
/// struct plus the two use counts the shared handle stores in front of it.
/// Memory accounting in the stats report is built on this.
pub fn node_heap_bytes<K, V, A>() -> u64 {
    (std::mem::size_of::<Node<K, V, A>>() + 2 * std::mem::size_of::<usize>()) as u64
}

/// Associative summary of a subtree's entries, maintained per node.
///
/// `combine` must be associative with `identity` as its unit, and
/// `from_entry` maps a single entry into the monoid. Summaries are folded
/// in key order: `left ⊕ entry ⊕ right`.
pub trait Augment<K, V>: Clone {
    fn identity() -> Self;
    fn from_entry(key: &K, value: &V) -> Self;
    fn combine(a: &Self, b: &Self) -> Self;
}

/// Trivial augmentation for trees that need none.
impl<K, V> Augment<K, V> for () {
    fn identity() -> Self {}
    fn from_entry(_: &K, _: &V) -> Self {}
    fn combine(_: &Self, _: &Self) -> Self {}
}

struct Node<K, V, A> {
    key: K,
    value: V,
    aug: A,
    weight: u64, // node count of this subtree
    left: Link<K, V, A>,
    right: Link<K, V, A>,
}

type Link<K, V, A> = Option<Arc<Node<K, V, A>>>;
type SplitParts<K, V, A> = (Link<K, V, A>, Option<V>, Link<K, V, A>);

impl<K, V, A> Drop for Node<K, V, A> {
    fn drop(&mut self) {
        LIVE_NODES.fetch_sub(1, AtomicOrdering::SeqCst);
    }
}

/// Immutable ordered map from `K` to `V` with an [`Augment`] summary.
///
/// Cloning a tree is O(1) and shares all nodes; operations take their inputs
/// by reference and leave them untouched.
pub struct PfTree<K, V, A = ()> {
    root: Link<K, V, A>,
}

impl<K, V, A> Clone for PfTree<K, V, A> {
    fn clone(&self) -> Self {
        PfTree {
            root: self.root.clone(),
        }
    }
}

fn size<K, V, A>(l: &Link<K, V, A>) -> u64 {
    l.as_ref().map_or(0, |n| n.weight)
}

/// Balance weight: subtree size plus one.
fn bw<K, V, A>(l: &Link<K, V, A>) -> u64 {
    size(l) + 1
}

/// Can subtrees with balance weights `wl`, `wr` be siblings?
fn balanced_pair(wl: u64, wr: u64) -> bool {
    BAL_NUM * (wl + wr) <= BAL_DEN * wl && BAL_DEN * wl <= (BAL_DEN - BAL_NUM) * (wl + wr)
}

/// Does `wl` exceed the `1 - ALPHA` share, i.e. is the left side too heavy?
fn too_heavy(wl: u64, wr: u64) -> bool {
    BAL_DEN * wl > (BAL_DEN - BAL_NUM) * (wl + wr)
}

impl<K, V, A> PfTree<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    pub fn empty() -> Self {
        PfTree { root: None }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Number of entries.
    pub fn len(&self) -> u64 {
        size(&self.root)
    }

    /// Monoid summary of all entries (identity for the empty tree).
    pub fn aug(&self) -> A {
        self.root
            .as_ref()
            .map_or_else(A::identity, |n| n.aug.clone())
    }

    pub fn singleton(key: K, value: V) -> Self {
        PfTree {
            root: mk_node(None, key, value, None),
        }
    }

    /// Builds a balanced tree from entries that must be sorted by key with no
    /// duplicates.
    pub fn build(entries: &[(K, V)]) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::contract("build input must be sorted and unique"));
            }
        }
        Ok(PfTree {
            root: build_sorted(entries),
        })
    }

    /// Root decomposition: `(left, key, value, right)`, or `None` on the
    /// empty tree. The input remains valid; the returned subtrees share its
    /// nodes.
    pub fn expose(&self) -> Option<(Self, &K, &V, Self)> {
        self.root.as_ref().map(|n| {
            (
                PfTree {
                    root: n.left.clone(),
                },
                &n.key,
                &n.value,
                PfTree {
                    root: n.right.clone(),
                },
            )
        })
    }

    /// Joins `left`, the entry `(key, value)`, and `right` into one balanced
    /// tree. Requires every key in `left` < `key` < every key in `right`.
    pub fn join(left: &Self, key: K, value: V, right: &Self) -> Result<Self> {
        if let Some((k, _)) = left.last() {
            if *k >= key {
                return Err(Error::contract("join: left tree reaches past the key"));
            }
        }
        if let Some((k, _)) = right.first() {
            if *k <= key {
                return Err(Error::contract("join: right tree reaches below the key"));
            }
        }
        Ok(PfTree {
            root: join_raw(left.root.clone(), key, value, right.root.clone()),
        })
    }

    /// `join` without the ordering check, for callers whose construction
    /// already guarantees it.
    pub(crate) fn join_unchecked(left: &Self, key: K, value: V, right: &Self) -> Self {
        debug_assert!(left.last().is_none_or(|(k, _)| *k < key));
        debug_assert!(right.first().is_none_or(|(k, _)| *k > key));
        PfTree {
            root: join_raw(left.root.clone(), key, value, right.root.clone()),
        }
    }

    /// Removes the maximum entry, returning the remainder and the entry.
    pub(crate) fn split_last_entry(&self) -> Option<(Self, (K, V))> {
        self.root.as_ref()?;
        let (rest, kv) = split_last(&self.root);
        Some((PfTree { root: rest }, kv))
    }

    /// Joins two trees without a middle entry. Requires every key in `left`
    /// to be smaller than every key in `right`.
    pub fn join2(left: &Self, right: &Self) -> Result<Self> {
        if let (Some((lk, _)), Some((rk, _))) = (left.last(), right.first()) {
            if *lk >= *rk {
                return Err(Error::contract("join2: trees overlap"));
            }
        }
        Ok(PfTree {
            root: join2_raw(left.root.clone(), right.root.clone()),
        })
    }

    /// Splits by `key` into entries strictly below, the value at `key` if
    /// present, and entries strictly above.
    pub fn split(&self, key: &K) -> (Self, Option<V>, Self) {
        let (l, hit, r) = split_rec(&self.root, key);
        (PfTree { root: l }, hit, PfTree { root: r })
    }

    /// Key-set union. Where a key is present on both sides the value becomes
    /// `combine(self_value, other_value)`.
    pub fn union(&self, other: &Self, combine: &impl Fn(&V, &V) -> V) -> Self {
        PfTree {
            root: union_rec(&self.root, &other.root, combine),
        }
    }

    /// Bulk insert of a sorted, duplicate-free update sequence; equivalent to
    /// `self.union(&build(updates), combine)`.
    pub fn multi_insert(&self, updates: &[(K, V)], combine: &impl Fn(&V, &V) -> V) -> Result<Self> {
        let batch = Self::build(updates)?;
        Ok(self.union(&batch, combine))
    }

    /// Removes one key if present.
    pub fn remove(&self, key: &K) -> Self {
        let (l, hit, r) = split_rec(&self.root, key);
        if hit.is_none() {
            return self.clone();
        }
        PfTree {
            root: join2_raw(l, r),
        }
    }

    pub fn find(&self, key: &K) -> Option<&V> {
        let mut cur = &self.root;
        while let Some(n) = cur {
            match key.cmp(&n.key) {
                Ordering::Less => cur = &n.left,
                Ordering::Greater => cur = &n.right,
                Ordering::Equal => return Some(&n.value),
            }
        }
        None
    }

    /// Entry with the largest key `<= key`.
    pub fn find_le(&self, key: &K) -> Option<(&K, &V)> {
        let mut cur = &self.root;
        let mut best = None;
        while let Some(n) = cur {
            match key.cmp(&n.key) {
                Ordering::Less => cur = &n.left,
                Ordering::Greater => {
                    best = Some((&n.key, &n.value));
                    cur = &n.right;
                }
                Ordering::Equal => return Some((&n.key, &n.value)),
            }
        }
        best
    }

    pub fn first(&self) -> Option<(&K, &V)> {
        let mut cur = self.root.as_ref()?;
        while let Some(l) = cur.left.as_ref() {
            cur = l;
        }
        Some((&cur.key, &cur.value))
    }

    pub fn last(&self) -> Option<(&K, &V)> {
        let mut cur = self.root.as_ref()?;
        while let Some(r) = cur.right.as_ref() {
            cur = r;
        }
        Some((&cur.key, &cur.value))
    }

    /// In-order traversal.
    pub fn for_each(&self, f: &mut impl FnMut(&K, &V)) {
        fn go<K, V, A>(l: &Link<K, V, A>, f: &mut impl FnMut(&K, &V)) {
            if let Some(n) = l {
                go(&n.left, f);
                f(&n.key, &n.value);
                go(&n.right, f);
            }
        }
        go(&self.root, f);
    }

    /// In-order fold; equals folding over the entry sequence.
    pub fn fold<B>(&self, init: B, mut f: impl FnMut(B, &K, &V) -> B) -> B {
        let mut acc = Some(init);
        self.for_each(&mut |k, v| {
            let cur = acc.take().expect("fold accumulator");
            acc = Some(f(cur, k, v));
        });
        acc.expect("fold accumulator")
    }

    pub fn iter(&self) -> Iter<'_, K, V, A> {
        let mut it = Iter { stack: Vec::new() };
        it.push_left(&self.root);
        it
    }

    pub fn height(&self) -> usize {
        fn go<K, V, A>(l: &Link<K, V, A>) -> usize {
            l.as_ref().map_or(0, |n| 1 + go(&n.left).max(go(&n.right)))
        }
        go(&self.root)
    }

    /// Inserts the addresses of all reachable nodes into `out`. Used by
    /// reclamation audits to count nodes reachable from a snapshot.
    pub fn collect_node_addrs(&self, out: &mut HashSet<usize>) {
        fn go<K, V, A>(l: &Link<K, V, A>, out: &mut HashSet<usize>) {
            if let Some(n) = l {
                if out.insert(Arc::as_ptr(n) as usize) {
                    go(&n.left, out);
                    go(&n.right, out);
                }
            }
        }
        go(&self.root, out);
    }
}

impl<K, V, A> PfTree<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V> + PartialEq + std::fmt::Debug,
{
    /// Structural audit: key order, cached weights, the weight-balance
    /// predicate on every node, and augmentation coherence against a
    /// recomputed fold. Intended for tests.
    pub fn validate(&self) -> std::result::Result<(), String> {
        type Audit<K, A> = std::result::Result<(u64, A, Option<(K, K)>), String>;
        fn go<K: Ord + Clone, V: Clone, A: Augment<K, V> + PartialEq + std::fmt::Debug>(
            l: &Link<K, V, A>,
        ) -> Audit<K, A> {
            let Some(n) = l else {
                return Ok((0, A::identity(), None));
            };
            let (ls, la, lrange) = go(&n.left)?;
            let (rs, ra, rrange) = go(&n.right)?;
            if let Some((_, lmax)) = &lrange {
                if *lmax >= n.key {
                    return Err("key order violated on the left".into());
                }
            }
            if let Some((rmin, _)) = &rrange {
                if *rmin <= n.key {
                    return Err("key order violated on the right".into());
                }
            }
            let w = ls + rs + 1;
            if w != n.weight {
                return Err(format!("cached weight {} != recomputed {}", n.weight, w));
            }
            if !balanced_pair(ls + 1, rs + 1) {
                return Err(format!("weight-balance violated: left {} right {}", ls, rs));
            }
            let aug = A::combine(&A::combine(&la, &A::from_entry(&n.key, &n.value)), &ra);
            if aug != n.aug {
                return Err(format!(
                    "augmentation incoherent: cached {:?} recomputed {:?}",
                    n.aug, aug
                ));
            }
            let min = lrange.map_or_else(|| n.key.clone(), |(lmin, _)| lmin);
            let max = rrange.map_or_else(|| n.key.clone(), |(_, rmax)| rmax);
            Ok((w, aug, Some((min, max))))
        }
        go(&self.root).map(|_| ())
    }
}

pub struct Iter<'a, K, V, A> {
    stack: Vec<&'a Node<K, V, A>>,
}

impl<'a, K, V, A> Iter<'a, K, V, A> {
    fn push_left(&mut self, mut link: &'a Link<K, V, A>) {
        while let Some(n) = link {
            self.stack.push(n);
            link = &n.left;
        }
    }
}

impl<'a, K, V, A> Iterator for Iter<'a, K, V, A> {
    type Item = (&'a K, &'a V);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.stack.pop()?;
        self.push_left(&n.right);
        Some((&n.key, &n.value))
    }
}

fn mk_node<K, V, A>(left: Link<K, V, A>, key: K, value: V, right: Link<K, V, A>) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    let weight = 1 + size(&left) + size(&right);
    let la = left.as_ref().map_or_else(A::identity, |n| n.aug.clone());
    let ra = right.as_ref().map_or_else(A::identity, |n| n.aug.clone());
    let aug = A::combine(&A::combine(&la, &A::from_entry(&key, &value)), &ra);
    LIVE_NODES.fetch_add(1, AtomicOrdering::SeqCst);
    Some(Arc::new(Node {
        key,
        value,
        aug,
        weight,
        left,
        right,
    }))
}

fn build_sorted<K, V, A>(entries: &[(K, V)]) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if entries.is_empty() {
        return None;
    }
    let mid = entries.len() / 2;
    let (k, v) = entries[mid].clone();
    mk_node(
        build_sorted(&entries[..mid]),
        k,
        v,
        build_sorted(&entries[mid + 1..]),
    )
}

/// Join with rebalancing; ordering precondition is the caller's.
fn join_raw<K, V, A>(left: Link<K, V, A>, key: K, value: V, right: Link<K, V, A>) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if too_heavy(bw(&left), bw(&right)) {
        join_right_heavy(&left, key, value, &right)
    } else if too_heavy(bw(&right), bw(&left)) {
        join_left_heavy(&left, key, value, &right)
    } else {
        mk_node(left, key, value, right)
    }
}

/// Descends the right spine of the heavy left tree, attaches where the two
/// sides may be siblings, and restores balance with rotations on the way up.
fn join_right_heavy<K, V, A>(
    left: &Link<K, V, A>,
    key: K,
    value: V,
    right: &Link<K, V, A>,
) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if !too_heavy(bw(left), bw(right)) {
        return mk_node(left.clone(), key, value, right.clone());
    }
    let ln = left.as_ref().expect("heavy side is nonempty");
    let t = join_right_heavy(&ln.right, key, value, right);
    rebalance_after_right_grow(&ln.left, &ln.key, &ln.value, &t)
}

fn join_left_heavy<K, V, A>(
    left: &Link<K, V, A>,
    key: K,
    value: V,
    right: &Link<K, V, A>,
) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if !too_heavy(bw(right), bw(left)) {
        return mk_node(left.clone(), key, value, right.clone());
    }
    let rn = right.as_ref().expect("heavy side is nonempty");
    let t = join_left_heavy(left, key, value, &rn.left);
    rebalance_after_left_grow(&t, &rn.key, &rn.value, &rn.right)
}

/// Rebuilds `node(left, k, v, grown)` where `grown` may have become too
/// heavy; applies a single or double rotation when needed.
fn rebalance_after_right_grow<K, V, A>(
    left: &Link<K, V, A>,
    k: &K,
    v: &V,
    grown: &Link<K, V, A>,
) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if balanced_pair(bw(left), bw(grown)) {
        return mk_node(left.clone(), k.clone(), v.clone(), grown.clone());
    }
    let g = grown.as_ref().expect("unbalanced side is nonempty");
    if balanced_pair(bw(left), bw(&g.left)) && balanced_pair(bw(left) + bw(&g.left), bw(&g.right)) {
        // Single rotation left.
        mk_node(
            mk_node(left.clone(), k.clone(), v.clone(), g.left.clone()),
            g.key.clone(),
            g.value.clone(),
            g.right.clone(),
        )
    } else {
        // Double rotation: lift grown.left's root.
        let m = g.left.as_ref().expect("double rotation needs inner child");
        mk_node(
            mk_node(left.clone(), k.clone(), v.clone(), m.left.clone()),
            m.key.clone(),
            m.value.clone(),
            mk_node(
                m.right.clone(),
                g.key.clone(),
                g.value.clone(),
                g.right.clone(),
            ),
        )
    }
}

fn rebalance_after_left_grow<K, V, A>(
    grown: &Link<K, V, A>,
    k: &K,
    v: &V,
    right: &Link<K, V, A>,
) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if balanced_pair(bw(grown), bw(right)) {
        return mk_node(grown.clone(), k.clone(), v.clone(), right.clone());
    }
    let g = grown.as_ref().expect("unbalanced side is nonempty");
    if balanced_pair(bw(&g.right), bw(right))
        && balanced_pair(bw(&g.left), bw(&g.right) + bw(right))
    {
        // Single rotation right.
        mk_node(
            g.left.clone(),
            g.key.clone(),
            g.value.clone(),
            mk_node(g.right.clone(), k.clone(), v.clone(), right.clone()),
        )
    } else {
        let m = g.right.as_ref().expect("double rotation needs inner child");
        mk_node(
            mk_node(
                g.left.clone(),
                g.key.clone(),
                g.value.clone(),
                m.left.clone(),
            ),
            m.key.clone(),
            m.value.clone(),
            mk_node(m.right.clone(), k.clone(), v.clone(), right.clone()),
        )
    }
}

/// Removes the maximum entry; returns `(rest, entry)`.
fn split_last<K, V, A>(link: &Link<K, V, A>) -> (Link<K, V, A>, (K, V))
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    let n = link.as_ref().expect("split_last on empty tree");
    match &n.right {
        None => (n.left.clone(), (n.key.clone(), n.value.clone())),
        Some(_) => {
            let (rest, kv) = split_last(&n.right);
            (
                join_raw(n.left.clone(), n.key.clone(), n.value.clone(), rest),
                kv,
            )
        }
    }
}

fn join2_raw<K, V, A>(left: Link<K, V, A>, right: Link<K, V, A>) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    if left.is_none() {
        return right;
    }
    let (rest, (k, v)) = split_last(&left);
    join_raw(rest, k, v, right)
}

fn split_rec<K, V, A>(link: &Link<K, V, A>, key: &K) -> SplitParts<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    let Some(n) = link else {
        return (None, None, None);
    };
    match key.cmp(&n.key) {
        Ordering::Equal => (n.left.clone(), Some(n.value.clone()), n.right.clone()),
        Ordering::Less => {
            let (ll, hit, lr) = split_rec(&n.left, key);
            (
                ll,
                hit,
                join_raw(lr, n.key.clone(), n.value.clone(), n.right.clone()),
            )
        }
        Ordering::Greater => {
            let (rl, hit, rr) = split_rec(&n.right, key);
            (
                join_raw(n.left.clone(), n.key.clone(), n.value.clone(), rl),
                hit,
                rr,
            )
        }
    }
}

fn union_rec<K, V, A>(
    a: &Link<K, V, A>,
    b: &Link<K, V, A>,
    combine: &impl Fn(&V, &V) -> V,
) -> Link<K, V, A>
where
    K: Ord + Clone,
    V: Clone,
    A: Augment<K, V>,
{
    match (a, b) {
        (None, _) => b.clone(),
        (_, None) => a.clone(),
        (Some(_), Some(nb)) => {
            let (al, hit, ar) = split_rec(a, &nb.key);
            let value = match hit {
                Some(va) => combine(&va, &nb.value),
                None => nb.value.clone(),
            };
            let l = union_rec(&al, &nb.left, combine);
            let r = union_rec(&ar, &nb.right, combine);
            join_raw(l, nb.key.clone(), value, r)
        }
    }
}
