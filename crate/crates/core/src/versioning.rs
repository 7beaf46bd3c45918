//! Single-writer multi-reader version publication.
//!
//! A [`VersionedGraph`] holds the latest [`GraphVersion`] behind an atomic
//! handle. `acquire` hands any thread a consistent version that was current
//! at some point during the call and pins it; `release` unpins it and
//! reports whether the caller held the last copy, at which point the nodes
//! unique to that version are reclaimed through the tree use counts. The
//! single writer takes a token once, builds successor versions with the pure
//! graph update operations, and publishes them with `set`.
//!
//! Readers never block: `acquire`/`release` are a lock-free handle load and
//! an atomic count drop regardless of writer activity. Double release and a
//! second concurrent writer are unrepresentable — releases consume the
//! handle, and `set` demands the one writer guard.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use arc_swap::ArcSwap;

use crate::error::{Error, Result};
use crate::graph::GraphVersion;

pub struct VersionedGraph {
    latest: ArcSwap<GraphVersion>,
    writer_taken: AtomicBool,
}

/// A pinned version. Dereferences to the snapshot; hand it back with
/// [`VersionedGraph::release`] to learn whether it was the last copy (plain
/// drops also reclaim, they just discard the answer).
pub struct VersionRef {
    inner: Arc<GraphVersion>,
}

impl std::ops::Deref for VersionRef {
    type Target = GraphVersion;
    fn deref(&self) -> &GraphVersion {
        &self.inner
    }
}

impl VersionRef {
    /// Shares the underlying snapshot, e.g. to keep it past `release`.
    pub fn snapshot(&self) -> Arc<GraphVersion> {
        Arc::clone(&self.inner)
    }
}

/// Exclusive writer token; released on drop.
pub struct WriterGuard<'a> {
    vg: &'a VersionedGraph,
}

impl Drop for WriterGuard<'_> {
    fn drop(&mut self) {
        self.vg.writer_taken.store(false, Ordering::Release);
    }
}

impl VersionedGraph {
    pub fn new(initial: GraphVersion) -> VersionedGraph {
        VersionedGraph {
            latest: ArcSwap::from_pointee(initial),
            writer_taken: AtomicBool::new(false),
        }
    }

    /// Pins and returns a version that was the latest at some moment during
    /// this call. Never blocks on the writer.
    pub fn acquire(&self) -> VersionRef {
        VersionRef {
            inner: self.latest.load_full(),
        }
    }

    /// Unpins a version. Returns true iff the caller held the last copy
    /// (the latest version is always additionally held by the structure
    /// itself, so releasing it reports false).
    pub fn release(&self, version: VersionRef) -> bool {
        Arc::into_inner(version.inner).is_some()
    }

    /// Claims the single writer role for the lifetime of the guard.
    pub fn writer(&self) -> Result<WriterGuard<'_>> {
        if self
            .writer_taken
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .is_ok()
        {
            Ok(WriterGuard { vg: self })
        } else {
            Err(Error::WriterHeld)
        }
    }

    /// Publishes a successor version; all later `acquire` calls observe it
    /// or something newer. Timestamps must grow strictly.
    pub fn set(&self, _writer: &WriterGuard<'_>, version: Arc<GraphVersion>) {
        let cur = self.latest.load();
        assert!(
            version.timestamp() > cur.timestamp(),
            "set must advance the timestamp ({} -> {})",
            cur.timestamp(),
            version.timestamp()
        );
        self.latest.store(version);
    }

    pub fn latest_timestamp(&self) -> u64 {
        self.latest.load().timestamp()
    }
}
