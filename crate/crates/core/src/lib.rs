//! Compressed purely-functional search trees and a streaming graph built on them.
//!
//! The crate is organized bottom-up:
//!
//! - [`pftree`]: an immutable, join-based, weight-balanced binary tree with
//!   monoid augmentation and reference-counted structural sharing. Every
//!   update copies the touched root-to-leaf path and shares the rest.
//! - [`chunk`]: sorted integer runs stored as difference-coded varints with
//!   constant-work access to the first/last element.
//! - [`ctree`]: an ordered integer set chunked over hash-selected "head"
//!   elements; heads live in a [`pftree`] with their tail chunks as values,
//!   plus one optional prefix chunk before the first head.
//! - [`graph`]: immutable graph snapshots as a vertex tree whose values are
//!   per-vertex edge sets ([`ctree::CTree`]), with batch updates, frontier
//!   traversal (`edge_map`), flat snapshots, and direction optimization.
//! - [`versioning`]: single-writer multi-reader publication of graph
//!   snapshots with non-blocking readers and use-count reclamation.
//! - [`algorithms`]: queries over a single snapshot (BFS, single-source
//!   betweenness, MIS, 2-hop neighborhoods).
//!
//! All shared structures are immutable after construction; concurrent readers
//! need no coordination beyond the atomic use counts inside the tree handles.

pub mod algorithms;
pub mod chunk;
pub mod ctree;
pub mod error;
pub mod graph;
pub mod hash64;
pub mod pftree;
pub mod versioning;

pub use error::Error;
