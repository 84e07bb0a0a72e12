//! Exact combinatorics of zero-sum sequences over finite abelian groups.
//!
//! The crate provides four layers:
//!
//! - [`group`] / [`multiset`]: invariant-factor groups, elements, multisets
//!   and zero-sum certificates;
//! - [`engine`]: zero-sum detection (shortest/longest zero-sum sub-multisets,
//!   disjoint packings, bounded representability);
//! - [`symmetry`]: the GL(r, p) action on elementary abelian groups, with
//!   canonical forms and orbit deduplication;
//! - [`intlinalg`]: exact integer linear algebra (Smith normal form, ranks
//!   over prime fields, modular feasibility).
//!
//! Everything is exact: no floating point, no sampling, no truncation. Size
//! guards return errors instead of silently degrading.

pub mod engine;
pub mod group;
pub mod intlinalg;
pub mod multiset;
pub mod symmetry;

pub use group::{GroupElement, GroupSpec};
pub use multiset::{GroupMultiset, ZerosumCertificate};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("invalid element: {0}")]
    BadElement(String),
    #[error("elements belong to different groups")]
    SpecMismatch,
    #[error("selection is not a sub-multiset of its parent")]
    NotASubMultiset,
    #[error("invalid certificate: {0}")]
    BadCertificate(String),
    #[error("{what}: size {got} exceeds guard {limit}")]
    SizeGuard {
        what: &'static str,
        limit: u64,
        got: u64,
    },
    #[error("operation requires an elementary abelian group, got {0}")]
    NotElementary(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    InvalidArgument(String),
}
