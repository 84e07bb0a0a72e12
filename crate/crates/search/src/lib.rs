//! Exhaustive verification searches over `Z_3^3` and the splitting solver
//! for `Z_3 + Z_3 + Z_3d`.
//!
//! - [`levels`]: shared level-wise isomorph-free enumeration;
//! - [`constants`]: the table of zero-sum constants with extremal witnesses;
//! - [`atlas`]: classification lemmas as executable checks;
//! - [`labeling`]: infeasibility of zero-sum label systems over moduli
//!   coprime to 6;
//! - [`splitting`]: the constructive zero-sum extractor for
//!   `Z_3 + Z_3 + Z_3d`.

pub mod atlas;
pub mod constants;
pub mod labeling;
pub mod levels;
pub mod splitting;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Core(#[from] zslab_core::CoreError),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
    #[error("no zero-sum certificate found for a sequence of length {len}; this contradicts the theorem, input dump:\n{dump}")]
    TheoremViolation { len: u64, dump: String },
}
