//! Quintuple-parity erasure code over GF(2^m).
//!
//! A systematic linear code with `k` data symbols and 5 parity symbols per
//! stripe. The code has minimum distance 5, so within a single stripe it
//! corrects any combination of `Z` erasures (known locations) and `E` errors
//! (unknown locations) with `Z + 2E <= 4`. Beyond that budget, a list decoder
//! enumerates the candidate explanations for 3- and 4-drive failures.
//!
//! The crate is organized around the decoding pipeline:
//!
//! - [`galois`] — GF(2^m) arithmetic for m in {3, 4, 8, 16}, including the
//!   characteristic-2 quadratic solver that drives error localization.
//! - [`code`] — code construction (locator sequence, parity matrix views),
//!   encoding and syndrome computation.
//! - [`mindist`] — guaranteed-unique decoding within minimum distance:
//!   up to 2 unknown errors, up to 4 erasures, and combined budgets.
//! - [`beyond`] — list decoding beyond minimum distance for 3- and 4-drive
//!   failures, degraded-mode systems, and multi-syndrome location.
//! - [`shardset`] — an on-disk shard format plus encode/reassemble/scrub/inject
//!   commands (the CLI wraps these).
//! - [`faultlab`] — a brute-force nearest-codeword oracle and deterministic
//!   Monte Carlo fault-injection campaigns.

pub mod beyond;
pub mod code;
pub mod faultlab;
pub mod galois;
pub mod mindist;
pub mod shardset;

mod types;

pub use code::{CodeParams, ParityColumn, Stripe, Syndrome};
pub use galois::{Element, FieldSpec, FieldTables, OpCounts};
pub use types::{
    CandidateErrorList, Classification, DecodeOutcome, ErasureSet, ErrorVector, PARITY_COUNT,
};
