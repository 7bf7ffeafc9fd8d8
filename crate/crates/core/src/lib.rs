//! Change-based regression test prioritisation.
//!
//! `flipsense` learns which tests tend to flip (pass to fail or back) when
//! particular files change. From a chronological history of builds, each with
//! its change set and test verdicts, it maintains an exponentially decayed
//! file x test sensitivity matrix, ranks tests for a new change set, and
//! replays the history to measure how well small selections catch the tests
//! that actually flip.
//!
//! Modules:
//!
//! - [`history`]: ingest build records, derive flip events and predictable sets
//! - [`sensitivity`]: delta and EMA matrices, slicing, top-n selection,
//!   test-wise incremental updates, heat maps, snapshots
//! - [`baselines`]: seeded random selection, failure-recency scores,
//!   dissimilarity ordering
//! - [`eval`]: precision/recall/F, history replay, alpha sweep, figure tables
//! - [`schedule`]: staleness cost, stable-test strategies, office-hours loop
//! - [`synth`]: deterministic synthetic histories with planted dependencies

pub mod baselines;
pub mod cli;
pub mod error;
pub mod eval;
pub mod history;
pub mod schedule;
pub mod sensitivity;
pub mod synth;

pub use error::{Error, Result};
pub use history::{
    extract_flips, ingest_history, ingest_str, predictable_build_stats, BuildRecord, FlipLedger,
    History, Verdict,
};
pub use sensitivity::{
    build_delta, select_top_n, slice_scores, DMode, MatrixConfig, ScoreMode, ScoreVector,
    SensitivityMatrix, UpdateMode,
};
