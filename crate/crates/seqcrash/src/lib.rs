//! Sequence-of-events mining for automated-vehicle crash records.
//!
//! The crate ingests crash event sequences encoded over a closed label
//! alphabet and provides the analysis pipeline end to end:
//!
//! - [`corpus`]: alphabet/sequence/corpus types, CSV ingestion and
//!   validation, summary statistics, crash rates, and the bundled
//!   2015-2019 California AV corpus ([`bundled`]).
//! - [`mining`]: subsequence and n-gram frequency mining with
//!   per-sequence containment counting.
//! - [`transition`]: first-order event-transition probabilities with
//!   forward and reverse conditionals and focal-label reports.
//! - [`alignment`]: optimal-matching distances (Levenshtein variants and
//!   Hamming) and the pairwise dissimilarity matrix.
//! - [`clustering`]: deterministic PAM k-medoids, silhouette widths, and a
//!   k-sweep for model selection.
//! - [`stats`]: contingency tables and Pearson chi-square tests of
//!   independence.

pub mod alignment;
pub mod bundled;
pub mod clustering;
pub mod corpus;
pub mod error;
pub mod mining;
pub mod stats;
pub mod transition;

pub use error::{Error, Result};
