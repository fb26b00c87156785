//! Deduplication of pedigree data sets with the sorted-neighborhood method.
//!
//! The pipeline has three steps:
//!
//! 1. [`search`]: each family is split into its seven core relative types. For
//!    every type the families are blocked, sorted by a randomly drawn weighted
//!    key, and compared inside a sliding window. The result is one candidate
//!    pair set per relative type.
//! 2. [`decision`]: a pair counts as a duplicate when it is a candidate in at
//!    least `threshold` relative types (the intersection score). A greedy
//!    whole-pedigree score is available as an alternative.
//! 3. [`clustering`]: duplicate pairs are closed transitively into clusters and
//!    one representative family is kept per cluster.
//!
//! [`simgen`] produces labeled synthetic corpora with injected duplicates and
//! [`metrics`] scores a clustering against the known truth.

pub mod clustering;
pub mod config;
pub mod decision;
mod error;
pub mod metrics;
pub mod pedigree;
pub mod pipeline;
pub mod rng;
pub mod search;
pub mod simgen;
pub mod value;

pub mod cli;

pub use error::{Error, Result};
pub use pedigree::{Individual, Pedigree, PedigreeSet, RelativeType, Sex};
pub use value::Value;
