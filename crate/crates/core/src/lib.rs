//! Corpus pipeline and evaluation toolkit for adverse-event (AE) text mining.
//!
//! The crate moves data through three stages:
//!
//! 1. [`corpus`] loads heterogeneous AE datasets (canonical JSONL, IOB token
//!    files, span TSV) into one record model, assigns stratified splits, and
//!    reports per-dataset statistics.
//! 2. [`framing`] turns records into prefix-tagged text-to-text instances,
//!    and [`mixer`] draws task- and dataset-balanced training schedules from
//!    any number of datasets.
//! 3. [`eval`] scores model outputs (classification P/R/F1, strict and
//!    partial span matching, McNemar tests, readability), with [`oracle`]
//!    providing reference models that exercise the whole loop.
//!
//! Numeric kernels (mixture weights, temperature scaling, metric arithmetic)
//! are generic over the scalar type through [`scalar::Real`]; the pipeline
//! itself runs on the concrete aliases below. All randomness flows from
//! explicit seeds, so every artifact is reproducible byte for byte.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod framing;
pub mod mixer;
pub mod oracle;
pub mod predictions;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};

/// Scalar type used for probabilities and mixture weights.
pub type Prob = f64;

/// Scalar type used for metric values and statistics.
pub type Score = f64;
