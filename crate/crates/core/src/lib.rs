//! Temporal communication-network extraction from forum post logs, user
//! scoring by network centralities and activity indicators, and evaluation of
//! those scores as predictors of marketplace vendor success.
//!
//! The pipeline runs in four stages over immutable inputs:
//!
//! 1. [`ingest`] loads and validates posts and vendor sales series, and
//!    interpolates per-cutoff current/future sales;
//! 2. [`extraction`] builds one simplified weighted directed graph per
//!    monthly cutoff under the edge-formation rules;
//! 3. [`measures`] scores every active user per snapshot (in-degree,
//!    harmonic closeness, betweenness, PageRank, plus three post-metadata
//!    activity indicators);
//! 4. [`evalmetrics`] turns score tables and sales into difference scores,
//!    percentile recalls, overlaps, ROC sweeps, and tie diagnostics.
//!
//! [`synthgen`] produces seeded synthetic corpora so the whole chain can be
//! exercised without real data.

pub mod error;
pub mod evalmetrics;
pub mod extraction;
pub mod ingest;
pub mod measures;
pub mod months;
pub mod sigfmt;
pub mod synthgen;

pub use error::{Error, Result};
pub use extraction::{decay_weight, extract_snapshot, snapshot_series, CommGraph, ExtractionParams};
pub use ingest::{Corpus, Post, PostFormat, SalesAtCutoff, SalesObservation, UserId};
pub use measures::{Measure, PagerankOptions, ScoreTable};
pub use months::{parse_month_range, Cutoff};
pub use synthgen::{generate as generate_synthetic, SynthConfig, SynthOutput};
