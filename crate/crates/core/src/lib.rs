//! Skill-shortage analytics over job-advertisement corpora.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`corpus`] loads and validates ads and builds the job × skill incidence index.
//! * [`skillmetrics`] computes Revealed Comparative Advantage and effective use.
//! * [`similarity`] derives pairwise skill complementarity and expands seed skills
//!   into a ranked target skill set.
//! * [`occupations`] measures each occupation's intensity in the target skills and
//!   selects occupations above a threshold.
//! * [`timeseries`] builds daily posting series, fits a trend + seasonality + holiday
//!   regression, and scores forecasts with SMAPE under a sliding-window backtest.
//! * [`indicators`] computes the five shortage indicators and the shortage report.
//! * [`synthgen`] generates corpora with planted ground truth for testing.

pub mod corpus;
pub mod error;
pub mod indicators;
pub mod occupations;
pub mod similarity;
pub mod skillmetrics;
pub mod synthgen;
pub mod timeseries;

pub use error::{Error, Result};
