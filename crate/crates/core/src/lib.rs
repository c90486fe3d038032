//! Bounded-variation price model.
//!
//! Prices are treated as an everywhere-discontinuous function of bounded
//! variation on `[a, b]`. The crate provides:
//!
//! - [`ticks`]: tick series ingestion, synthesis and equal-width elementary segments;
//! - [`variation`]: total variation, Jordan decomposition and segment oscillations;
//! - [`structure`]: oscillation density and the structure parameters `α₁`, `α₂`, `α`;
//! - [`counting`]: the exact and Gaussian distribution of endpoint differences,
//!   shifted frames, enumeration and sampling;
//! - [`fattails`]: the heavy-tailed correction and its Monte-Carlo histogram;
//! - [`indicator`]: moments implied by `α`, decline probability, bands and a
//!   rolling indicator;
//! - [`cli`]: the `bvprice` command-line surface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counting;
pub mod error;
pub mod fattails;
pub mod indicator;
pub mod structure;
pub mod ticks;
pub mod variation;

pub use error::{Error, Result};
pub use ticks::{TickPoint, TickSeries};
