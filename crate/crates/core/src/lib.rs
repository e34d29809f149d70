//! Two-factor lognormal commodity futures curve model extended with
//! per-delivery leverage functions.
//!
//! The crate covers the full desk workflow behind the model:
//!
//! - [`market`]: futures curves, per-delivery implied-vol slices, discount
//!   curve, historical return series;
//! - [`andersen`]: the two-factor volatility backbone, its ATM implied-vol
//!   identity, seasonality fit, and historical long-end correlation;
//! - [`tiv`]: total-implied-variance surfaces built from a single slice per
//!   delivery under pluggable accumulation schemes;
//! - [`black`]: Black-76 analytics in log-moneyness coordinates;
//! - [`rates`]: G1++ short rate with exact joint simulation of the factor
//!   and its time integral;
//! - [`leverage`]: leverage-function calibration, closed form under
//!   deterministic rates and bootstrap-with-Monte-Carlo under stochastic
//!   rates;
//! - [`engine`]: correlated path generation, antithetic variates, vanilla
//!   pricing, and realized-variance diagnostics.
//!
//! The crate is `no_std`-compatible (with `alloc`); all file formats and
//! command-line plumbing live in the companion `lvc-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod andersen;
pub mod black;
pub mod engine;
pub mod error;
pub mod leverage;
pub mod market;
pub mod math;
pub mod rates;
pub mod tiv;

pub use error::{Error, Result};
