//! Crate-wide error type.

use alloc::string::String;
use thiserror::Error;

/// Errors produced by market validation, calibration, and pricing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Futures delivery times must be strictly increasing.
    #[error("non-increasing deliveries at entry {index}")]
    NonIncreasingDeliveries { index: usize },

    /// A volatility slice needs at least this many quotes.
    #[error("insufficient quotes: need at least {need}, got {got}")]
    InsufficientQuotes { need: usize, got: usize },

    /// Model parameters outside the admissible region (e.g. negative
    /// at-the-money variance).
    #[error("invalid parameter region: {0}")]
    InvalidParameterRegion(String),

    /// Return series with zero variance cannot be correlated.
    #[error("degenerate returns: {0}")]
    DegenerateReturns(String),

    /// The least-squares solver did not reach the requested tolerance.
    #[error("optimizer did not converge after {iterations} iterations (cost {cost:e})")]
    NonConvergence { iterations: usize, cost: f64 },

    /// Option price violates static arbitrage bounds.
    #[error("price {price} outside arbitrage bounds ({lower}, {upper})")]
    PriceOutOfBounds { price: f64, lower: f64, upper: f64 },

    /// Total implied variance increments that cannot be repaired.
    #[error("degenerate total implied variance: {0}")]
    DegenerateTiv(String),

    /// Too many leverage nodes hit their clamps on one calibration slice.
    #[error("excessive clamping on slice {slice_index}: {percent:.1}% of nodes")]
    ExcessiveClamping { slice_index: usize, percent: f64 },

    /// Root finder failed to bracket or converge.
    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = core::result::Result<T, Error>;
