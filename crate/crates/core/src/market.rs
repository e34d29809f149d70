//! Market data containers: futures curve, implied-vol slices, discount
//! curve, and historical return series.
//!
//! All times are ACT/365.25 year fractions relative to the valuation date;
//! the conversion happens once at load time (in the IO layer) and every
//! downstream computation works in year fractions only. Vol quotes are
//! stored in log-moneyness `y = log(K / F_j(0))`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::prelude::*;

/// Calendar date, used for provenance and month bucketing only; all model
/// math runs on year fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Date {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

/// One listed futures contract.
#[derive(Debug, Clone, PartialEq)]
pub struct FuturesEntry {
    pub label: String,
    /// Delivery time as a year fraction, strictly positive.
    pub delivery: f64,
    /// Quoted price at valuation, strictly positive.
    pub price: f64,
}

/// Futures curve at the valuation date.
#[derive(Debug, Clone, PartialEq)]
pub struct FuturesCurve {
    pub valuation_date: Option<Date>,
    pub entries: Vec<FuturesEntry>,
}

impl FuturesCurve {
    pub fn new(valuation_date: Option<Date>, entries: Vec<FuturesEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("futures curve has no entries".into()));
        }
        let mut prev = 0.0;
        for (index, e) in entries.iter().enumerate() {
            if !e.delivery.is_finite() || e.delivery <= prev {
                return Err(Error::NonIncreasingDeliveries { index });
            }
            if !e.price.is_finite() || e.price <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "futures price for '{}' must be positive, got {}",
                    e.label, e.price
                )));
            }
            prev = e.delivery;
        }
        Ok(Self { valuation_date, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Delivery times of all contracts, in order.
    pub fn deliveries(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.delivery).collect()
    }

    /// Prices of all contracts, in order.
    pub fn prices(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.price).collect()
    }
}

/// One implied-vol quote in log-moneyness coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolQuote {
    pub log_moneyness: f64,
    pub implied_vol: f64,
}

/// Implied-vol slice for one futures delivery; the option expiry is the
/// single standard liquid maturity of that contract.
#[derive(Debug, Clone, PartialEq)]
pub struct VolSlice {
    pub delivery_index: usize,
    pub expiry: f64,
    pub quotes: Vec<VolQuote>,
}

impl VolSlice {
    pub fn new(delivery_index: usize, expiry: f64, quotes: Vec<VolQuote>) -> Result<Self> {
        if quotes.len() < 3 {
            return Err(Error::InsufficientQuotes { need: 3, got: quotes.len() });
        }
        if !expiry.is_finite() || expiry <= 0.0 {
            return Err(Error::InvalidInput(format!("slice expiry must be positive, got {expiry}")));
        }
        let mut prev = f64::NEG_INFINITY;
        for q in &quotes {
            if !q.log_moneyness.is_finite() || q.log_moneyness <= prev {
                return Err(Error::InvalidInput(
                    "slice log-moneynesses must be finite and strictly increasing".into(),
                ));
            }
            if !q.implied_vol.is_finite() || q.implied_vol <= 0.0 || q.implied_vol >= 5.0 {
                return Err(Error::InvalidInput(format!(
                    "implied vol {} outside (0, 5)",
                    q.implied_vol
                )));
            }
            prev = q.log_moneyness;
        }
        Ok(Self { delivery_index, expiry, quotes })
    }
}

/// Where a delivery's vol slice came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceProvenance {
    /// Quoted directly in the market data.
    Quoted,
    /// Copied from another delivery's slice because this contract has no
    /// liquid option data. The accumulator semantics rescale the donor's
    /// terminal variance by the expiry ratio.
    Borrowed { donor: usize },
}

/// Discount curve with log-linear interpolation in the discount factor,
/// i.e. piecewise-constant instantaneous forwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountCurve {
    times: Vec<f64>,
    log_dfs: Vec<f64>,
}

impl DiscountCurve {
    /// Builds a curve from `(time, discount factor)` pillars. A pillar at
    /// `t = 0` must carry `P = 1` and is inserted if missing. Negative rates
    /// (increasing discount factors) are allowed; non-positive factors are
    /// not.
    pub fn new(pillars: &[(f64, f64)]) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::InvalidInput("discount curve has no pillars".into()));
        }
        let mut times = Vec::with_capacity(pillars.len() + 1);
        let mut log_dfs = Vec::with_capacity(pillars.len() + 1);
        if pillars[0].0 > 0.0 {
            times.push(0.0);
            log_dfs.push(0.0);
        }
        let mut prev = -1.0;
        for &(t, df) in pillars {
            if !t.is_finite() || t < 0.0 || t <= prev {
                return Err(Error::InvalidInput(
                    "discount pillars must have finite, strictly increasing times >= 0".into(),
                ));
            }
            if !df.is_finite() || df <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "discount factor at t={t} must be positive, got {df}"
                )));
            }
            if t == 0.0 && (df - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("P(0,0) must be 1, got {df}")));
            }
            times.push(t);
            log_dfs.push(df.ln());
            prev = t;
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput("discount curve needs a pillar beyond t=0".into()));
        }
        Ok(Self { times, log_dfs })
    }

    /// Flat curve `P(0,t) = exp(-rate * t)` out to `horizon`.
    pub fn flat(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(&[(horizon, (-rate * horizon).exp())])
    }

    pub fn last_pillar(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `log P(0,t)`, log-linear between pillars, extrapolated flat in the
    /// last forward beyond the final pillar.
    pub fn log_discount(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.times[n - 1] {
            return self.log_dfs[n - 1] - self.forward_in_segment(n - 2) * (t - self.times[n - 1]);
        }
        let hi = self.times.partition_point(|&x| x < t).clamp(1, n - 1);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        self.log_dfs[lo] + w * (self.log_dfs[hi] - self.log_dfs[lo])
    }

    /// Discount factor `P(0,t)`.
    pub fn discount(&self, t: f64) -> f64 {
        self.log_discount(t).exp()
    }

    fn forward_in_segment(&self, segment: usize) -> f64 {
        (self.log_dfs[segment] - self.log_dfs[segment + 1])
            / (self.times[segment + 1] - self.times[segment])
    }

    /// Instantaneous forward rate `f(0,t) = -d log P(0,t) / dt`.
    ///
    /// Piecewise constant on pillar segments (right-continuous at pillars);
    /// flat extrapolation of the last forward beyond the final pillar.
    pub fn instantaneous_forward(&self, t: f64) -> f64 {
        let n = self.times.len();
        let segment = if t >= self.times[n - 1] {
            n - 2
        } else {
            self.times.partition_point(|&x| x <= t).clamp(1, n - 1) - 1
        };
        self.forward_in_segment(segment)
    }
}

/// Daily log-return pairs of constant-maturity short- and long-tenor
/// futures, tagged with the calendar month of the observation date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub months: Vec<u32>,
    pub short_tenor: Vec<f64>,
    pub long_tenor: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(months: Vec<u32>, short_tenor: Vec<f64>, long_tenor: Vec<f64>) -> Result<Self> {
        if months.len() != short_tenor.len() || months.len() != long_tenor.len() {
            return Err(Error::InvalidInput("return series columns differ in length".into()));
        }
        if months.iter().any(|&m| !(1..=12).contains(&m)) {
            return Err(Error::InvalidInput("return series months must be in [1, 12]".into()));
        }
        if short_tenor.iter().chain(long_tenor.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("return series values must be finite".into()));
        }
        Ok(Self { months, short_tenor, long_tenor })
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }
}

/// Validated market snapshot: futures curve, one vol slice per delivery
/// (borrowed where the market has none), and the discount curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketBundle {
    pub futures: FuturesCurve,
    pub slices: Vec<VolSlice>,
    pub provenance: Vec<SliceProvenance>,
    pub discount: DiscountCurve,
}

impl MarketBundle {
    /// Assembles a bundle from per-delivery slices, borrowing slices for
    /// deliveries without one: the donor is the next longer contract with
    /// data, or the longest quoted contract at the end of the curve.
    /// Returns the bundle and one warning per borrowed slice.
    pub fn assemble(
        futures: FuturesCurve,
        mut slices: Vec<Option<VolSlice>>,
        discount: DiscountCurve,
    ) -> Result<(Self, Vec<String>)> {
        let n = futures.len();
        if slices.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} slice slots, got {}",
                slices.len()
            )));
        }
        if slices.iter().all(|s| s.is_none()) {
            return Err(Error::InvalidInput("no vol slices supplied".into()));
        }
        for (j, slot) in slices.iter().enumerate() {
            if let Some(s) = slot {
                if s.delivery_index != j {
                    return Err(Error::InvalidInput(format!(
                        "slice keyed to delivery {} stored in slot {j}",
                        s.delivery_index
                    )));
                }
            }
        }

        let mut warnings = Vec::new();
        let mut provenance = Vec::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        let quoted: Vec<usize> =
            (0..n).filter(|&j| slices[j].is_some()).collect();
        for j in 0..n {
            match slices[j].take() {
                Some(s) => {
                    provenance.push(SliceProvenance::Quoted);
                    out.push(s);
                }
                None => {
                    let donor = quoted
                        .iter()
                        .copied()
                        .find(|&k| k > j)
                        .unwrap_or_else(|| *quoted.last().unwrap());
                    // A later donor still sits in `slices`, an earlier one
                    // (end-of-curve case) has already moved into `out`.
                    let quotes = if donor > j {
                        slices[donor].as_ref().expect("donor is quoted").quotes.clone()
                    } else {
                        out[donor].quotes.clone()
                    };
                    warnings.push(format!(
                        "delivery {} ('{}') has no vol slice; borrowing slice of delivery {} ('{}')",
                        j, futures.entries[j].label, donor, futures.entries[donor].label
                    ));
                    provenance.push(SliceProvenance::Borrowed { donor });
                    out.push(VolSlice {
                        delivery_index: j,
                        expiry: futures.entries[j].delivery,
                        quotes,
                    });
                }
            }
        }

        for (j, s) in out.iter().enumerate() {
            if (s.expiry - futures.entries[j].delivery).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "slice expiry {} differs from delivery time {} for contract {j}",
                    s.expiry, futures.entries[j].delivery
                )));
            }
        }

        Ok((Self { futures, slices: out, provenance, discount }, warnings))
    }
}
