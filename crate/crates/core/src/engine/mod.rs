//! The sequential selling rule.
//!
//! Each arriving bid is compared with the highest remaining bid. Under the
//! classic rule, if the newcomer is strictly below that maximum the maximum is
//! executed; otherwise nothing sells and the newcomer simply joins the queue.
//! Two other rules share the same state:
//!
//! * [`Rule::TwoConsecutive`]: the maximum is executed when the new arrival
//!   and the arrival just before it are both strictly below it. The engine
//!   tracks this as a counter of consecutive below-maximum arrivals; after an
//!   execution the triggering arrival is counted again against the new
//!   maximum.
//! * [`Rule::AcceptAll`]: every bid sells at its own price on arrival
//!   ("pay what you want").
//!
//! Among equal remaining prices the earliest bid is executed first.

mod oracle;

pub use oracle::oracle_run;

use crate::numeric::NeumaierSum;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Classic,
    TwoConsecutive,
    AcceptAll,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Classic, Rule::TwoConsecutive, Rule::AcceptAll];

    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::Classic => "classic",
            Rule::TwoConsecutive => "two-consecutive",
            Rule::AcceptAll => "accept-all",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule `{0}` (expected classic, two-consecutive or accept-all)")]
pub struct ParseRuleError(String);

impl FromStr for Rule {
    type Err = ParseRuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "classic" => Ok(Rule::Classic),
            "two-consecutive" | "twoconsecutive" => Ok(Rule::TwoConsecutive),
            "accept-all" | "acceptall" => Ok(Rule::AcceptAll),
            _ => Err(ParseRuleError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("bid {index}: price must be positive and finite, got {price}")]
    InvalidPrice { index: u64, price: f64 },
    #[error("bid {index}: timestamp must be non-negative and finite, got {timestamp}")]
    InvalidTimestamp { index: u64, timestamp: f64 },
}

/// An offered price, numbered from 1 in arrival order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub index: u64,
    pub price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<f64>,
}

/// One executed transaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaleRecord {
    /// 1-based position in the sequence of sales.
    pub sale_ordinal: u64,
    pub price: f64,
    /// Index of the bid that was executed.
    pub accepted_bid_index: u64,
    /// Index of the arrival that caused the execution.
    pub trigger_bid_index: u64,
}

/// Heap key: highest price first, earliest index among ties.
#[derive(Debug, Clone, Copy)]
struct Queued(Bid);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .price
            .total_cmp(&other.0.price)
            .then_with(|| other.0.index.cmp(&self.0.index))
    }
}

/// State of one auction.
///
/// Remaining bids are never pruned: the frozen ones below the critical price
/// are part of what a run reports.
#[derive(Debug, Clone)]
pub struct Engine {
    rule: Rule,
    remaining: BinaryHeap<Queued>,
    bids_seen: u64,
    accepted: u64,
    income: NeumaierSum,
    below_counter: u32,
}

impl Engine {
    pub fn new(rule: Rule) -> Self {
        Self::with_capacity(rule, 0)
    }

    pub fn with_capacity(rule: Rule, capacity: usize) -> Self {
        let capacity = if rule == Rule::AcceptAll { 0 } else { capacity };
        Self {
            rule,
            remaining: BinaryHeap::with_capacity(capacity),
            bids_seen: 0,
            accepted: 0,
            income: NeumaierSum::new(),
            below_counter: 0,
        }
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Number of bids submitted so far (k).
    pub fn bids_seen(&self) -> u64 {
        self.bids_seen
    }

    /// Number of sales so far, Ñ(k).
    pub fn accepted_count(&self) -> u64 {
        self.accepted
    }

    /// Running total income.
    pub fn total_income(&self) -> f64 {
        self.income.value()
    }

    /// Consecutive below-maximum arrivals; only meaningful for
    /// [`Rule::TwoConsecutive`].
    pub fn below_counter(&self) -> u32 {
        self.below_counter
    }

    pub fn remaining_len(&self) -> usize {
        self.remaining.len()
    }

    /// Highest remaining bid, the next one to be executed.
    pub fn peek_max(&self) -> Option<&Bid> {
        self.remaining.peek().map(|q| &q.0)
    }

    /// Remaining bids in arbitrary order.
    pub fn remaining(&self) -> impl Iterator<Item = &Bid> + '_ {
        self.remaining.iter().map(|q| &q.0)
    }

    /// Remaining bids sorted by arrival index.
    pub fn remaining_sorted(&self) -> Vec<Bid> {
        let mut v: Vec<Bid> = self.remaining().copied().collect();
        v.sort_unstable_by_key(|b| b.index);
        v
    }

    pub fn into_remaining_sorted(self) -> Vec<Bid> {
        let mut v: Vec<Bid> = self.remaining.into_vec().into_iter().map(|q| q.0).collect();
        v.sort_unstable_by_key(|b| b.index);
        v
    }

    /// Submit the next bid. Returns the sale it triggered, if any.
    ///
    /// A rejected price leaves the state untouched.
    #[inline]
    pub fn submit(&mut self, price: f64) -> Result<Option<SaleRecord>, EngineError> {
        self.submit_with_time(price, None)
    }

    pub fn submit_with_time(
        &mut self,
        price: f64,
        timestamp: Option<f64>,
    ) -> Result<Option<SaleRecord>, EngineError> {
        let index = self.bids_seen + 1;
        if !(price > 0.0 && price.is_finite()) {
            return Err(EngineError::InvalidPrice { index, price });
        }
        if let Some(t) = timestamp {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(EngineError::InvalidTimestamp {
                    index,
                    timestamp: t,
                });
            }
        }
        self.bids_seen = index;
        let bid = Bid {
            index,
            price,
            timestamp,
        };

        let sale = match self.rule {
            Rule::AcceptAll => Some(self.record_sale(bid, index)),
            Rule::Classic => {
                let fires = matches!(self.remaining.peek(), Some(top) if price < top.0.price);
                let sale = if fires {
                    let top = self.remaining.pop().expect("peeked");
                    Some(self.record_sale(top.0, index))
                } else {
                    None
                };
                self.remaining.push(Queued(bid));
                sale
            }
            Rule::TwoConsecutive => {
                let below = matches!(self.remaining.peek(), Some(top) if price < top.0.price);
                let sale = if below {
                    self.below_counter += 1;
                    if self.below_counter == 2 {
                        let top = self.remaining.pop().expect("peeked");
                        // The trigger already counts against the next maximum.
                        self.below_counter = match self.remaining.peek() {
                            Some(next) if price < next.0.price => 1,
                            _ => 0,
                        };
                        Some(self.record_sale(top.0, index))
                    } else {
                        None
                    }
                } else {
                    self.below_counter = 0;
                    None
                };
                self.remaining.push(Queued(bid));
                sale
            }
        };
        Ok(sale)
    }

    #[inline]
    fn record_sale(&mut self, executed: Bid, trigger: u64) -> SaleRecord {
        self.accepted += 1;
        self.income.add(executed.price);
        SaleRecord {
            sale_ordinal: self.accepted,
            price: executed.price,
            accepted_bid_index: executed.index,
            trigger_bid_index: trigger,
        }
    }
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub rule: Rule,
    pub sales: Vec<SaleRecord>,
    /// Unsold bids, sorted by arrival index.
    pub remaining: Vec<Bid>,
    /// `trajectory[k - 1]` is Ñ(k), the sale count after the k-th bid.
    pub trajectory: Vec<u64>,
    pub total_income: f64,
}

impl RunOutcome {
    pub fn n_bids(&self) -> usize {
        self.trajectory.len()
    }

    pub fn n_sales(&self) -> usize {
        self.sales.len()
    }

    pub fn sale_prices(&self) -> Vec<f64> {
        self.sales.iter().map(|s| s.price).collect()
    }
}

/// Fold [`Engine::submit`] over `prices`.
pub fn run_sequence(rule: Rule, prices: &[f64]) -> Result<RunOutcome, EngineError> {
    let mut engine = Engine::with_capacity(rule, prices.len());
    let mut sales = Vec::new();
    let mut trajectory = Vec::with_capacity(prices.len());
    for &p in prices {
        if let Some(s) = engine.submit(p)? {
            sales.push(s);
        }
        trajectory.push(engine.accepted_count());
    }
    let total_income = engine.total_income();
    Ok(RunOutcome {
        rule,
        sales,
        remaining: engine.into_remaining_sorted(),
        trajectory,
        total_income,
    })
}
