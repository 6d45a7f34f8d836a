//! Quadratic reference implementation of the selling rules.
//!
//! Keeps the remaining bids in arrival order and finds the maximum by a full
//! scan at every step. Shares no queue code with [`super::Engine`]; it exists
//! to check the heap-based engine and is only practical for short sequences.

use super::{Bid, EngineError, Rule, RunOutcome, SaleRecord};
use crate::numeric::NeumaierSum;

/// Position of the highest remaining price, earliest arrival among ties.
fn scan_max(remaining: &[Bid]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, b) in remaining.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(j) if b.price > remaining[j].price => best = Some(i),
            _ => {}
        }
    }
    best
}

pub fn oracle_run(rule: Rule, prices: &[f64]) -> Result<RunOutcome, EngineError> {
    if let Some((i, &p)) = prices
        .iter()
        .enumerate()
        .find(|(_, &p)| !(p > 0.0 && p.is_finite()))
    {
        return Err(EngineError::InvalidPrice {
            index: i as u64 + 1,
            price: p,
        });
    }

    let mut remaining: Vec<Bid> = Vec::new();
    let mut sales: Vec<SaleRecord> = Vec::new();
    let mut trajectory = Vec::with_capacity(prices.len());
    let mut income = NeumaierSum::new();
    let mut previous: Option<f64> = None;

    for (i, &price) in prices.iter().enumerate() {
        let index = i as u64 + 1;
        let bid = Bid {
            index,
            price,
            timestamp: None,
        };
        let executed: Option<Bid> = match rule {
            Rule::AcceptAll => Some(bid),
            Rule::Classic => match scan_max(&remaining) {
                Some(j) if price < remaining[j].price => Some(remaining.remove(j)),
                _ => None,
            },
            // Sell the maximum when this arrival and the previous one are
            // both strictly below it.
            Rule::TwoConsecutive => match (scan_max(&remaining), previous) {
                (Some(j), Some(prev))
                    if price < remaining[j].price && prev < remaining[j].price =>
                {
                    Some(remaining.remove(j))
                }
                _ => None,
            },
        };
        if let Some(x) = executed {
            income.add(x.price);
            sales.push(SaleRecord {
                sale_ordinal: sales.len() as u64 + 1,
                price: x.price,
                accepted_bid_index: x.index,
                trigger_bid_index: index,
            });
        }
        if rule != Rule::AcceptAll {
            remaining.push(bid);
        }
        trajectory.push(sales.len() as u64);
        previous = Some(price);
    }

    Ok(RunOutcome {
        rule,
        sales,
        remaining,
        trajectory,
        total_income: income.value(),
    })
}
