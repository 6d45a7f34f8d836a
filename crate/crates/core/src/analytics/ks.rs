//! One-sample Kolmogorov–Smirnov checks of the sold and frozen price
//! distributions against the truncated laws they converge to.

use super::AnalyticsError;
use crate::distributions::PriceModel;
use crate::engine::{Bid, SaleRecord};
use serde::{Deserialize, Serialize};

/// sup |F_n − F| for a sample and a continuous cdf.
pub fn ks_statistic<F>(sample: &[f64], cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the KS statistic at significance `alpha`:
/// sqrt(−ln(alpha/2) / 2) / sqrt(n).
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    /// Critical value at the 1% level.
    pub critical_1pct: f64,
}

impl KsResult {
    fn new(statistic: f64, n: usize) -> Self {
        Self {
            statistic,
            n,
            critical_1pct: ks_critical_value(n, 0.01),
        }
    }

    pub fn passes(&self) -> bool {
        self.statistic < self.critical_1pct
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionChecks {
    pub xc: f64,
    /// Sale prices above xc against f restricted to (xc, ∞).
    pub sales_above: KsResult,
    /// Remaining prices at or below xc against f restricted to (0, xc].
    pub remaining_below: KsResult,
    /// Fraction of sales at or below xc.
    pub fraction_sales_at_or_below_xc: f64,
    /// Remaining bids priced above xc (the still-active ones).
    pub remaining_above_xc: usize,
}

pub fn empirical_distribution_checks(
    sales: &[SaleRecord],
    remaining: &[Bid],
    model: &PriceModel,
    xc: f64,
) -> Result<DistributionChecks, AnalyticsError> {
    if sales.is_empty() {
        return Err(AnalyticsError::NoSales);
    }
    let above: Vec<f64> = sales.iter().map(|s| s.price).filter(|&p| p > xc).collect();
    let below: Vec<f64> = remaining
        .iter()
        .map(|b| b.price)
        .filter(|&p| p <= xc)
        .collect();
    if above.is_empty() || below.is_empty() {
        return Err(AnalyticsError::EmptySide { xc });
    }

    let f_xc = model.cdf(xc);
    let s_xc = model.sf(xc);
    let ks_sales = ks_statistic(&above, |y| (1.0 - model.sf(y) / s_xc).clamp(0.0, 1.0));
    let ks_remaining = ks_statistic(&below, |x| (model.cdf(x) / f_xc).clamp(0.0, 1.0));

    Ok(DistributionChecks {
        xc,
        sales_above: KsResult::new(ks_sales, above.len()),
        remaining_below: KsResult::new(ks_remaining, below.len()),
        fraction_sales_at_or_below_xc: (sales.len() - above.len()) as f64 / sales.len() as f64,
        remaining_above_xc: remaining.len() - below.len(),
    })
}
