//! Large-N predictions and the analysis of finished runs.

mod avalanche;
mod ks;
mod tailfit;
mod theory;

pub use avalanche::{
    log_spaced, segment_avalanches, segment_price_avalanches, survival_function, AvalancheSet,
    Survival, SurvivalPoint,
};
pub use ks::{
    empirical_distribution_checks, ks_critical_value, ks_statistic, DistributionChecks, KsResult,
};
pub use tailfit::{
    fit_power_tail, fit_power_tail_points, theil_sen, TailFit, TailFitOptions, MIN_FIT_POINTS,
};
pub use theory::{theory_summary, TheorySummary, DEFAULT_B};

use crate::numeric::sorted_quantile;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("no sales to analyse")]
    NoSales,
    #[error("no sales above or no remaining bids below xc = {xc}")]
    EmptySide { xc: f64 },
    #[error("no avalanche durations")]
    EmptyDurations,
    #[error("only {found} survival points in the fit window, need at least {required}")]
    TooFewPoints { found: usize, required: usize },
}

/// Model-free critical price: the empirical `pc`-quantile of all offered
/// prices.
pub fn empirical_critical_price(prices: &[f64], pc: f64) -> f64 {
    let mut v = prices.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    sorted_quantile(&v, pc)
}
