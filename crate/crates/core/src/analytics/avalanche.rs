//! Avalanches: maximal runs of consecutive sales priced above the critical
//! price, delimited on both sides by a sale at or below it.

use super::AnalyticsError;
use crate::engine::SaleRecord;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvalancheSet {
    /// Durations of complete avalanches, in sale order.
    pub durations: Vec<u64>,
    /// A non-empty run above xc precedes the first delimiter.
    pub left_censored_first: bool,
    /// A non-empty run above xc follows the last delimiter.
    pub right_censored_last: bool,
    /// Length of the leading censored run. When no delimiter exists at all
    /// the whole sequence is one run, counted here, with both flags set.
    pub leading_run: u64,
    pub trailing_run: u64,
    /// Number of sales at or below xc.
    pub delimiters: u64,
    pub xc_used: f64,
}

impl AvalancheSet {
    pub fn total_sales(&self) -> u64 {
        self.durations.iter().sum::<u64>() + self.delimiters + self.leading_run + self.trailing_run
    }

    pub fn mean_duration(&self) -> Option<f64> {
        if self.durations.is_empty() {
            None
        } else {
            Some(self.durations.iter().sum::<u64>() as f64 / self.durations.len() as f64)
        }
    }
}

pub fn segment_avalanches(sales: &[SaleRecord], xc: f64) -> AvalancheSet {
    segment_price_avalanches(sales.iter().map(|s| s.price), xc)
}

/// Segment a sale-price sequence. A price exactly equal to `xc` is a
/// delimiter.
pub fn segment_price_avalanches<I>(prices: I, xc: f64) -> AvalancheSet
where
    I: IntoIterator<Item = f64>,
{
    let mut durations = Vec::new();
    let mut delimiters = 0u64;
    let mut leading_run = 0u64;
    let mut run = 0u64;
    for p in prices {
        if p > xc {
            run += 1;
            continue;
        }
        if delimiters == 0 {
            leading_run = run;
        } else if run > 0 {
            durations.push(run);
        }
        delimiters += 1;
        run = 0;
    }
    let (leading_run, trailing_run, left, right) = if delimiters == 0 {
        (run, 0, run > 0, run > 0)
    } else {
        (leading_run, run, leading_run > 0, run > 0)
    };
    AvalancheSet {
        durations,
        left_censored_first: left,
        right_censored_last: right,
        leading_run,
        trailing_run,
        delimiters,
        xc_used: xc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub k: u64,
    /// Empirical P(τ > k).
    pub p: f64,
}

/// Empirical survival function of avalanche durations.
#[derive(Debug, Clone, PartialEq)]
pub struct Survival {
    sorted: Vec<u64>,
}

impl Survival {
    pub fn new(durations: &[u64]) -> Result<Self, AnalyticsError> {
        if durations.is_empty() {
            return Err(AnalyticsError::EmptyDurations);
        }
        let mut sorted = durations.to_vec();
        sorted.sort_unstable();
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// P(τ > k).
    pub fn at(&self, k: u64) -> f64 {
        let le = self.sorted.partition_point(|&d| d <= k);
        (self.sorted.len() - le) as f64 / self.sorted.len() as f64
    }

    /// Points at k = 0 and at every observed duration.
    pub fn points(&self) -> Vec<SurvivalPoint> {
        let mut ks: Vec<u64> = std::iter::once(0)
            .chain(self.sorted.iter().copied())
            .collect();
        ks.dedup();
        ks.into_iter()
            .map(|k| SurvivalPoint { k, p: self.at(k) })
            .collect()
    }

    /// Points on a log-spaced grid of integers in `[k_min, k_max]`.
    pub fn log_grid(&self, k_min: u64, k_max: u64, per_decade: u32) -> Vec<SurvivalPoint> {
        log_spaced(k_min, k_max, per_decade)
            .into_iter()
            .map(|k| SurvivalPoint { k, p: self.at(k) })
            .collect()
    }
}

/// Distinct integers `round(k_min · 10^(i / per_decade))` up to `k_max`,
/// always including both ends.
pub fn log_spaced(k_min: u64, k_max: u64, per_decade: u32) -> Vec<u64> {
    let k_min = k_min.max(1);
    if k_max < k_min {
        return Vec::new();
    }
    let step = 10f64.powf(1.0 / per_decade.max(1) as f64);
    let mut out = vec![k_min];
    let mut x = k_min as f64;
    loop {
        x *= step;
        let k = x.round() as u64;
        if k >= k_max {
            break;
        }
        if k > *out.last().unwrap() {
            out.push(k);
        }
    }
    if *out.last().unwrap() != k_max {
        out.push(k_max);
    }
    out
}

pub fn survival_function(durations: &[u64]) -> Result<Vec<SurvivalPoint>, AnalyticsError> {
    Ok(Survival::new(durations)?.points())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counted_runs() {
        let a = segment_price_avalanches([0.5, 1.2, 1.3, 0.8, 1.1, 0.7], 1.0);
        assert_eq!(a.durations, vec![2, 1]);
        assert!(!a.left_censored_first && !a.right_censored_last);
        assert_eq!(a.total_sales(), 6);
    }

    #[test]
    fn left_censored_run() {
        let a = segment_price_avalanches([1.2, 1.3, 0.8], 1.0);
        assert!(a.durations.is_empty());
        assert!(a.left_censored_first && !a.right_censored_last);
        assert_eq!(a.leading_run, 2);
        assert_eq!(a.total_sales(), 3);
    }

    #[test]
    fn all_above() {
        let a = segment_price_avalanches([1.2, 1.3, 1.5], 1.0);
        assert!(a.durations.is_empty());
        assert!(a.left_censored_first && a.right_censored_last);
        assert_eq!(a.total_sales(), 3);
    }

    #[test]
    fn exact_threshold_is_delimiter() {
        let a = segment_price_avalanches([0.5, 2.0, 1.0, 2.0, 2.0, 0.1, 3.0], 1.0);
        assert_eq!(a.durations, vec![1, 2]);
        assert_eq!(a.delimiters, 3);
        assert!(a.right_censored_last);
        assert_eq!(a.total_sales(), 7);
    }

    #[test]
    fn empty_sales() {
        let a = segment_avalanches(&[], 1.0);
        assert!(a.durations.is_empty() && !a.left_censored_first && !a.right_censored_last);
    }

    #[test]
    fn survival_direct_count() {
        let s = Survival::new(&[1, 1, 2, 5]).unwrap();
        assert_eq!(s.at(0), 1.0);
        assert_eq!(s.at(1), 0.5);
        assert_eq!(s.at(2), 0.25);
        assert_eq!(s.at(4), 0.25);
        assert_eq!(s.at(5), 0.0);
        let pts = survival_function(&[1, 1, 2, 5]).unwrap();
        let ks: Vec<u64> = pts.iter().map(|p| p.k).collect();
        assert_eq!(ks, vec![0, 1, 2, 5]);
    }

    #[test]
    fn constant_durations_step() {
        let s = Survival::new(&[3; 10]).unwrap();
        assert_eq!(s.at(2), 1.0);
        assert_eq!(s.at(3), 0.0);
    }

    #[test]
    fn survival_needs_data() {
        assert!(matches!(
            survival_function(&[]),
            Err(AnalyticsError::EmptyDurations)
        ));
    }

    #[test]
    fn grid_is_log_spaced() {
        let g = log_spaced(100, 10_000, 10);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&10_000));
        assert_eq!(g.len(), 21);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_spaced(1, 3, 20), vec![1, 2, 3]);
    }
}
