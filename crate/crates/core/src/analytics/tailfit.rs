//! Robust power-law fit of a survival tail.
//!
//! The slope of log P(τ > k) against log k is the median of all pairwise
//! slopes (Theil–Sen) over survival points in a fixed window of k. Points
//! are taken on a log-spaced grid so that small k does not dominate, and the
//! median ignores the finite-size collapse at the far end of the tail.
//! The standard error comes from a bootstrap over avalanche durations.

use super::avalanche::{Survival, SurvivalPoint};
use super::AnalyticsError;
use crate::distributions::SeedSpec;
use crate::numeric::{median, sample_variance};
use serde::{Deserialize, Serialize};

pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    /// Intercept of the fitted line in (ln k, ln P) coordinates.
    pub intercept: f64,
    pub stderr: f64,
    pub k_min: u64,
    pub k_max: u64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFitOptions {
    pub k_min: u64,
    pub k_max: u64,
    pub points_per_decade: u32,
    pub bootstrap_resamples: usize,
    pub seed: SeedSpec,
}

impl Default for TailFitOptions {
    fn default() -> Self {
        Self {
            k_min: 100,
            k_max: 10_000,
            points_per_decade: 10,
            bootstrap_resamples: 200,
            seed: SeedSpec::new(0x07a1_1f17, 0),
        }
    }
}

/// Theil–Sen line through `(x, y)`; returns `(slope, intercept)`.
pub fn theil_sen(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let mut slopes = Vec::with_capacity(xs.len() * xs.len().saturating_sub(1) / 2);
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let dx = xs[j] - xs[i];
            if dx != 0.0 {
                slopes.push((ys[j] - ys[i]) / dx);
            }
        }
    }
    let slope = median(&slopes);
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - slope * x).collect();
    (slope, median(&residuals))
}

fn in_window(points: &[SurvivalPoint], k_min: u64, k_max: u64) -> (Vec<f64>, Vec<f64>) {
    points
        .iter()
        .filter(|pt| pt.k >= k_min && pt.k <= k_max && pt.k > 0 && pt.p > 0.0)
        .map(|pt| ((pt.k as f64).ln(), pt.p.ln()))
        .unzip()
}

/// Fit given survival points directly. No bootstrap; `stderr` is 0.
pub fn fit_power_tail_points(
    points: &[SurvivalPoint],
    k_min: u64,
    k_max: u64,
) -> Result<TailFit, AnalyticsError> {
    let (xs, ys) = in_window(points, k_min, k_max);
    if xs.len() < MIN_FIT_POINTS {
        return Err(AnalyticsError::TooFewPoints {
            found: xs.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let (slope, intercept) = theil_sen(&xs, &ys);
    Ok(TailFit {
        slope,
        intercept,
        stderr: 0.0,
        k_min,
        k_max,
        n_points: xs.len(),
    })
}

/// Fit the survival tail of `durations` over `[k_min, k_max]` with a
/// bootstrap standard error.
pub fn fit_power_tail(durations: &[u64], opts: &TailFitOptions) -> Result<TailFit, AnalyticsError> {
    let survival = Survival::new(durations)?;
    let grid = survival.log_grid(opts.k_min, opts.k_max, opts.points_per_decade);
    let mut fit = fit_power_tail_points(&grid, opts.k_min, opts.k_max)?;

    let mut uniforms = opts.seed.uniforms();
    let mut slopes = Vec::with_capacity(opts.bootstrap_resamples);
    let mut resample = vec![0u64; durations.len()];
    for _ in 0..opts.bootstrap_resamples {
        for slot in resample.iter_mut() {
            *slot = durations[uniforms.next_index(durations.len())];
        }
        let s = Survival::new(&resample)?;
        let pts = s.log_grid(opts.k_min, opts.k_max, opts.points_per_decade);
        if let Ok(f) = fit_power_tail_points(&pts, opts.k_min, opts.k_max) {
            slopes.push(f.slope);
        }
    }
    fit.stderr = if slopes.len() >= 2 {
        sample_variance(&slopes).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(fit)
}
