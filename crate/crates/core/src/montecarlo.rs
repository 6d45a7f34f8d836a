//! Replica orchestration and estimators for the limit constants.
//!
//! Replica `r` draws its prices from `SeedSpec::new(master_seed, r)`, so each
//! replica is reproducible on its own and the result list does not depend on
//! how many worker threads ran it or in which order they finished.

use crate::distributions::{normal, PriceModel, SeedSpec};
use crate::engine::{Engine, Rule};
use crate::numeric::{central_moments, mean, sample_variance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const MIN_REPLICAS_B: usize = 100;
pub const MIN_SIZES_B: usize = 3;
pub const MIN_REPLICAS_AF: usize = 200;
pub const MIN_REPLICAS_NORMALITY: usize = 500;
/// Smallest N treated as asymptotic.
pub const LARGE_N: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("no replica results")]
    Empty,
    #[error("need at least {required} replicas, got {found}")]
    TooFewReplicas { found: usize, required: usize },
    #[error("N = {n_bids}: need at least {required} replicas, got {found}")]
    DeficientSize {
        n_bids: u64,
        found: usize,
        required: usize,
    },
    #[error("need at least {required} distinct N values, got {found}")]
    TooFewSizes { found: usize, required: usize },
    #[error("replicas mix different N ({first} and {other})")]
    MixedSizes { first: u64, other: u64 },
    #[error("N = {n_bids} is below the asymptotic threshold {required}")]
    SizeTooSmall { n_bids: u64, required: u64 },
    #[error("n_bids and n_replicas must be at least 1")]
    EmptyRun,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaResult {
    pub replica_id: u64,
    pub n_bids: u64,
    pub n_sales: u64,
    pub total_income: f64,
    pub seed: SeedSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_replicas: usize,
    pub level: f64,
}

impl EstimateWithCI {
    fn normal(point: f64, se: f64, n_replicas: usize, level: f64) -> Self {
        let z = normal::quantile(0.5 + 0.5 * level);
        Self {
            point,
            ci_low: point - z * se,
            ci_high: point + z * se,
            n_replicas,
            level,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

/// Confidence level and bootstrap settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub level: f64,
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: SeedSpec,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            level: 0.95,
            bootstrap_resamples: 1000,
            bootstrap_seed: SeedSpec::new(0xb007_57a9, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaConfig {
    pub model: PriceModel,
    pub rule: Rule,
    pub n_bids: u64,
    pub n_replicas: u64,
    pub master_seed: u64,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

fn with_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, MonteCarloError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| MonteCarloError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run_one(
    model: &PriceModel,
    rule: Rule,
    n_bids: u64,
    seed: SeedSpec,
    replica_id: u64,
) -> ReplicaResult {
    let mut engine = Engine::with_capacity(rule, n_bids as usize);
    for price in model.stream(seed).take(n_bids as usize) {
        engine
            .submit(price)
            .expect("inverse-transform prices are positive and finite");
    }
    ReplicaResult {
        replica_id,
        n_bids,
        n_sales: engine.accepted_count(),
        total_income: engine.total_income(),
        seed,
    }
}

pub fn run_replicas(cfg: &ReplicaConfig) -> Result<Vec<ReplicaResult>, MonteCarloError> {
    if cfg.n_bids == 0 || cfg.n_replicas == 0 {
        return Err(MonteCarloError::EmptyRun);
    }
    with_pool(cfg.threads, || {
        (0..cfg.n_replicas)
            .into_par_iter()
            .map(|r| {
                run_one(
                    &cfg.model,
                    cfg.rule,
                    cfg.n_bids,
                    SeedSpec::new(cfg.master_seed, r),
                    r,
                )
            })
            .collect()
    })
}

/// Total income after each grid size, for every replica.
///
/// One run of `max(grid)` bids per replica; row `r` holds TI(N) for each N in
/// `grid` (sorted ascending).
pub fn income_paths(cfg: &ReplicaConfig, grid: &[u64]) -> Result<Vec<Vec<f64>>, MonteCarloError> {
    if cfg.n_replicas == 0 || grid.is_empty() || grid[0] == 0 {
        return Err(MonteCarloError::EmptyRun);
    }
    let n_max = *grid.iter().max().expect("non-empty");
    with_pool(cfg.threads, || {
        (0..cfg.n_replicas)
            .into_par_iter()
            .map(|r| {
                let mut engine = Engine::with_capacity(cfg.rule, n_max as usize);
                let mut row = Vec::with_capacity(grid.len());
                let mut next = 0;
                for (i, price) in cfg
                    .model
                    .stream(SeedSpec::new(cfg.master_seed, r))
                    .take(n_max as usize)
                    .enumerate()
                {
                    engine.submit(price).expect("valid price");
                    while next < grid.len() && grid[next] == i as u64 + 1 {
                        row.push(engine.total_income());
                        next += 1;
                    }
                }
                row
            })
            .collect()
    })
}

fn common_size(results: &[ReplicaResult]) -> Result<u64, MonteCarloError> {
    let first = results.first().ok_or(MonteCarloError::Empty)?.n_bids;
    if let Some(other) = results.iter().find(|r| r.n_bids != first) {
        return Err(MonteCarloError::MixedSizes {
            first,
            other: other.n_bids,
        });
    }
    Ok(first)
}

/// p_c ≈ 1 − mean(Ñ)/N with a normal-approximation interval.
pub fn estimate_pc(
    results: &[ReplicaResult],
    opts: &EstimateOptions,
) -> Result<EstimateWithCI, MonteCarloError> {
    let n = common_size(results)? as f64;
    if results.len() < 2 {
        return Err(MonteCarloError::TooFewReplicas {
            found: results.len(),
            required: 2,
        });
    }
    let fractions: Vec<f64> = results.iter().map(|r| r.n_sales as f64 / n).collect();
    let point = 1.0 - mean(&fractions);
    let se = (sample_variance(&fractions) / results.len() as f64).sqrt();
    Ok(EstimateWithCI::normal(point, se, results.len(), opts.level))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BEstimate {
    pub estimate: EstimateWithCI,
    /// (N, Var[Ñ(N)] / N) for each size.
    pub per_size: Vec<(u64, f64)>,
}

/// Weighted through-origin slope of Var[Ñ(N)] against N.
///
/// Under the linear model Var[v_N] ≈ 2(bN)²/(R − 1), so weights ∝
/// (R − 1)/N² and the slope reduces to a (R − 1)-weighted mean of v_N / N.
fn variance_slope(groups: &[(u64, Vec<f64>)]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (n, sales) in groups {
        let w = (sales.len() - 1) as f64;
        num += w * sample_variance(sales) / *n as f64;
        den += w;
    }
    num / den
}

fn percentile_interval(
    point: f64,
    mut draws: Vec<f64>,
    level: f64,
    n_replicas: usize,
) -> EstimateWithCI {
    draws.sort_unstable_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    let lo = crate::numeric::sorted_quantile(&draws, tail);
    let hi = crate::numeric::sorted_quantile(&draws, 1.0 - tail);
    EstimateWithCI {
        point,
        ci_low: lo.min(point),
        ci_high: hi.max(point),
        n_replicas,
        level,
    }
}

/// b ≈ lim Var[Ñ(N)]/N from replicas at three or more sizes.
pub fn estimate_b(
    results_by_n: &BTreeMap<u64, Vec<ReplicaResult>>,
    opts: &EstimateOptions,
) -> Result<BEstimate, MonteCarloError> {
    if results_by_n.len() < MIN_SIZES_B {
        return Err(MonteCarloError::TooFewSizes {
            found: results_by_n.len(),
            required: MIN_SIZES_B,
        });
    }
    let mut groups = Vec::with_capacity(results_by_n.len());
    for (&n, results) in results_by_n {
        if results.len() < MIN_REPLICAS_B {
            return Err(MonteCarloError::DeficientSize {
                n_bids: n,
                found: results.len(),
                required: MIN_REPLICAS_B,
            });
        }
        let size = common_size(results)?;
        if size != n {
            return Err(MonteCarloError::MixedSizes {
                first: n,
                other: size,
            });
        }
        groups.push((
            n,
            results
                .iter()
                .map(|r| r.n_sales as f64)
                .collect::<Vec<f64>>(),
        ));
    }

    let point = variance_slope(&groups);
    let per_size = groups
        .iter()
        .map(|(n, s)| (*n, sample_variance(s) / *n as f64))
        .collect();
    let total: usize = groups.iter().map(|(_, s)| s.len()).sum();

    let mut uniforms = opts.bootstrap_seed.uniforms();
    let mut draws = Vec::with_capacity(opts.bootstrap_resamples);
    let mut resampled: Vec<(u64, Vec<f64>)> = groups.clone();
    for _ in 0..opts.bootstrap_resamples {
        for ((_, src), (_, dst)) in groups.iter().zip(resampled.iter_mut()) {
            for slot in dst.iter_mut() {
                *slot = src[uniforms.next_index(src.len())];
            }
        }
        draws.push(variance_slope(&resampled));
    }

    Ok(BEstimate {
        estimate: percentile_interval(point, draws, opts.level, total),
        per_size,
    })
}

/// a_f ≈ Var[TI]/N at a single large N, with a bootstrap interval.
pub fn estimate_af(
    results: &[ReplicaResult],
    opts: &EstimateOptions,
) -> Result<EstimateWithCI, MonteCarloError> {
    let n = common_size(results)?;
    if results.len() < MIN_REPLICAS_AF {
        return Err(MonteCarloError::TooFewReplicas {
            found: results.len(),
            required: MIN_REPLICAS_AF,
        });
    }
    if n < LARGE_N {
        return Err(MonteCarloError::SizeTooSmall {
            n_bids: n,
            required: LARGE_N,
        });
    }
    let incomes: Vec<f64> = results.iter().map(|r| r.total_income).collect();
    let point = sample_variance(&incomes) / n as f64;

    let mut uniforms = opts.bootstrap_seed.uniforms();
    let mut resample = vec![0.0; incomes.len()];
    let draws = (0..opts.bootstrap_resamples)
        .map(|_| {
            for slot in resample.iter_mut() {
                *slot = incomes[uniforms.next_index(incomes.len())];
            }
            sample_variance(&resample) / n as f64
        })
        .collect();
    Ok(percentile_interval(point, draws, opts.level, results.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityDiagnostics {
    /// `None` when the incomes have zero variance.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub n_replicas: usize,
}

impl NormalityDiagnostics {
    pub fn is_degenerate(&self) -> bool {
        self.skewness.is_none()
    }
}

/// Sample skewness and excess kurtosis of total income across replicas.
pub fn ti_normality(results: &[ReplicaResult]) -> Result<NormalityDiagnostics, MonteCarloError> {
    let n = common_size(results)?;
    if results.len() < MIN_REPLICAS_NORMALITY {
        return Err(MonteCarloError::TooFewReplicas {
            found: results.len(),
            required: MIN_REPLICAS_NORMALITY,
        });
    }
    if n < LARGE_N {
        return Err(MonteCarloError::SizeTooSmall {
            n_bids: n,
            required: LARGE_N,
        });
    }
    let incomes: Vec<f64> = results.iter().map(|r| r.total_income).collect();
    let (m2, m3, m4) = central_moments(&incomes);
    let scale = mean(&incomes).abs().max(1.0);
    let (skewness, excess_kurtosis) = if m2 <= (scale * 1e-12).powi(2) {
        (None, None)
    } else {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    };
    Ok(NormalityDiagnostics {
        skewness,
        excess_kurtosis,
        n_replicas: results.len(),
    })
}

/// Group results by N, keeping replica order.
pub fn group_by_size(
    results: impl IntoIterator<Item = ReplicaResult>,
) -> BTreeMap<u64, Vec<ReplicaResult>> {
    let mut map: BTreeMap<u64, Vec<ReplicaResult>> = BTreeMap::new();
    for r in results {
        map.entry(r.n_bids).or_default().push(r);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rule: Rule, n_bids: u64, n_replicas: u64) -> ReplicaConfig {
        ReplicaConfig {
            model: PriceModel::lognormal(0.0, 0.3).unwrap(),
            rule,
            n_bids,
            n_replicas,
            master_seed: 11,
            threads: None,
        }
    }

    fn fake(n_bids: u64, sales: &[u64]) -> Vec<ReplicaResult> {
        sales
            .iter()
            .enumerate()
            .map(|(i, &s)| ReplicaResult {
                replica_id: i as u64,
                n_bids,
                n_sales: s,
                total_income: s as f64,
                seed: SeedSpec::new(0, i as u64),
            })
            .collect()
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let mut c = cfg(Rule::Classic, 500, 16);
        c.threads = Some(1);
        let a = run_replicas(&c).unwrap();
        c.threads = Some(4);
        let b = run_replicas(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, r)| r.replica_id == i as u64));
    }

    #[test]
    fn classic_first_bid_never_sells() {
        for r in run_replicas(&cfg(Rule::Classic, 50, 20)).unwrap() {
            assert!(r.n_sales < r.n_bids);
        }
    }

    #[test]
    fn accept_all_income_is_sum_of_draws() {
        let c = cfg(Rule::AcceptAll, 100, 5);
        for r in run_replicas(&c).unwrap() {
            let draws = crate::distributions::sample(&c.model, r.seed, 100);
            assert_eq!(r.n_sales, 100);
            assert_eq!(r.total_income, crate::numeric::sum(&draws));
        }
        let pc = estimate_pc(&run_replicas(&c).unwrap(), &EstimateOptions::default()).unwrap();
        assert_eq!(pc.point, 0.0);
    }

    #[test]
    fn empty_runs_rejected() {
        assert_eq!(
            run_replicas(&cfg(Rule::Classic, 0, 3)),
            Err(MonteCarloError::EmptyRun)
        );
        assert_eq!(
            run_replicas(&cfg(Rule::Classic, 3, 0)),
            Err(MonteCarloError::EmptyRun)
        );
    }

    #[test]
    fn pc_rejects_mixed_sizes() {
        let mut rs = fake(10, &[5, 6]);
        rs.extend(fake(20, &[11]));
        assert!(matches!(
            estimate_pc(&rs, &EstimateOptions::default()),
            Err(MonteCarloError::MixedSizes { .. })
        ));
    }

    #[test]
    fn b_requires_sizes_and_replicas() {
        let opts = EstimateOptions::default();
        let mut map = BTreeMap::new();
        map.insert(10, fake(10, &[1; 100]));
        map.insert(20, fake(20, &[1; 100]));
        assert!(matches!(
            estimate_b(&map, &opts),
            Err(MonteCarloError::TooFewSizes { found: 2, .. })
        ));
        map.insert(30, fake(30, &[1; 99]));
        let err = estimate_b(&map, &opts).unwrap_err();
        assert_eq!(
            err,
            MonteCarloError::DeficientSize {
                n_bids: 30,
                found: 99,
                required: 100
            }
        );
        assert!(err.to_string().contains("N = 30"));
    }

    #[test]
    fn b_is_zero_without_variance() {
        let mut map = BTreeMap::new();
        for n in [100, 200, 300] {
            map.insert(n, fake(n, &vec![n; 100]));
        }
        let b = estimate_b(&map, &EstimateOptions::default()).unwrap();
        assert_eq!(b.estimate.point, 0.0);
        assert_eq!((b.estimate.ci_low, b.estimate.ci_high), (0.0, 0.0));
    }

    #[test]
    fn af_and_normality_preconditions() {
        let opts = EstimateOptions::default();
        assert!(matches!(
            estimate_af(&fake(LARGE_N, &[1; 10]), &opts),
            Err(MonteCarloError::TooFewReplicas { found: 10, .. })
        ));
        assert!(matches!(
            estimate_af(&fake(1000, &[1; 300]), &opts),
            Err(MonteCarloError::SizeTooSmall { .. })
        ));
        assert!(matches!(
            ti_normality(&fake(LARGE_N, &[1; 499])),
            Err(MonteCarloError::TooFewReplicas { .. })
        ));
    }

    #[test]
    fn degenerate_incomes_flagged() {
        let d = ti_normality(&fake(LARGE_N, &[7; 600])).unwrap();
        assert!(d.is_degenerate());
        assert_eq!(d.excess_kurtosis, None);
    }

    #[test]
    fn income_paths_end_at_total_income() {
        let c = cfg(Rule::Classic, 300, 4);
        let paths = income_paths(&c, &[1, 10, 300]).unwrap();
        let totals = run_replicas(&c).unwrap();
        for (row, r) in paths.iter().zip(&totals) {
            assert_eq!(row.len(), 3);
            assert_eq!(row[0], 0.0);
            assert_eq!(row[2], r.total_income);
        }
    }
}
