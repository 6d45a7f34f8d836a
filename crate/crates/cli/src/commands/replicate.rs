//! Canonical figure configurations: LogNormal(0, 0.3) prices, N = 1000 and
//! 200 replicas for the income figures, one run of N = 2×10⁶ for the
//! avalanche figure.

use crate::args::{Figure, ReplicateArgs};
use crate::error::CliError;
use crate::output::{ensure_dir, real, say, write_json, wrote, Table};
use serde::Serialize;
use soc_auction::analytics::{
    fit_power_tail, log_spaced, segment_avalanches, Survival, TailFitOptions,
};
use soc_auction::distributions::sample;
use soc_auction::montecarlo::income_paths;
use soc_auction::numeric::{mean, sample_variance};
use soc_auction::{run_sequence, PriceModel, ReplicaConfig, Rule, SeedSpec, DEFAULT_PC};

const FIG1_N: u64 = 1000;
const FIG1_REPLICAS: u64 = 200;
const FIG2_N: usize = 2_000_000;
const TI_PER_BID: f64 = 0.7720651;
const TAIL_SLOPE: f64 = -0.54;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    target: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Verdict {
    figure: &'static str,
    model: String,
    n_bids: u64,
    n_replicas: u64,
    seed: u64,
    checks: Vec<Check>,
    passed: bool,
}

fn canonical_model() -> PriceModel {
    PriceModel::lognormal(0.0, 0.3).expect("valid parameters")
}

fn verdict(
    figure: &'static str,
    n_bids: u64,
    n_replicas: u64,
    seed: u64,
    checks: Vec<Check>,
) -> Verdict {
    Verdict {
        figure,
        model: canonical_model().to_string(),
        n_bids,
        n_replicas,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn run(args: &ReplicateArgs) -> Result<(), CliError> {
    ensure_dir(&args.out)?;
    let verdict = match args.figure {
        Figure::Fig1a => fig1a(args)?,
        Figure::Fig1b => fig1b(args)?,
        Figure::Fig2 => fig2(args)?,
    };
    let name = format!("{}_verdict.json", verdict.figure);
    wrote(&write_json(&args.out, &name, &verdict)?)?;
    say(format_args!(
        "{}: {}",
        verdict.figure,
        if verdict.passed { "PASS" } else { "FAIL" }
    ))?;
    Ok(())
}

/// Offered prices of one run with their fate and the critical price.
fn fig1a(args: &ReplicateArgs) -> Result<Verdict, CliError> {
    let model = canonical_model();
    let xc = model.critical_price(DEFAULT_PC).expect("valid level");
    let prices = sample(&model, SeedSpec::new(args.seed, 0), FIG1_N as usize);
    let outcome = run_sequence(Rule::Classic, &prices).map_err(CliError::config)?;
    let mut accepted = vec![false; prices.len()];
    for s in &outcome.sales {
        accepted[s.accepted_bid_index as usize - 1] = true;
    }
    let mut table = Table::create(
        &args.out,
        "fig1a.csv",
        &["bid_index", "price", "accepted", "xc"],
    )?;
    for (i, &p) in prices.iter().enumerate() {
        table.row([
            (i + 1).to_string(),
            real(p),
            u8::from(accepted[i]).to_string(),
            real(xc),
        ])?;
    }
    wrote(&table.finish()?)?;

    let above = outcome.sales.iter().filter(|s| s.price > xc).count();
    let fraction = above as f64 / outcome.n_sales().max(1) as f64;
    let check = Check {
        name: "accepted_above_xc_fraction",
        value: fraction,
        target: 1.0,
        tolerance: 0.01,
        passed: fraction >= 0.99,
    };
    Ok(verdict("fig1a", FIG1_N, 1, args.seed, vec![check]))
}

/// Mean total income ± 3 sd over replicas against the linear theory.
fn fig1b(args: &ReplicateArgs) -> Result<Verdict, CliError> {
    let cfg = ReplicaConfig {
        model: canonical_model(),
        rule: Rule::Classic,
        n_bids: FIG1_N,
        n_replicas: FIG1_REPLICAS,
        master_seed: args.seed,
        threads: args.threads,
    };
    let grid: Vec<u64> = (1..=FIG1_N).collect();
    let paths = income_paths(&cfg, &grid).map_err(CliError::config)?;
    let mut table = Table::create(
        &args.out,
        "fig1b.csv",
        &[
            "n",
            "mean_ti",
            "sd_ti",
            "band_low",
            "band_high",
            "theory_ti",
        ],
    )?;
    let mut outside = 0u64;
    let mut worst: f64 = 0.0;
    for (j, &n) in grid.iter().enumerate() {
        let column: Vec<f64> = paths.iter().map(|row| row[j]).collect();
        let (m, sd) = (mean(&column), sample_variance(&column).sqrt());
        let theory = TI_PER_BID * n as f64;
        if n >= 50 {
            let z = if sd > 0.0 {
                (theory - m).abs() / sd
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
            if z > 3.0 {
                outside += 1;
            }
        }
        table.row([
            n.to_string(),
            real(m),
            real(sd),
            real(m - 3.0 * sd),
            real(m + 3.0 * sd),
            real(theory),
        ])?;
    }
    wrote(&table.finish()?)?;
    let checks = vec![
        Check {
            name: "sizes_with_theory_outside_band",
            value: outside as f64,
            target: 0.0,
            tolerance: 0.0,
            passed: outside == 0,
        },
        Check {
            name: "max_theory_distance_in_sd",
            value: worst,
            target: 0.0,
            tolerance: 3.0,
            passed: worst <= 3.0,
        },
    ];
    Ok(verdict("fig1b", FIG1_N, FIG1_REPLICAS, args.seed, checks))
}

/// Avalanche survival and its fitted power-law tail.
fn fig2(args: &ReplicateArgs) -> Result<Verdict, CliError> {
    let model = canonical_model();
    let xc = model.critical_price(DEFAULT_PC).expect("valid level");
    let prices = sample(&model, SeedSpec::new(args.seed, 0), FIG2_N);
    let outcome = run_sequence(Rule::Classic, &prices).map_err(CliError::config)?;
    let set = segment_avalanches(&outcome.sales, xc);
    let survival = Survival::new(&set.durations)
        .map_err(|_| CliError::InsufficientData("no complete avalanches".into()))?;
    let opts = TailFitOptions {
        seed: SeedSpec::new(args.seed, 2),
        ..TailFitOptions::default()
    };
    let fit = fit_power_tail(&set.durations, &opts)
        .map_err(|e| CliError::InsufficientData(e.to_string()))?;

    let mut table = Table::create(&args.out, "fig2_survival.csv", &["k", "survival"])?;
    for pt in survival.points() {
        table.row([pt.k.to_string(), real(pt.p)])?;
    }
    wrote(&table.finish()?)?;
    let mut table = Table::create(&args.out, "fig2_fit.csv", &["k", "survival_fit"])?;
    for k in log_spaced(fit.k_min, fit.k_max, opts.points_per_decade) {
        let p = (fit.intercept + fit.slope * (k as f64).ln()).exp();
        table.row([k.to_string(), real(p)])?;
    }
    wrote(&table.finish()?)?;

    let check = Check {
        name: "tail_slope",
        value: fit.slope,
        target: TAIL_SLOPE,
        tolerance: 0.10,
        passed: (fit.slope - TAIL_SLOPE).abs() <= 0.10,
    };
    Ok(verdict("fig2", FIG2_N as u64, 1, args.seed, vec![check]))
}
