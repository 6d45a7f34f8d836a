use crate::args::AvalancheArgs;
use crate::error::CliError;
use crate::output::{ensure_dir, real, write_json, wrote, Table};
use crate::source::{PriceSource, XcSource};
use serde::Serialize;
use soc_auction::analytics::{
    fit_power_tail, segment_avalanches, AnalyticsError, Survival, TailFitOptions,
};
use soc_auction::{run_sequence, SeedSpec};

#[derive(Debug, Serialize)]
struct TailFitReport {
    source: String,
    n_bids: u64,
    n_sales: u64,
    xc: f64,
    xc_source: XcSource,
    n_avalanches: usize,
    left_censored_first: bool,
    right_censored_last: bool,
    leading_run: u64,
    trailing_run: u64,
    delimiters: u64,
    slope: f64,
    intercept: f64,
    /// `null` when fewer than two bootstrap resamples could be fitted.
    stderr: Option<f64>,
    k_min: u64,
    k_max: u64,
    n_points: usize,
}

pub fn run(args: &AvalancheArgs) -> Result<(), CliError> {
    if args.kmin == 0 || args.kmin >= args.kmax {
        return Err(CliError::config(format!(
            "--kmin/--kmax: need 1 ≤ kmin < kmax, got {} and {}",
            args.kmin, args.kmax
        )));
    }
    let source = PriceSource::load(&args.run)?;
    let (xc, xc_source) = source.critical_price(args.run.pc)?;
    let outcome = run_sequence(args.run.rule, &source.prices).map_err(CliError::config)?;
    let set = segment_avalanches(&outcome.sales, xc);
    ensure_dir(&args.output.out)?;

    if args.output.csv() {
        let mut table = Table::create(
            &args.output.out,
            "durations.csv",
            &["avalanche", "duration"],
        )?;
        for (i, d) in set.durations.iter().enumerate() {
            table.row([(i + 1).to_string(), d.to_string()])?;
        }
        wrote(&table.finish()?)?;
    }

    let survival = Survival::new(&set.durations).map_err(|_| {
        CliError::InsufficientData(format!(
            "no complete avalanches among {} sales at xc = {xc}",
            outcome.n_sales()
        ))
    })?;
    if args.output.csv() {
        let mut table = Table::create(&args.output.out, "survival.csv", &["k", "survival"])?;
        for pt in survival.points() {
            table.row([pt.k.to_string(), real(pt.p)])?;
        }
        wrote(&table.finish()?)?;
    }

    let opts = TailFitOptions {
        k_min: args.kmin,
        k_max: args.kmax,
        bootstrap_resamples: args.bootstrap,
        seed: SeedSpec::new(args.run.seed, 2),
        ..TailFitOptions::default()
    };
    let fit = fit_power_tail(&set.durations, &opts).map_err(|e| match e {
        AnalyticsError::TooFewPoints { .. } => CliError::InsufficientData(format!(
            "{e} [{}, {}]; {} avalanches",
            args.kmin,
            args.kmax,
            set.durations.len()
        )),
        other => CliError::InsufficientData(other.to_string()),
    })?;

    if args.output.json() {
        let report = TailFitReport {
            source: source.label,
            n_bids: outcome.n_bids() as u64,
            n_sales: outcome.n_sales() as u64,
            xc,
            xc_source,
            n_avalanches: set.durations.len(),
            left_censored_first: set.left_censored_first,
            right_censored_last: set.right_censored_last,
            leading_run: set.leading_run,
            trailing_run: set.trailing_run,
            delimiters: set.delimiters,
            slope: fit.slope,
            intercept: fit.intercept,
            stderr: fit.stderr.is_finite().then_some(fit.stderr),
            k_min: fit.k_min,
            k_max: fit.k_max,
            n_points: fit.n_points,
        };
        wrote(&write_json(&args.output.out, "tail_fit.json", &report)?)?;
    }
    Ok(())
}
