use crate::args::SimulateArgs;
use crate::error::CliError;
use crate::output::{ensure_dir, real, write_json, wrote, Table};
use crate::source::{PriceSource, XcSource};
use serde::Serialize;
use soc_auction::distributions::poisson_arrival_times;
use soc_auction::{run_sequence, Rule, SeedSpec};

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub source: String,
    pub rule: Rule,
    pub seed: Option<u64>,
    pub n_bids: u64,
    pub n_sales: u64,
    pub total_income: f64,
    pub sales_fraction: f64,
    pub pc: f64,
    pub xc: f64,
    pub xc_source: XcSource,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let source = PriceSource::load(&args.run)?;
    let (xc, xc_source) = source.critical_price(args.run.pc)?;
    let times = match args.arrival_rate {
        Some(rate) if rate.is_finite() && rate > 0.0 => Some(poisson_arrival_times(
            rate,
            SeedSpec::new(args.run.seed, 1),
            source.prices.len(),
        )),
        Some(rate) => {
            return Err(CliError::config(format!(
                "--arrival-rate: must be positive, got {rate}"
            )))
        }
        None => None,
    };
    let outcome = run_sequence(args.run.rule, &source.prices).map_err(CliError::config)?;
    ensure_dir(&args.output.out)?;

    if args.output.csv() {
        // Fate of every bid: whether it eventually sold, at what price, and
        // which arrival executed it.
        let mut fate: Vec<Option<(f64, u64)>> = vec![None; source.prices.len()];
        for s in &outcome.sales {
            fate[s.accepted_bid_index as usize - 1] = Some((s.price, s.trigger_bid_index));
        }
        let mut header = vec![
            "bid_index",
            "price",
            "sale_flag",
            "sale_price",
            "trigger_index",
            "ntilde",
        ];
        if times.is_some() {
            header.push("timestamp");
        }
        let mut table = Table::create(&args.output.out, "events.csv", &header)?;
        for (i, &price) in source.prices.iter().enumerate() {
            let (flag, sale_price, trigger) = match fate[i] {
                Some((p, t)) => ("1", real(p), t.to_string()),
                None => ("0", String::new(), String::new()),
            };
            let mut row = vec![
                (i + 1).to_string(),
                real(price),
                flag.to_string(),
                sale_price,
                trigger,
                outcome.trajectory[i].to_string(),
            ];
            if let Some(t) = &times {
                row.push(real(t[i]));
            }
            table.row(&row)?;
        }
        wrote(&table.finish()?)?;
    }

    if args.output.json() {
        let n = outcome.n_bids() as u64;
        let summary = SimulationSummary {
            source: source.label.clone(),
            rule: args.run.rule,
            seed: source.model.as_ref().map(|_| args.run.seed),
            n_bids: n,
            n_sales: outcome.n_sales() as u64,
            total_income: outcome.total_income,
            sales_fraction: outcome.n_sales() as f64 / n as f64,
            pc: args.run.pc,
            xc,
            xc_source,
        };
        wrote(&write_json(&args.output.out, "summary.json", &summary)?)?;
    }
    Ok(())
}
