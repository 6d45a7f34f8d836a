use crate::args::EstimateArgs;
use crate::error::CliError;
use crate::output::{ensure_dir, real, write_json, wrote, Table};
use crate::source::resolve_model;
use serde::Serialize;
use soc_auction::montecarlo::{
    estimate_af, estimate_b, estimate_pc, group_by_size, run_replicas, ti_normality, BEstimate,
    EstimateOptions, NormalityDiagnostics, LARGE_N, MIN_REPLICAS_AF, MIN_REPLICAS_B,
    MIN_REPLICAS_NORMALITY, MIN_SIZES_B,
};
use soc_auction::{EstimateWithCI, ReplicaConfig, Rule, SeedSpec};

#[derive(Debug, Serialize)]
struct SizeEstimates {
    n_bids: u64,
    master_seed: u64,
    mean_sales_fraction: f64,
    pc: EstimateWithCI,
    /// Present when N ≥ 10⁵ with enough replicas.
    af: Option<EstimateWithCI>,
    normality: Option<NormalityDiagnostics>,
}

#[derive(Debug, Serialize)]
struct Estimates {
    model: String,
    rule: Rule,
    n_replicas: u64,
    level: f64,
    sizes: Vec<SizeEstimates>,
    /// Present with three or more sizes of at least 100 replicas.
    b: Option<BEstimate>,
}

pub fn run(args: &EstimateArgs) -> Result<(), CliError> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::config(format!(
            "--level: must lie in (0, 1), got {}",
            args.level
        )));
    }
    if args.replicas < 2 {
        return Err(CliError::config("--replicas: need at least 2"));
    }
    let model = resolve_model(&args.model)?;
    let mut sizes = args.n.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let opts = EstimateOptions {
        level: args.level,
        bootstrap_resamples: args.bootstrap,
        bootstrap_seed: SeedSpec::new(args.seed, u64::MAX),
    };
    let mut all = Vec::new();
    let mut per_size = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        // Each size gets its own master seed so sizes do not share prefixes.
        let master_seed = args.seed.wrapping_add(i as u64);
        let cfg = ReplicaConfig {
            model: model.clone(),
            rule: args.rule,
            n_bids: n,
            n_replicas: args.replicas,
            master_seed,
            threads: args.threads,
        };
        let results = run_replicas(&cfg).map_err(CliError::config)?;
        let pc = estimate_pc(&results, &opts).map_err(CliError::config)?;
        let large = n >= LARGE_N;
        let af = (large && results.len() >= MIN_REPLICAS_AF)
            .then(|| estimate_af(&results, &opts))
            .transpose()
            .map_err(CliError::config)?;
        let normality = (large && results.len() >= MIN_REPLICAS_NORMALITY)
            .then(|| ti_normality(&results))
            .transpose()
            .map_err(CliError::config)?;
        per_size.push(SizeEstimates {
            n_bids: n,
            master_seed,
            mean_sales_fraction: 1.0 - pc.point,
            pc,
            af,
            normality,
        });
        all.extend(results);
    }

    let b = if sizes.len() >= MIN_SIZES_B && args.replicas as usize >= MIN_REPLICAS_B {
        Some(estimate_b(&group_by_size(all.iter().copied()), &opts).map_err(CliError::config)?)
    } else {
        None
    };

    ensure_dir(&args.output.out)?;
    if args.output.csv() {
        let mut table = Table::create(
            &args.output.out,
            "replicas.csv",
            &[
                "n_bids",
                "replica_id",
                "master_seed",
                "stream_id",
                "n_sales",
                "total_income",
            ],
        )?;
        for r in &all {
            table.row([
                r.n_bids.to_string(),
                r.replica_id.to_string(),
                r.seed.master_seed.to_string(),
                r.seed.stream_id.to_string(),
                r.n_sales.to_string(),
                real(r.total_income),
            ])?;
        }
        wrote(&table.finish()?)?;
    }
    if args.output.json() {
        let estimates = Estimates {
            model: model.to_string(),
            rule: args.rule,
            n_replicas: args.replicas,
            level: args.level,
            sizes: per_size,
            b,
        };
        wrote(&write_json(&args.output.out, "estimates.json", &estimates)?)?;
    }
    Ok(())
}
