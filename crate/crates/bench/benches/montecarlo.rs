use criterion::{criterion_group, criterion_main, Criterion};
use soc_auction::analytics::{fit_power_tail, segment_avalanches, TailFitOptions};
use soc_auction::distributions::sample;
use soc_auction::montecarlo::run_replicas;
use soc_auction::{run_sequence, PriceModel, ReplicaConfig, Rule, SeedSpec, DEFAULT_PC};

fn replicas(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_replicas");
    group.sample_size(10);
    for threads in [Some(1), None] {
        let cfg = ReplicaConfig {
            model: PriceModel::lognormal(0.0, 0.3).unwrap(),
            rule: Rule::Classic,
            n_bids: 10_000,
            n_replicas: 64,
            master_seed: 4,
            threads,
        };
        let name = match threads {
            Some(n) => format!("64x10k_threads{n}"),
            None => "64x10k_all_threads".to_string(),
        };
        group.bench_function(name, |b| b.iter(|| run_replicas(&cfg).unwrap()));
    }
    group.finish();
}

fn avalanche_fit(c: &mut Criterion) {
    let model = PriceModel::lognormal(0.0, 0.3).unwrap();
    let xc = model.critical_price(DEFAULT_PC).unwrap();
    let out = run_sequence(
        Rule::Classic,
        &sample(&model, SeedSpec::new(5, 0), 1_000_000),
    )
    .unwrap();
    let durations = segment_avalanches(&out.sales, xc).durations;
    let opts = TailFitOptions {
        k_min: 10,
        k_max: 1000,
        ..TailFitOptions::default()
    };
    let mut group = c.benchmark_group("fit_power_tail");
    group.sample_size(10);
    group.bench_function("1M_run_200_bootstrap", |b| {
        b.iter(|| fit_power_tail(&durations, &opts))
    });
    group.finish();
}

criterion_group!(benches, replicas, avalanche_fit);
criterion_main!(benches);
