use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use soc_auction::{run_sequence, Rule};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_soc-auction"));
    cmd.env_remove("SOC_AUCTION_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn events(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn write_prices(dir: &Path, prices: &[f64]) -> String {
    let path = dir.join("prices.txt");
    let body: String = prices.iter().map(|p| format!("{p}\n")).collect();
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn worked_example_from_prices_file() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write_prices(dir.path(), &[14.0, 15.0, 18.0, 13.0, 16.0, 12.0, 10.0]);
    let out = dir.path().join("out");
    ok(&[
        "simulate",
        "--prices-file",
        &prices,
        "--out",
        out.to_str().unwrap(),
    ]);

    let rows = events(&out.join("events.csv"));
    assert_eq!(rows.len(), 7);
    let sold: Vec<(&str, &str)> = rows
        .iter()
        .filter(|r| &r[2] == "1")
        .map(|r| (&r[1], &r[4]))
        .collect();
    // Bids 2, 3 and 5 (15, 18, 16) sold to triggers 7, 4 and 6.
    assert_eq!(
        sold,
        [
            ("15.000000000000000", "7"),
            ("18.000000000000000", "4"),
            ("16.000000000000000", "6")
        ]
    );
    let ntilde: Vec<&str> = rows.iter().map(|r| &r[5]).collect();
    assert_eq!(ntilde, ["0", "0", "0", "1", "1", "2", "3"]);

    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["n_sales"], 3);
    assert_eq!(summary["total_income"], 49.0);
    assert_eq!(summary["xc_source"], "empirical");
    assert!(summary["seed"].is_null());
}

#[test]
fn accept_all_income_is_the_sum_of_prices() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    ok(&[
        "simulate",
        "--model",
        "uniform:lo=0,hi=1",
        "--rule",
        "accept-all",
        "--n",
        "10",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let prices: Vec<f64> = events(&out.join("events.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(prices.len(), 10);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["n_sales"], 10);
    let ti = summary["total_income"].as_f64().unwrap();
    assert!((ti - prices.iter().sum::<f64>()).abs() <= 1e-12 * ti);
}

#[test]
fn events_refold_to_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    ok(&[
        "simulate",
        "--model",
        "lognormal:mu=0,sigma=0.3",
        "--n",
        "1000",
        "--seed",
        "42",
        "--arrival-rate",
        "2.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = events(&out.join("events.csv"));
    assert_eq!(rows.len(), 1000);
    let summary = json(&out.join("summary.json"));

    // Replaying the logged prices reproduces the run exactly.
    let prices: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let replay = run_sequence(Rule::Classic, &prices).unwrap();
    assert_eq!(summary["n_bids"], 1000);
    assert_eq!(summary["n_sales"], replay.n_sales() as u64);
    assert_eq!(
        summary["total_income"].as_f64().unwrap(),
        replay.total_income
    );
    assert_eq!(
        summary["sales_fraction"].as_f64().unwrap(),
        replay.n_sales() as f64 / 1000.0
    );

    // The log itself agrees with the summary.
    let flagged = rows.iter().filter(|r| &r[2] == "1").count() as u64;
    assert_eq!(summary["n_sales"], flagged);
    assert_eq!(rows[999][5].parse::<u64>().unwrap(), flagged);
    let income: f64 = rows
        .iter()
        .filter(|r| &r[2] == "1")
        .map(|r| r[3].parse::<f64>().unwrap())
        .sum();
    assert!((income - replay.total_income).abs() <= 1e-12 * income);
    for (r, s) in rows.iter().zip(&replay.trajectory) {
        assert_eq!(r[5].parse::<u64>().unwrap(), *s);
    }
    let fraction = summary["sales_fraction"].as_f64().unwrap();
    assert!((fraction - 0.632).abs() < 0.05, "{fraction}");

    let times: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_with_env(dir.path());
        assert!(out.status.success());
    }
    for name in ["events.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

fn run_with_env(dir: &Path) -> Output {
    bin()
        .env("SOC_AUCTION_SEED", "7")
        .args([
            "simulate",
            "--n",
            "500",
            "--rule",
            "two-consecutive",
            "--out",
        ])
        .arg(dir)
        .output()
        .unwrap()
}

#[test]
fn seed_flag_overrides_environment() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_with_env(a.path());
    ok(&[
        "simulate",
        "--n",
        "500",
        "--rule",
        "two-consecutive",
        "--seed",
        "7",
        "--out",
        b.path().to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(a.path().join("events.csv")).unwrap(),
        fs::read(b.path().join("events.csv")).unwrap()
    );
    let c = tempfile::tempdir().unwrap();
    let out = bin()
        .env("SOC_AUCTION_SEED", "7")
        .args([
            "simulate",
            "--n",
            "500",
            "--rule",
            "two-consecutive",
            "--seed",
            "8",
            "--out",
        ])
        .arg(c.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(
        fs::read(a.path().join("events.csv")).unwrap(),
        fs::read(c.path().join("events.csv")).unwrap()
    );
}

#[test]
fn format_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--n",
        "20",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(dir.path().join("summary.json").exists());
    assert!(!dir.path().join("events.csv").exists());
}

#[test]
fn theory_reports_reference_values() {
    let out = ok(&["theory", "--model", "lognormal:mu=0,sigma=0.3"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["xc"].as_f64().unwrap() - 0.90371).abs() < 1e-5);
    assert!((v["expected_ti_per_bid"].as_f64().unwrap() - 0.7720651).abs() < 1e-7);
    assert!((v["af_approx"].as_f64().unwrap() - 0.102).abs() < 1e-3);

    let out = ok(&["theory", "--model", "pareto:xmin=1,alpha=1.5"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["infinite_mean"], true);
    assert!(v["expected_ti_per_bid"].is_null());

    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "theory",
        "--model",
        "uniform:lo=0,hi=1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["xc"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    assert_eq!(json(&dir.path().join("theory.json")), v);
}

#[test]
fn base_price_truncates_the_model() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--n",
        "300",
        "--base-price",
        "1.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = events(&dir.path().join("events.csv"));
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() >= 1.2));
    let summary = json(&dir.path().join("summary.json"));
    assert!(summary["source"]
        .as_str()
        .unwrap()
        .starts_with("truncated:base=1.2"));
}

#[test]
fn alternating_prices_give_unit_avalanches() {
    let dir = tempfile::tempdir().unwrap();
    let prices: Vec<f64> = [10.0, 1.0, 0.5].iter().copied().cycle().take(300).collect();
    let file = write_prices(dir.path(), &prices);
    let out = dir.path().join("out");
    let res = run(&[
        "avalanches",
        "--prices-file",
        &file,
        "--out",
        out.to_str().unwrap(),
    ]);
    // Every duration is 1, so no survival point lies in the fit window.
    assert_eq!(res.status.code(), Some(4));
    let durations = events(&out.join("durations.csv"));
    assert!(!durations.is_empty());
    assert!(durations.iter().all(|r| &r[1] == "1"));
    let survival = events(&out.join("survival.csv"));
    assert_eq!(&survival[0][0], "0");
    assert!(!out.join("tail_fit.json").exists());
}

#[test]
fn avalanche_fit_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    ok(&[
        "avalanches",
        "--n",
        "300000",
        "--seed",
        "3",
        "--kmin",
        "2",
        "--kmax",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    let fit = json(&out.join("tail_fit.json"));
    assert!(fit["n_points"].as_u64().unwrap() >= 10);
    assert!(fit["slope"].as_f64().unwrap() < 0.0);
    let n_av = fit["n_avalanches"].as_u64().unwrap() as usize;
    assert_eq!(events(&out.join("durations.csv")).len(), n_av);
}

#[test]
fn estimate_writes_replicas_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    ok(&[
        "estimate",
        "--rule",
        "accept-all",
        "--model",
        "exponential:rate=2",
        "--n",
        "100,200,400",
        "--replicas",
        "100",
        "--bootstrap",
        "50",
        "--threads",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = events(&out.join("replicas.csv"));
    assert_eq!(rows.len(), 300);
    let est = json(&out.join("estimates.json"));
    for size in est["sizes"].as_array().unwrap() {
        assert_eq!(size["pc"]["point"], 0.0);
        assert!(size["af"].is_null());
    }
    assert_eq!(est["b"]["estimate"]["point"], 0.0);
}

#[test]
fn replicate_fig1b_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "replicate",
        "fig1b",
        "--seed",
        "3",
        "--threads",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fig1b: PASS"));
    let verdict = json(&dir.path().join("fig1b_verdict.json"));
    assert_eq!(verdict["passed"], true);
    let rows = events(&dir.path().join("fig1b.csv"));
    assert_eq!(rows.len(), 1000);
    let last: f64 = rows[999][5].parse().unwrap();
    assert!((last - 772.0651).abs() < 1e-9);
}

#[test]
fn replicate_fig1a_writes_every_bid() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["replicate", "fig1a", "--out", dir.path().to_str().unwrap()]);
    let rows = events(&dir.path().join("fig1a.csv"));
    assert_eq!(rows.len(), 1000);
    let verdict = json(&dir.path().join("fig1a_verdict.json"));
    let fraction = verdict["checks"][0]["value"].as_f64().unwrap();
    assert_eq!(verdict["passed"], fraction >= 0.99);
}

#[test]
fn bad_model_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--model",
        "lognormal:mu=0,sigma=-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));

    let out = run(&["simulate", "--model", "exponential:rte=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rte"));

    assert_eq!(run(&["simulate", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--rule", "dutch"]).status.code(), Some(2));
    assert_eq!(run(&["theory", "--pc", "1.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["avalanches", "--kmin", "50", "--kmax", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_prices_file_lines_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    fs::write(&path, "1.0\nabc\n").unwrap();
    let out = run(&["simulate", "--prices-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    fs::write(&path, "1.0\n-3\n").unwrap();
    assert_eq!(
        run(&["simulate", "--prices-file", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn io_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = run(&[
        "simulate",
        "--n",
        "5",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        run(&["simulate", "--prices-file", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}
