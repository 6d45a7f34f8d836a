//! Where a run's prices come from: a sampled model or a prices file.

use crate::args::{ModelArgs, RunArgs};
use crate::error::CliError;
use serde::Serialize;
use soc_auction::analytics::empirical_critical_price;
use soc_auction::distributions::sample;
use soc_auction::{PriceModel, SeedSpec};
use std::fs;
use std::path::Path;

pub fn resolve_model(args: &ModelArgs) -> Result<PriceModel, CliError> {
    let model: PriceModel = args
        .model
        .parse()
        .map_err(|e| CliError::config(format!("--model: {e}")))?;
    match args.base_price {
        Some(base) => PriceModel::truncated(base, model)
            .map_err(|e| CliError::config(format!("--base-price: {e}"))),
        None => Ok(model),
    }
}

pub fn check_pc(pc: f64) -> Result<(), CliError> {
    if pc > 0.0 && pc < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "--pc: must lie in (0, 1), got {pc}"
        )))
    }
}

pub fn read_prices(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut prices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p: f64 = line.parse().map_err(|_| {
            CliError::config(format!(
                "{}:{}: `{line}` is not a number",
                path.display(),
                i + 1
            ))
        })?;
        if !(p.is_finite() && p > 0.0) {
            return Err(CliError::config(format!(
                "{}:{}: price must be positive and finite, got {p}",
                path.display(),
                i + 1
            )));
        }
        prices.push(p);
    }
    if prices.is_empty() {
        return Err(CliError::config(format!("{}: no prices", path.display())));
    }
    Ok(prices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XcSource {
    /// F(x_c) = pc for the model.
    Model,
    /// pc-quantile of the offered prices.
    Empirical,
}

pub struct PriceSource {
    pub prices: Vec<f64>,
    pub model: Option<PriceModel>,
    pub label: String,
}

impl PriceSource {
    pub fn load(run: &RunArgs) -> Result<Self, CliError> {
        check_pc(run.pc)?;
        if let Some(path) = &run.prices_file {
            return Ok(Self {
                prices: read_prices(path)?,
                model: None,
                label: format!("prices-file:{}", path.display()),
            });
        }
        let model = resolve_model(&run.model)?;
        let prices = sample(&model, SeedSpec::new(run.seed, 0), run.n as usize);
        Ok(Self {
            prices,
            label: model.to_string(),
            model: Some(model),
        })
    }

    pub fn critical_price(&self, pc: f64) -> Result<(f64, XcSource), CliError> {
        match &self.model {
            Some(m) => m
                .critical_price(pc)
                .map(|x| (x, XcSource::Model))
                .map_err(|e| CliError::config(format!("--pc: {e}"))),
            None => Ok((
                empirical_critical_price(&self.prices, pc),
                XcSource::Empirical,
            )),
        }
    }
}
