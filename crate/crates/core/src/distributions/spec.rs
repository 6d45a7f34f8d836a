//! Textual model specifiers: `name:key=value,...`.
//!
//! ```text
//! exponential:rate=1.0
//! lognormal:mu=0,sigma=0.3
//! uniform:lo=0,hi=1
//! pareto:xmin=1,alpha=2.5
//! truncated:base=1.0,inner=lognormal:mu=0,sigma=0.3
//! ```
//!
//! `inner=` must be the last field of `truncated`; everything after it is the
//! nested specifier.

use super::{DistributionError, PriceModel};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelSpecError {
    #[error("model specifier is empty")]
    Empty,
    #[error("unknown model `{0}` (expected exponential, lognormal, uniform, pareto or truncated)")]
    UnknownModel(String),
    #[error("field `{field}`: missing for model `{model}`")]
    MissingField { model: String, field: String },
    #[error("field `{field}`: not a parameter of model `{model}`")]
    UnknownField { model: String, field: String },
    #[error("field `{field}`: given more than once")]
    DuplicateField { field: String },
    #[error("field `{field}`: cannot parse `{value}` as a number")]
    InvalidNumber { field: String, value: String },
    #[error("field `{field}`: expected `key=value`")]
    Malformed { field: String },
    #[error("field `{field}`: {reason} (got {value})")]
    InvalidValue {
        field: String,
        value: f64,
        reason: String,
    },
    #[error("field `inner`: {0}")]
    Inner(Box<ModelSpecError>),
}

impl ModelSpecError {
    /// Name of the offending field, if the error is about one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::MissingField { field, .. }
            | Self::UnknownField { field, .. }
            | Self::DuplicateField { field }
            | Self::InvalidNumber { field, .. }
            | Self::Malformed { field }
            | Self::InvalidValue { field, .. } => Some(field),
            Self::Inner(_) => Some("inner"),
            Self::Empty | Self::UnknownModel(_) => None,
        }
    }
}

impl From<DistributionError> for ModelSpecError {
    fn from(e: DistributionError) -> Self {
        match e {
            DistributionError::InvalidParameter {
                field,
                value,
                reason,
            } => Self::InvalidValue {
                field: field.to_string(),
                value,
                reason: reason.to_string(),
            },
            other => Self::InvalidValue {
                field: "model".to_string(),
                value: f64::NAN,
                reason: other.to_string(),
            },
        }
    }
}

struct Fields<'a> {
    model: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(model: &'a str, body: &'a str, allowed: &[&str]) -> Result<Self, ModelSpecError> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| ModelSpecError::Malformed {
                    field: item.to_string(),
                })?;
            let (k, v) = (k.trim(), v.trim());
            if !allowed.contains(&k) {
                return Err(ModelSpecError::UnknownField {
                    model: model.to_string(),
                    field: k.to_string(),
                });
            }
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(ModelSpecError::DuplicateField {
                    field: k.to_string(),
                });
            }
            pairs.push((k, v));
        }
        Ok(Self { model, pairs })
    }

    fn number(&self, field: &str) -> Result<f64, ModelSpecError> {
        let raw = self
            .pairs
            .iter()
            .find(|(k, _)| *k == field)
            .map(|(_, v)| *v)
            .ok_or_else(|| ModelSpecError::MissingField {
                model: self.model.to_string(),
                field: field.to_string(),
            })?;
        raw.parse::<f64>()
            .map_err(|_| ModelSpecError::InvalidNumber {
                field: field.to_string(),
                value: raw.to_string(),
            })
    }
}

impl FromStr for PriceModel {
    type Err = ModelSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ModelSpecError::Empty);
        }
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim().to_ascii_lowercase();
        let model = match name.as_str() {
            "exponential" => {
                let f = Fields::parse("exponential", body, &["rate"])?;
                PriceModel::exponential(f.number("rate")?)?
            }
            "lognormal" => {
                let f = Fields::parse("lognormal", body, &["mu", "sigma"])?;
                PriceModel::lognormal(f.number("mu")?, f.number("sigma")?)?
            }
            "uniform" => {
                let f = Fields::parse("uniform", body, &["lo", "hi"])?;
                PriceModel::uniform(f.number("lo")?, f.number("hi")?)?
            }
            "pareto" => {
                let f = Fields::parse("pareto", body, &["xmin", "alpha"])?;
                PriceModel::pareto(f.number("xmin")?, f.number("alpha")?)?
            }
            "truncated" => {
                let (head, inner) = match body.find("inner=") {
                    Some(pos) => (&body[..pos], Some(&body[pos + "inner=".len()..])),
                    None => (body, None),
                };
                let f = Fields::parse("truncated", head, &["base"])?;
                let base = f.number("base")?;
                let inner = inner.ok_or_else(|| ModelSpecError::MissingField {
                    model: "truncated".to_string(),
                    field: "inner".to_string(),
                })?;
                let inner: PriceModel = inner
                    .parse()
                    .map_err(|e| ModelSpecError::Inner(Box::new(e)))?;
                PriceModel::truncated(base, inner)?
            }
            _ => return Err(ModelSpecError::UnknownModel(name)),
        };
        Ok(model)
    }
}

impl fmt::Display for PriceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exponential:rate={rate}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:mu={mu},sigma={sigma}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:lo={lo},hi={hi}"),
            Self::Pareto { xmin, alpha } => write!(f, "pareto:xmin={xmin},alpha={alpha}"),
            Self::Truncated { base_price, inner } => {
                write!(f, "truncated:base={base_price},inner={inner}")
            }
        }
    }
}
