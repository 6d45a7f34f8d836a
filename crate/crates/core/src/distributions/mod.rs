//! Bid-price laws.
//!
//! A [`PriceModel`] knows its cdf, density, quantile and the partial moments
//! `∫_c^∞ x^k f(x) dx` that drive the income predictions. Sampling is always
//! by inverse transform from a [`SeedSpec`] stream, so two models fed the same
//! stream produce price sequences with identical ranks.
//!
//! Pareto is parametrized by the exponent of its density tail,
//! `f(x) ∝ x^{-alpha}` for `x ≥ xmin`, so the survival function is
//! `(xmin / x)^{alpha - 1}`. The mean is finite only for `alpha > 2` and the
//! variance only for `alpha > 3`.

pub mod normal;
pub mod quadrature;
mod seed;
mod spec;

pub use seed::{open_unit, SeedSpec, UniformStream};
pub use spec::ModelSpecError;

use std::f64::consts::E;
use thiserror::Error;

/// Default level for the critical price: the conjectured fraction of bids
/// that are never executed under the classic rule.
pub const DEFAULT_PC: f64 = 1.0 / E;

/// Relative tolerance requested from tail-moment quadrature.
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("probability {0} outside [0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("critical level {0} outside (0, 1)")]
    LevelOutOfRange(f64),
    #[error("moment of order {order} is infinite for {model}")]
    InfiniteMoment { order: u32, model: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PriceModel {
    Exponential {
        rate: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Pareto {
        xmin: f64,
        alpha: f64,
    },
    /// `inner` conditioned on `X ≥ base_price`.
    Truncated {
        base_price: f64,
        inner: Box<PriceModel>,
    },
}

fn invalid(field: &'static str, value: f64, reason: &'static str) -> DistributionError {
    DistributionError::InvalidParameter {
        field,
        value,
        reason,
    }
}

impl PriceModel {
    pub fn exponential(rate: f64) -> Result<Self, DistributionError> {
        Self::Exponential { rate }.validated()
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self, DistributionError> {
        Self::LogNormal { mu, sigma }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistributionError> {
        Self::Uniform { lo, hi }.validated()
    }

    pub fn pareto(xmin: f64, alpha: f64) -> Result<Self, DistributionError> {
        Self::Pareto { xmin, alpha }.validated()
    }

    pub fn truncated(base_price: f64, inner: PriceModel) -> Result<Self, DistributionError> {
        Self::Truncated {
            base_price,
            inner: Box::new(inner),
        }
        .validated()
    }

    fn validated(self) -> Result<Self, DistributionError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), DistributionError> {
        match *self {
            Self::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(invalid("rate", rate, "must be positive and finite"));
                }
            }
            Self::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(invalid("mu", mu, "must be finite"));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(invalid("sigma", sigma, "must be positive and finite"));
                }
            }
            Self::Uniform { lo, hi } => {
                if !(lo >= 0.0 && lo.is_finite()) {
                    return Err(invalid("lo", lo, "must be non-negative and finite"));
                }
                if !(hi > lo && hi.is_finite()) {
                    return Err(invalid("hi", hi, "must be finite and greater than lo"));
                }
            }
            Self::Pareto { xmin, alpha } => {
                if !(xmin > 0.0 && xmin.is_finite()) {
                    return Err(invalid("xmin", xmin, "must be positive and finite"));
                }
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return Err(invalid("alpha", alpha, "must be finite and greater than 1"));
                }
            }
            Self::Truncated {
                base_price,
                ref inner,
            } => {
                inner.validate()?;
                if !(base_price > 0.0 && base_price.is_finite()) {
                    return Err(invalid("base", base_price, "must be positive and finite"));
                }
                if inner.sf(base_price) <= 0.0 {
                    return Err(invalid("base", base_price, "leaves no probability mass"));
                }
            }
        }
        Ok(())
    }

    /// Infimum of the support.
    pub fn support_min(&self) -> f64 {
        match *self {
            Self::Exponential { .. } | Self::LogNormal { .. } => 0.0,
            Self::Uniform { lo, .. } => lo,
            Self::Pareto { xmin, .. } => xmin,
            Self::Truncated {
                base_price,
                ref inner,
            } => base_price.max(inner.support_min()),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal::cdf((x.ln() - mu) / sigma)
                }
            }
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Pareto { xmin, alpha } => {
                if x <= xmin {
                    0.0
                } else {
                    -((alpha - 1.0) * (xmin / x).ln()).exp_m1()
                }
            }
            Self::Truncated {
                base_price,
                ref inner,
            } => {
                if x < base_price {
                    0.0
                } else {
                    let fb = inner.cdf(base_price);
                    let v = if fb <= 0.5 {
                        (inner.cdf(x) - fb) / (1.0 - fb)
                    } else {
                        // Base in the inner upper tail: differences of
                        // survival values keep their precision.
                        let sb = inner.sf(base_price);
                        (sb - inner.sf(x)) / sb
                    };
                    v.clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Survival function 1 − F(x), evaluated without cancellation in the
    /// upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    normal::sf((x.ln() - mu) / sigma)
                }
            }
            Self::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            Self::Pareto { xmin, alpha } => {
                if x <= xmin {
                    1.0
                } else {
                    (xmin / x).powf(alpha - 1.0)
                }
            }
            Self::Truncated {
                base_price,
                ref inner,
            } => {
                if x < base_price {
                    1.0
                } else {
                    (inner.sf(x) / inner.sf(base_price)).clamp(0.0, 1.0)
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal::pdf((x.ln() - mu) / sigma) / (x * sigma)
                }
            }
            Self::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            Self::Pareto { xmin, alpha } => {
                if x < xmin {
                    0.0
                } else {
                    (alpha - 1.0) / xmin * (xmin / x).powf(alpha)
                }
            }
            Self::Truncated {
                base_price,
                ref inner,
            } => {
                if x < base_price {
                    0.0
                } else {
                    inner.pdf(x) / inner.sf(base_price)
                }
            }
        }
    }

    /// Smallest `x` with `F(x) ≥ p`, for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64, DistributionError> {
        if !(0.0..1.0).contains(&p) {
            return Err(DistributionError::ProbabilityOutOfRange(p));
        }
        Ok(self.quantile_unchecked(p))
    }

    /// Quantile without the range check; `p` must lie in `[0, 1)`.
    #[inline]
    pub fn quantile_unchecked(&self, p: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => -(-p).ln_1p() / rate,
            Self::LogNormal { mu, sigma } => {
                if p == 0.0 {
                    0.0
                } else {
                    (mu + sigma * normal::quantile(p)).exp()
                }
            }
            Self::Uniform { lo, hi } => lo + p * (hi - lo),
            Self::Pareto { xmin, alpha } => xmin * (-(-p).ln_1p() / (alpha - 1.0)).exp(),
            Self::Truncated {
                base_price,
                ref inner,
            } => {
                let fb = inner.cdf(base_price);
                let q = if fb <= 0.5 {
                    inner.quantile_unchecked(fb + p * (1.0 - fb))
                } else {
                    inner.upper_quantile((1.0 - p) * inner.sf(base_price))
                };
                q.max(base_price)
            }
        }
    }

    /// The `x` with `1 − F(x) = q`, accurate for tiny `q`. `q` in `(0, 1]`.
    pub fn upper_quantile(&self, q: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => -q.ln() / rate,
            Self::LogNormal { mu, sigma } => {
                if q >= 1.0 {
                    0.0
                } else {
                    (mu + sigma * normal::upper_quantile(q)).exp()
                }
            }
            Self::Uniform { lo, hi } => hi - q * (hi - lo),
            Self::Pareto { xmin, alpha } => xmin * q.powf(-1.0 / (alpha - 1.0)),
            Self::Truncated {
                base_price,
                ref inner,
            } => inner
                .upper_quantile(q * inner.sf(base_price))
                .max(base_price),
        }
    }

    /// The critical price `x_c` with `F(x_c) = pc`.
    pub fn critical_price(&self, pc: f64) -> Result<f64, DistributionError> {
        if !(pc > 0.0 && pc < 1.0) {
            return Err(DistributionError::LevelOutOfRange(pc));
        }
        self.quantile(pc)
    }

    /// Largest integer moment order that is finite, if bounded.
    fn max_finite_order(&self) -> Option<f64> {
        match *self {
            // Finite iff order < alpha - 1.
            Self::Pareto { alpha, .. } => Some(alpha - 1.0),
            Self::Truncated { ref inner, .. } => inner.max_finite_order(),
            _ => None,
        }
    }

    fn check_order(&self, order: u32) -> Result<(), DistributionError> {
        match self.max_finite_order() {
            Some(limit) if (order as f64) >= limit => Err(DistributionError::InfiniteMoment {
                order,
                model: self.to_string(),
            }),
            _ => Ok(()),
        }
    }

    pub fn has_finite_mean(&self) -> bool {
        self.check_order(1).is_ok()
    }

    pub fn has_finite_variance(&self) -> bool {
        self.check_order(2).is_ok()
    }

    /// Partial moment `∫_c^∞ x^order f(x) dx` in closed form, `order` ∈ {1, 2}.
    pub fn tail_moment(&self, order: u32, c: f64) -> Result<f64, DistributionError> {
        assert!(order == 1 || order == 2, "only first and second moments");
        self.check_order(order)?;
        let k = order as f64;
        let value = match *self {
            Self::Exponential { rate } => {
                let c = c.max(0.0);
                let tail = (-rate * c).exp();
                if order == 1 {
                    (c + 1.0 / rate) * tail
                } else {
                    (c * c + 2.0 * c / rate + 2.0 / (rate * rate)) * tail
                }
            }
            Self::LogNormal { mu, sigma } => {
                let full = (k * mu + 0.5 * k * k * sigma * sigma).exp();
                if c <= 0.0 {
                    full
                } else {
                    full * normal::sf((c.ln() - mu - k * sigma * sigma) / sigma)
                }
            }
            Self::Uniform { lo, hi } => {
                let c = c.clamp(lo, hi);
                (hi.powf(k + 1.0) - c.powf(k + 1.0)) / ((k + 1.0) * (hi - lo))
            }
            Self::Pareto { xmin, alpha } => {
                let s = alpha - 1.0;
                let c = c.max(xmin);
                s * xmin.powf(s) * c.powf(k - s) / (s - k)
            }
            Self::Truncated {
                base_price,
                ref inner,
            } => inner.tail_moment(order, c.max(base_price))? / inner.sf(base_price),
        };
        Ok(value)
    }

    /// Same partial moment by tanh-sinh quadrature over the survival level
    /// `q = 1 − F(x)`: `∫_c^∞ x^k f(x) dx = ∫_0^{S(c)} Q̄(q)^k dq`.
    ///
    /// Independent of the closed forms; used to cross-check them and for any
    /// model without one.
    pub fn tail_moment_quadrature(&self, order: u32, c: f64) -> Result<f64, DistributionError> {
        self.check_order(order)?;
        let upper = self.sf(c);
        if upper <= 0.0 {
            return Ok(0.0);
        }
        let k = order as i32;
        let r = quadrature::tanh_sinh(|q| self.upper_quantile(q).powi(k), 0.0, upper, QUAD_TOL);
        Ok(r.value)
    }

    /// `∫_c^∞ x f(x) dx`: per-bid expected income when everything above `c`
    /// sells.
    pub fn tail_mean(&self, c: f64) -> Result<f64, DistributionError> {
        self.tail_moment(1, c)
    }

    /// `∫_c^∞ x² f(x) dx`.
    pub fn tail_moment2(&self, c: f64) -> Result<f64, DistributionError> {
        self.tail_moment(2, c)
    }

    pub fn mean(&self) -> Result<f64, DistributionError> {
        self.tail_moment(1, f64::NEG_INFINITY)
    }

    pub fn variance(&self) -> Result<f64, DistributionError> {
        let m = self.mean()?;
        Ok(self.tail_moment(2, f64::NEG_INFINITY)? - m * m)
    }

    /// Price for one uniform draw `u` in (0, 1).
    #[inline]
    pub fn price_from_uniform(&self, u: f64) -> f64 {
        self.quantile_unchecked(u)
    }

    /// Endless price stream for `seed`.
    pub fn stream(&self, seed: SeedSpec) -> PriceStream<'_> {
        PriceStream {
            model: self,
            uniforms: seed.uniforms(),
        }
    }
}

/// `n` i.i.d. prices by inverse transform from the `seed` stream.
pub fn sample(model: &PriceModel, seed: SeedSpec, n: usize) -> Vec<f64> {
    model.stream(seed).take(n).collect()
}

/// Arrival times of a homogeneous Poisson process with the given rate.
pub fn poisson_arrival_times(rate: f64, seed: SeedSpec, n: usize) -> Vec<f64> {
    let mut t = 0.0;
    seed.uniforms()
        .take(n)
        .map(|u| {
            t += -u.ln() / rate;
            t
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PriceStream<'a> {
    model: &'a PriceModel,
    uniforms: UniformStream,
}

impl Iterator for PriceStream<'_> {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        let u = self.uniforms.next_uniform();
        Some(self.model.price_from_uniform(u))
    }
}
