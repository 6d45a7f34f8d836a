use crate::distributions::{DistributionError, PriceModel};
use serde::{Deserialize, Serialize};

/// Asymptotic variance constant of the sale count, Var[Ñ(N)] ≈ b·N, as
/// estimated by simulation.
pub const DEFAULT_B: f64 = 0.0383;

/// Large-N predictions for one price law.
///
/// Quantities that diverge for heavy-tailed laws are `None` and the matching
/// `infinite_*` flag is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheorySummary {
    pub model: String,
    pub pc: f64,
    pub b_constant: f64,
    /// Critical price, F(xc) = pc.
    pub xc: f64,
    /// Expected fraction of bids that sell, 1 − pc.
    pub expected_sales_fraction: f64,
    /// lim E[TI]/N = ∫_xc^∞ x f(x) dx.
    pub expected_ti_per_bid: Option<f64>,
    /// Mean of the sale-price law (f truncated to x > xc).
    pub mean_y: Option<f64>,
    pub var_y: Option<f64>,
    /// First-order approximation of lim Var[TI]/N:
    /// (1 − pc)·Var[Y] + b·E[Y]².
    pub af_approx: Option<f64>,
    pub infinite_mean: bool,
    pub infinite_variance: bool,
}

pub fn theory_summary(
    model: &PriceModel,
    pc: f64,
    b: f64,
) -> Result<TheorySummary, DistributionError> {
    let xc = model.critical_price(pc)?;
    let sold = 1.0 - pc;

    let (expected_ti_per_bid, mean_y) = match model.tail_mean(xc) {
        Ok(t) => (Some(t), Some(t / sold)),
        Err(DistributionError::InfiniteMoment { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let var_y = match (mean_y, model.tail_moment2(xc)) {
        (Some(m), Ok(t2)) => Some((t2 / sold - m * m).max(0.0)),
        (_, Ok(_)) | (_, Err(DistributionError::InfiniteMoment { .. })) => None,
        (_, Err(e)) => return Err(e),
    };
    let af_approx = match (mean_y, var_y) {
        (Some(m), Some(v)) => Some(sold * v + b * m * m),
        _ => None,
    };

    Ok(TheorySummary {
        model: model.to_string(),
        pc,
        b_constant: b,
        xc,
        expected_sales_fraction: sold,
        expected_ti_per_bid,
        mean_y,
        var_y,
        af_approx,
        infinite_mean: expected_ti_per_bid.is_none(),
        infinite_variance: var_y.is_none(),
    })
}
