//! Standard normal cdf, survival and quantile, accurate in both tails.
//!
//! `erfc` is musl's (via `libm`), accurate to about an ulp. The inverse
//! starts from statrs' `erfc_inv` and is polished with Halley steps against
//! that `erfc`.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// Φ(z).
#[inline]
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// 1 − Φ(z), without cancellation for large z.
#[inline]
pub fn sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

#[inline]
pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Φ⁻¹(p) for p in (0, 1); ±∞ at the endpoints.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    // Work from whichever tail is smaller so the refinement target keeps
    // full relative precision.
    if p <= 0.5 {
        -upper_quantile(p)
    } else {
        upper_quantile(1.0 - p)
    }
}

/// z such that 1 − Φ(z) = q, for q in (0, 1).
pub fn upper_quantile(q: f64) -> f64 {
    if q <= 0.0 {
        return f64::INFINITY;
    }
    if q >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let mut z = SQRT_2 * erfc_inv(2.0 * q);
    // Halley steps on sf(z) - q = 0.
    for _ in 0..2 {
        let density = pdf(z);
        if density == 0.0 || !z.is_finite() {
            break;
        }
        let err = sf(z) - q;
        let u = err / density;
        z += u / (1.0 - 0.5 * z * u);
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        assert!((quantile(0.975) - 1.959963984540054).abs() < 1e-13);
        assert!((quantile(0.5)).abs() < 1e-15);
        // erfc(1) = 0.157299207050285130658...
        assert!((2.0 * sf(std::f64::consts::SQRT_2) / 0.15729920705028513 - 1.0).abs() < 1e-15);
        // Deep tail: 1 - Φ(8) = 6.22096057427178e-16
        assert!((sf(8.0) / 6.22096057427178e-16 - 1.0).abs() < 1e-10);
        assert!((upper_quantile(6.22096057427178e-16) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn round_trip_grid() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            assert!((cdf(quantile(p)) - p).abs() < 1e-15, "p = {p}");
        }
    }
}
