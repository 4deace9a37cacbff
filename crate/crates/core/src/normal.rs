//! Standard normal density, distribution and tail functions.
//!
//! Tails are evaluated through `erfc` so that they keep full relative
//! precision far from the mean; beyond the range where `erfc` stays a normal
//! float, [`ln_sf`] switches to the continued fraction for the Mills ratio.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Beyond this point `ln_sf` uses the continued fraction.
const CF_THRESHOLD: f64 = 30.0;

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// `P(Z <= z)`.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Survival function `P(Z > z)`.
pub fn sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// `ln P(Z > z)`, accurate for arbitrarily large `z`.
pub fn ln_sf(z: f64) -> f64 {
    if z < CF_THRESHOLD {
        (0.5 * erfc(z * FRAC_1_SQRT_2)).ln()
    } else {
        ln_pdf(z) + mills_ratio_cf(z).ln()
    }
}

/// `ln P(Z <= z)`.
pub fn ln_cdf(z: f64) -> f64 {
    ln_sf(-z)
}

/// Quantile function, `cdf(quantile(p)) = p`.
pub fn quantile(p: f64) -> f64 {
    -isf(p)
}

/// Inverse survival function, `sf(isf(q)) = q`.
pub fn isf(q: f64) -> f64 {
    let z = SQRT_2 * erfc_inv(2.0 * q);
    if !z.is_finite() {
        return z;
    }
    // one Halley step against the accurate tail
    let e = (sf(z) - q) / pdf(z);
    if e.is_finite() {
        z + e / (1.0 - 0.5 * z * e)
    } else {
        z
    }
}

/// `P(za < Z <= zb)` evaluated on whichever tail avoids cancellation.
pub fn interval_prob(za: f64, zb: f64) -> f64 {
    if zb <= za {
        return 0.0;
    }
    if za >= 0.0 {
        // both in the upper half: sf(za) - sf(zb) = sf(za) (1 - sf(zb)/sf(za))
        let lead = ln_sf(za);
        lead.exp() * -(ln_sf(zb) - lead).exp_m1()
    } else if zb <= 0.0 {
        let lead = ln_cdf(zb);
        lead.exp() * -(ln_cdf(za) - lead).exp_m1()
    } else {
        1.0 - cdf(za) - sf(zb)
    }
}

/// `ln P(za < Z <= zb)`; stays finite where the probability underflows.
pub fn ln_interval_prob(za: f64, zb: f64) -> f64 {
    if zb <= za {
        return f64::NEG_INFINITY;
    }
    if za >= 0.0 {
        let lead = ln_sf(za);
        lead + ln_one_minus_exp(ln_sf(zb) - lead)
    } else if zb <= 0.0 {
        let lead = ln_cdf(zb);
        lead + ln_one_minus_exp(ln_cdf(za) - lead)
    } else {
        interval_prob(za, zb).ln()
    }
}

/// `ln(1 - e^a)` for `a <= 0`.
fn ln_one_minus_exp(a: f64) -> f64 {
    if a > -LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// Mills ratio `sf(z) / pdf(z)` by backward evaluation of the continued
/// fraction `1 / (z + 1 / (z + 2 / (z + 3 / ...)))`, valid for `z >> 1`.
fn mills_ratio_cf(z: f64) -> f64 {
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + k as f64 / tail;
    }
    1.0 / tail
}
