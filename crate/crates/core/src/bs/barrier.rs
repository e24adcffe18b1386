//! Single-barrier knock-out options under flat lognormal dynamics
//! (continuous monitoring, no rebate), plus the no-touch probability for an
//! arbitrary geometric drift.

use crate::market::{MarketSnapshot, OptionSide};
use crate::math::norm_cdf;

/// Knock-out price. `up` selects an upper barrier. Callers guard the
/// already-knocked region (spot at or through the barrier).
pub(crate) fn knock_out_price(
    side: OptionSide,
    strike: f64,
    barrier: f64,
    up: bool,
    sigma: f64,
    tau: f64,
    snap: &MarketSnapshot,
) -> f64 {
    let (s, k, b) = (snap.spot, strike, barrier);
    // Strike beyond the barrier leaves no payoff region the path can reach
    // without touching: finishing in the money implies a touch.
    if up && side == OptionSide::Call && k >= b {
        return 0.0;
    }
    if !up && side == OptionSide::Put && k <= b {
        return 0.0;
    }

    let carry = snap.r_d - snap.r_f;
    let st = sigma * tau.sqrt();
    let mu = (carry - 0.5 * sigma * sigma) / (sigma * sigma);
    let x1 = (s / k).ln() / st + (1.0 + mu) * st;
    let x2 = (s / b).ln() / st + (1.0 + mu) * st;
    let y1 = (b * b / (s * k)).ln() / st + (1.0 + mu) * st;
    let y2 = (b / s).ln() / st + (1.0 + mu) * st;
    let phi = side.sign();
    let eta = if up { -1.0 } else { 1.0 };
    let growth = s * ((carry - snap.r_d) * tau).exp();
    let dfk = k * snap.df_d(tau);
    let pow1 = (b / s).powf(2.0 * (mu + 1.0));
    let pow2 = (b / s).powf(2.0 * mu);

    let a_ = phi * growth * norm_cdf(phi * x1) - phi * dfk * norm_cdf(phi * (x1 - st));
    let b_ = phi * growth * norm_cdf(phi * x2) - phi * dfk * norm_cdf(phi * (x2 - st));
    let c_ = phi * growth * pow1 * norm_cdf(eta * y1) - phi * dfk * pow2 * norm_cdf(eta * (y1 - st));
    let d_ = phi * growth * pow1 * norm_cdf(eta * y2) - phi * dfk * pow2 * norm_cdf(eta * (y2 - st));

    match (side, up) {
        (OptionSide::Call, false) => {
            if k > b {
                a_ - c_
            } else {
                b_ - d_
            }
        }
        (OptionSide::Call, true) => a_ - b_ + c_ - d_,
        (OptionSide::Put, false) => a_ - b_ + c_ - d_,
        (OptionSide::Put, true) => {
            if k > b {
                b_ - d_
            } else {
                a_ - c_
            }
        }
    }
}

/// Probability that a geometric Brownian motion with drift `mu` (of the
/// spot, not the log) never touches `barrier` within `tau`. Returns 0 when
/// the barrier is at or through spot.
pub(crate) fn no_touch_probability(spot: f64, barrier: f64, mu: f64, sigma: f64, tau: f64) -> f64 {
    let theta = mu - 0.5 * sigma * sigma;
    let st = sigma * tau.sqrt();
    let a = (barrier / spot).ln();
    if a == 0.0 {
        return 0.0;
    }
    if st < 1e-12 {
        // Degenerate path: spot drifts deterministically at rate mu.
        let reach = theta * tau;
        return if a > 0.0 { (reach.max(0.0) < a) as u8 as f64 } else { (reach.min(0.0) > a) as u8 as f64 };
    }
    let reflect = (2.0 * theta * a / (sigma * sigma)).exp();
    let p = if a > 0.0 {
        norm_cdf((a - theta * tau) / st) - reflect * norm_cdf((-a - theta * tau) / st)
    } else {
        norm_cdf((-a + theta * tau) / st) - reflect * norm_cdf((a + theta * tau) / st)
    };
    p.clamp(0.0, 1.0)
}
