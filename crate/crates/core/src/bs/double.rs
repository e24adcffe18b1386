//! Double-barrier knock-outs via the image-expansion series with flat
//! barriers, and the two-sided no-touch probability.

use crate::market::{MarketSnapshot, OptionSide};
use crate::math::norm_cdf;

/// Terms kept on each side of the image series before giving up and
/// flagging the result.
const MAX_IMAGE_TERMS: i32 = 20;

/// Double knock-out price and a truncation warning. The series alternates
/// images across both barriers; each extra image pair decays like a Gaussian
/// tail, so a handful of terms suffices unless the band is extremely tight
/// relative to total variance. Callers guard the knocked region.
pub(crate) fn double_knock_out_price(
    side: OptionSide,
    strike: f64,
    lower: f64,
    upper: f64,
    sigma: f64,
    tau: f64,
    snap: &MarketSnapshot,
) -> (f64, bool) {
    let (s, k, l, h) = (snap.spot, strike, lower, upper);
    // Finishing in the money while inside the band is impossible when the
    // strike sits at or beyond the barrier on the payoff side.
    match side {
        OptionSide::Call if k >= h => return (0.0, false),
        OptionSide::Put if k <= l => return (0.0, false),
        _ => {}
    }
    let carry = snap.r_d - snap.r_f;
    let st = sigma * tau.sqrt();
    let mu1 = 2.0 * carry / (sigma * sigma) + 1.0;
    let (ln_s, ln_k, ln_l, ln_h) = (s.ln(), k.ln(), l.ln(), h.ln());
    let half_var_drift = (carry + 0.5 * sigma * sigma) * tau;
    let band = ln_h - ln_l;

    // For a call the payoff region is truncated above at H; a put's region
    // is truncated below at L. s1 multiplies the asset leg, s2 the strike
    // leg (put: roles of the two discounted legs swap).
    let (mut s1, mut s2) = (0.0_f64, 0.0_f64);
    let mut warned = true;
    let scale_asset = s * snap.df_f(tau);
    let scale_strike = k * snap.df_d(tau);
    let mut n = 0;
    while n <= MAX_IMAGE_TERMS {
        let mut inc = 0.0_f64;
        let signs: &[i32] = if n == 0 { &[0] } else { &[-1, 1] };
        for &sgn in signs {
            let nn = f64::from(sgn * n);
            let shift = 2.0 * nn * band;
            let f1 = (nn * mu1 * band).exp();
            let f2 = (mu1 * ((nn + 1.0) * ln_l - nn * ln_h - ln_s)).exp();
            let g1 = (nn * (mu1 - 2.0) * band).exp();
            let g2 = ((mu1 - 2.0) * ((nn + 1.0) * ln_l - nn * ln_h - ln_s)).exp();
            let (d1, d2, d3, d4) = match side {
                OptionSide::Call => (
                    (ln_s - ln_k + shift + half_var_drift) / st,
                    (ln_s - ln_h + shift + half_var_drift) / st,
                    ((2.0 * nn + 2.0) * ln_l - ln_k - ln_s - 2.0 * nn * ln_h + half_var_drift) / st,
                    ((2.0 * nn + 2.0) * ln_l - ln_h - ln_s - 2.0 * nn * ln_h + half_var_drift) / st,
                ),
                OptionSide::Put => (
                    (ln_s - ln_l + shift + half_var_drift) / st,
                    (ln_s - ln_k + shift + half_var_drift) / st,
                    ((2.0 * nn + 2.0) * ln_l - ln_l - ln_s - 2.0 * nn * ln_h + half_var_drift) / st,
                    ((2.0 * nn + 2.0) * ln_l - ln_k - ln_s - 2.0 * nn * ln_h + half_var_drift) / st,
                ),
            };
            let (t1, t2) = match side {
                OptionSide::Call => (
                    f1 * (norm_cdf(d1) - norm_cdf(d2)) - f2 * (norm_cdf(d3) - norm_cdf(d4)),
                    g1 * (norm_cdf(d1 - st) - norm_cdf(d2 - st))
                        - g2 * (norm_cdf(d3 - st) - norm_cdf(d4 - st)),
                ),
                OptionSide::Put => (
                    g1 * (norm_cdf(d1 - st) - norm_cdf(d2 - st))
                        - g2 * (norm_cdf(d3 - st) - norm_cdf(d4 - st)),
                    f1 * (norm_cdf(d1) - norm_cdf(d2)) - f2 * (norm_cdf(d3) - norm_cdf(d4)),
                ),
            };
            s1 += t1;
            s2 += t2;
            inc += (t1 * scale_asset).abs().max((t2 * scale_strike).abs());
        }
        if n > 0 && inc < 1e-12 * s {
            warned = false;
            break;
        }
        n += 1;
    }

    let value = match side {
        OptionSide::Call => scale_asset * s1 - scale_strike * s2,
        OptionSide::Put => scale_strike * s1 - scale_asset * s2,
    };
    (value, warned)
}

/// Probability that the spot stays strictly inside (lower, upper) for time
/// `tau` under geometric drift `mu`, by the standard two-sided image sum.
pub(crate) fn double_no_touch_probability(
    spot: f64,
    lower: f64,
    upper: f64,
    mu: f64,
    sigma: f64,
    tau: f64,
) -> f64 {
    let theta = mu - 0.5 * sigma * sigma;
    let st = sigma * tau.sqrt();
    let x = (spot / lower).ln();
    let w = (upper / lower).ln();
    if x <= 0.0 || x >= w {
        return 0.0;
    }
    if st < 1e-12 {
        let reach = theta * tau;
        return (reach.max(0.0) < w - x && reach.min(0.0) > -x) as u8 as f64;
    }
    let sig2 = sigma * sigma;
    let mut total = 0.0;
    for n in -30i32..=30 {
        let nf = f64::from(n);
        let t1 = (2.0 * nf * w * theta / sig2).exp()
            * (norm_cdf((w - x - 2.0 * nf * w - theta * tau) / st)
                - norm_cdf((-x - 2.0 * nf * w - theta * tau) / st));
        let t2 = ((2.0 * nf * w - 2.0 * x) * theta / sig2).exp()
            * (norm_cdf((w + x - 2.0 * nf * w - theta * tau) / st)
                - norm_cdf((x - 2.0 * nf * w - theta * tau) / st));
        total += t1 - t2;
    }
    total.clamp(0.0, 1.0)
}
