//! Flat-volatility lognormal pricing for every supported contract kind,
//! implied volatility, and the three second-order vol sensitivities.
//!
//! Prices are in domestic currency per unit of foreign notional (touch and
//! cash contracts: per unit of domestic payout).

pub(crate) mod barrier;
pub(crate) mod double;

use crate::arbitrage;
use crate::error::{Error, Result};
use crate::instruments::{OptionKind, OptionSpec};
use crate::market::{d12, MarketSnapshot, OptionSide};
use crate::math::{newton_bracketed, norm_cdf, norm_pdf};

/// Below this total standard deviation the lognormal degenerates to the
/// deterministic forward path.
pub(crate) const MIN_TOTAL_STDDEV: f64 = 1e-8;

/// Vega, vanna and volga of a vanilla (same for call and put), in spot
/// measure per unit of vol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreeksTriple {
    pub vega: f64,
    pub vanna: f64,
    pub volga: f64,
}

/// A flat-vol price plus the audit flags the formulas can raise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsPrice {
    pub value: f64,
    /// A barrier event was already decided by the spot location.
    pub knocked: bool,
    /// The double-barrier image series hit its term cap before converging.
    pub series_warning: bool,
}

/// Vanilla option price.
pub fn vanilla_price(
    side: OptionSide,
    strike: f64,
    sigma: f64,
    tau: f64,
    snap: &MarketSnapshot,
) -> f64 {
    let f = snap.spot * ((snap.r_d - snap.r_f) * tau).exp();
    let df_d = snap.df_d(tau);
    let phi = side.sign();
    if sigma * tau.sqrt() < MIN_TOTAL_STDDEV {
        return df_d * (phi * (f - strike)).max(0.0);
    }
    let (d1, d2) = d12(f, strike, sigma, tau);
    df_d * phi * (f * norm_cdf(phi * d1) - strike * norm_cdf(phi * d2))
}

/// Vega, vanna, volga of a vanilla at the given strike and vol.
pub fn vanilla_greeks(strike: f64, sigma: f64, tau: f64, snap: &MarketSnapshot) -> GreeksTriple {
    let f = snap.spot * ((snap.r_d - snap.r_f) * tau).exp();
    let (d1, d2) = d12(f, strike, sigma, tau);
    let df_f = snap.df_f(tau);
    let vega = snap.spot * df_f * tau.sqrt() * norm_pdf(d1);
    GreeksTriple {
        vega,
        vanna: -df_f * norm_pdf(d1) * d2 / sigma,
        volga: vega * d1 * d2 / sigma,
    }
}

/// Invert the vanilla formula for volatility. The target must lie strictly
/// between the zero-vol price and the payoff supremum.
pub fn implied_vol(
    side: OptionSide,
    strike: f64,
    target_price: f64,
    tau: f64,
    snap: &MarketSnapshot,
) -> Result<f64> {
    snap.validate()?;
    if strike <= 0.0 || tau <= 0.0 {
        return Err(Error::Domain("strike and tenor must be positive".into()));
    }
    let f = snap.forward_price(tau)?;
    let df_d = snap.df_d(tau);
    let phi = side.sign();
    let intrinsic = df_d * (phi * (f - strike)).max(0.0);
    let sup = match side {
        OptionSide::Call => df_d * f,
        OptionSide::Put => df_d * strike,
    };
    let slack = 1e-12 * snap.spot;
    if target_price < intrinsic - slack || target_price > sup + slack {
        return Err(Error::Domain(format!(
            "price {target_price} outside attainable range [{intrinsic}, {sup}]"
        )));
    }
    let f_and_slope = |sigma: f64| {
        let value = vanilla_price(side, strike, sigma, tau, snap) - target_price;
        (value, vanilla_greeks(strike, sigma, tau, snap).vega)
    };
    let guess = (target_price / (0.4 * snap.spot * tau.sqrt())).clamp(0.05, 1.0);
    newton_bracketed(f_and_slope, 1e-9, 5.0, guess, 1e-13 * snap.spot, 200)
}

/// Whether the zero-vol (pure drift) path touches the given barriers.
fn drift_path_touches(lower: Option<f64>, upper: Option<f64>, tau: f64, snap: &MarketSnapshot) -> bool {
    let end = snap.spot * ((snap.r_d - snap.r_f) * tau).exp();
    let hi = snap.spot.max(end);
    let lo = snap.spot.min(end);
    lower.is_some_and(|l| lo <= l) || upper.is_some_and(|u| hi >= u)
}

/// Spot already at or through a barrier the contract is still watching.
fn already_triggered(spec: &OptionSpec, spot: f64) -> bool {
    let (lower, upper) = spec.barrier_levels();
    lower.is_some_and(|l| spot <= l) || upper.is_some_and(|u| spot >= u)
}

fn native_price(spec: &OptionSpec, sigma: f64, snap: &MarketSnapshot) -> BsPrice {
    use OptionKind::*;
    let ok = |value: f64| BsPrice { value, knocked: false, series_warning: false };
    let dead = BsPrice { value: 0.0, knocked: true, series_warning: false };
    let (lower, upper) = spec.barrier_levels();
    let watching = !matches!(spec.kind, VanillaCall | VanillaPut | Cash);
    if watching && already_triggered(spec, snap.spot) {
        return dead;
    }
    if watching && sigma * spec.tau.sqrt() < MIN_TOTAL_STDDEV {
        // Deterministic path: survival is a yes/no question.
        if drift_path_touches(lower, upper, spec.tau, snap) {
            return dead;
        }
        let value = match spec.kind {
            NoTouch | DoubleNoTouch => snap.df_d(spec.tau),
            _ => vanilla_price(spec.side().expect("strike kind"), spec.strike.expect("strike"), sigma, spec.tau, snap),
        };
        return ok(value);
    }
    match spec.kind {
        VanillaCall | VanillaPut => ok(vanilla_price(
            spec.side().expect("side"),
            spec.strike.expect("strike"),
            sigma,
            spec.tau,
            snap,
        )),
        Cash => ok(snap.df_d(spec.tau)),
        UpOutCall | UpOutPut | DownOutCall | DownOutPut => {
            let up = upper.is_some();
            let level = upper.or(lower).expect("validated barrier");
            ok(barrier::knock_out_price(
                spec.side().expect("side"),
                spec.strike.expect("strike"),
                level,
                up,
                sigma,
                spec.tau,
                snap,
            ))
        }
        DkoCall | DkoPut => {
            let (value, warned) = double::double_knock_out_price(
                spec.side().expect("side"),
                spec.strike.expect("strike"),
                lower.expect("lower"),
                upper.expect("upper"),
                sigma,
                spec.tau,
                snap,
            );
            BsPrice { value, knocked: false, series_warning: warned }
        }
        NoTouch => {
            let level = upper.or(lower).expect("validated barrier");
            let prob =
                barrier::no_touch_probability(snap.spot, level, snap.r_d - snap.r_f, sigma, spec.tau);
            ok(snap.df_d(spec.tau) * prob)
        }
        DoubleNoTouch => {
            let prob = double::double_no_touch_probability(
                snap.spot,
                lower.expect("lower"),
                upper.expect("upper"),
                snap.r_d - snap.r_f,
                sigma,
                spec.tau,
            );
            ok(snap.df_d(spec.tau) * prob)
        }
        _ => unreachable!("composite kinds are decomposed before native pricing"),
    }
}

/// Price any supported contract at one flat volatility. Composites are
/// priced through their replication decompositions.
pub fn price(spec: &OptionSpec, sigma: f64, snap: &MarketSnapshot) -> Result<BsPrice> {
    spec.validate()?;
    snap.validate()?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Domain(format!("vol must be non-negative, got {sigma}")));
    }
    let mut value = 0.0;
    let mut knocked = false;
    let mut series_warning = false;
    for (sign, part) in arbitrage::decompose(spec) {
        let leg = native_price(&part, sigma, snap);
        value += sign * leg.value;
        knocked |= leg.knocked;
        series_warning |= leg.series_warning;
    }
    Ok(BsPrice { value, knocked, series_warning })
}
