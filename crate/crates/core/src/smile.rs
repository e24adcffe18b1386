//! Three-pillar smile construction from ATM, risk-reversal and butterfly
//! quotes, strike interpolation through the exact three-option hedge
//! portfolio, and conversion between one-vol and two-vol butterfly quotes.

use serde::{Deserialize, Serialize};

use crate::bs;
use crate::error::{Error, Result};
use crate::market::{
    atm_strike, strike_from_delta, Conventions, MarketSnapshot, OptionSide,
};
use crate::math::secant;
use crate::vanna_volga::closed_form_weights;

/// Interpolated vols are floored here so extreme strikes stay invertible.
pub const VOL_FLOOR: f64 = 1e-4;

const PILLAR_DELTA: f64 = 0.25;

/// Whether a butterfly quote is a smile (two-vol) or broker (one-vol) number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BfKind {
    OneVol,
    TwoVol,
}

/// Market quote set for one tenor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TenorQuote {
    pub tau: f64,
    pub sigma_atm: f64,
    /// Signed: 25-delta call vol minus 25-delta put vol.
    pub sigma_rr25: f64,
    pub sigma_bf25: f64,
    pub bf_kind: BfKind,
}

impl TenorQuote {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Domain(format!("tenor must be positive, got {}", self.tau)));
        }
        if !(self.sigma_atm.is_finite() && self.sigma_atm > 0.0) {
            return Err(Error::Domain(format!("ATM vol must be positive, got {}", self.sigma_atm)));
        }
        if !self.sigma_rr25.is_finite() || !self.sigma_bf25.is_finite() {
            return Err(Error::Domain("quote vols must be finite".into()));
        }
        if self.bf_kind == BfKind::TwoVol {
            let (p, _, c) = self.pillar_vols();
            if p <= 0.0 || c <= 0.0 {
                return Err(Error::Domain(format!(
                    "pillar vols must be positive (put {p}, call {c})"
                )));
            }
        } else if self.sigma_atm + self.sigma_bf25 <= 0.0 {
            return Err(Error::Domain("strangle vol must be positive".into()));
        }
        Ok(())
    }

    /// (put, atm, call) pillar vols implied by a two-vol quote.
    pub fn pillar_vols(&self) -> (f64, f64, f64) {
        let c = self.sigma_atm + self.sigma_bf25 + 0.5 * self.sigma_rr25;
        let p = self.sigma_atm + self.sigma_bf25 - 0.5 * self.sigma_rr25;
        (p, self.sigma_atm, c)
    }
}

/// One smile pillar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pillar {
    pub strike: f64,
    pub vol: f64,
}

/// Three-pillar smile for one tenor; immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmileCurve {
    pub put_pillar: Pillar,
    pub atm_pillar: Pillar,
    pub call_pillar: Pillar,
    pub tau: f64,
    pub snapshot: MarketSnapshot,
    pub conventions: Conventions,
}

impl SmileCurve {
    pub fn strikes(&self) -> [f64; 3] {
        [self.put_pillar.strike, self.atm_pillar.strike, self.call_pillar.strike]
    }

    pub fn vols(&self) -> [f64; 3] {
        [self.put_pillar.vol, self.atm_pillar.vol, self.call_pillar.vol]
    }

    pub fn sigma_atm(&self) -> f64 {
        self.atm_pillar.vol
    }

    /// Risk reversal recovered from the pillars.
    pub fn sigma_rr25(&self) -> f64 {
        self.call_pillar.vol - self.put_pillar.vol
    }

    /// Two-vol butterfly recovered from the pillars.
    pub fn sigma_bf25(&self) -> f64 {
        0.5 * (self.call_pillar.vol + self.put_pillar.vol) - self.atm_pillar.vol
    }

    /// Smile vol at an arbitrary strike: price the strike's vanilla as the
    /// ATM-vol price plus the weighted pillar repricing costs, then invert.
    /// Exact at the pillars because the weights are Kronecker deltas there.
    pub fn vol_at_strike(&self, strike: f64) -> Result<f64> {
        if !(strike.is_finite() && strike > 0.0) {
            return Err(Error::Domain(format!("strike must be positive, got {strike}")));
        }
        let [k_p, k_a, k_c] = self.strikes();
        let vols = self.vols();
        let sigma_atm = self.sigma_atm();
        let snap = &self.snapshot;
        let weights = closed_form_weights(strike, k_p, k_a, k_c, sigma_atm, self.tau, snap);
        let mut px = bs::vanilla_price(OptionSide::Call, strike, sigma_atm, self.tau, snap);
        for ((w, k_i), vol_i) in weights.iter().zip(self.strikes()).zip(vols) {
            px += w
                * (bs::vanilla_price(OptionSide::Call, k_i, vol_i, self.tau, snap)
                    - bs::vanilla_price(OptionSide::Call, k_i, sigma_atm, self.tau, snap));
        }
        // Invert on the out-of-the-money side, which is better conditioned.
        let forward = snap.forward_price(self.tau)?;
        let (side, target) = if strike >= forward {
            (OptionSide::Call, px)
        } else {
            (OptionSide::Put, px - snap.df_d(self.tau) * (forward - strike))
        };
        if target <= bs::vanilla_price(side, strike, VOL_FLOOR, self.tau, snap) {
            return Ok(VOL_FLOOR);
        }
        bs::implied_vol(side, strike, target, self.tau, snap)
    }

    /// Vanilla price at the smile vol for its strike.
    pub fn price_on_curve(&self, side: OptionSide, strike: f64) -> Result<f64> {
        let vol = self.vol_at_strike(strike)?;
        Ok(bs::vanilla_price(side, strike, vol, self.tau, &self.snapshot))
    }
}

/// Solve a pillar strike so its delta at the pillar vol hits the target.
/// Framed as a fixed point from the ATM vol; the pillar vol is
/// strike-independent so this settles after one refresh, but oscillation
/// damping is kept for safety.
fn pillar_strike(
    target_delta: f64,
    side: OptionSide,
    pillar_vol: f64,
    sigma_atm: f64,
    tau: f64,
    snap: &MarketSnapshot,
    conv: &Conventions,
) -> Result<f64> {
    let mut vol = sigma_atm;
    let mut k = strike_from_delta(target_delta, side, vol, snap, tau, conv)?;
    let mut prev_step = 0.0_f64;
    for _ in 0..100 {
        vol = pillar_vol;
        let k_next = strike_from_delta(target_delta, side, vol, snap, tau, conv)?;
        let step = k_next - k;
        if step.abs() <= 1e-10 * k.abs() {
            return Ok(k_next);
        }
        k = if prev_step * step < 0.0 { 0.5 * (k + k_next) } else { k_next };
        prev_step = step;
    }
    Err(Error::Convergence("pillar strike fixed point did not settle".into()))
}

/// Build the smile from a two-vol quote.
pub fn build_smile(
    quote: &TenorQuote,
    snap: &MarketSnapshot,
    conv: &Conventions,
) -> Result<SmileCurve> {
    quote.validate()?;
    snap.validate()?;
    conv.validate()?;
    if quote.bf_kind != BfKind::TwoVol {
        return Err(Error::Config(
            "smile construction needs a two-vol butterfly; convert the broker quote first".into(),
        ));
    }
    let (sigma_p, sigma_atm, sigma_c) = quote.pillar_vols();
    let forward = snap.forward_price(quote.tau)?;
    let k_atm = atm_strike(forward, sigma_atm, quote.tau, conv)?;
    let k_c = pillar_strike(PILLAR_DELTA, OptionSide::Call, sigma_c, sigma_atm, quote.tau, snap, conv)?;
    let k_p = pillar_strike(-PILLAR_DELTA, OptionSide::Put, sigma_p, sigma_atm, quote.tau, snap, conv)?;
    if !(k_p < k_atm && k_atm < k_c) {
        return Err(Error::NoSolution(format!(
            "pillar strikes are not ordered: {k_p} / {k_atm} / {k_c}"
        )));
    }
    Ok(SmileCurve {
        put_pillar: Pillar { strike: k_p, vol: sigma_p },
        atm_pillar: Pillar { strike: k_atm, vol: sigma_atm },
        call_pillar: Pillar { strike: k_c, vol: sigma_c },
        tau: quote.tau,
        snapshot: *snap,
        conventions: *conv,
    })
}

/// Price mismatch of the broker strangle at a candidate one-vol spread:
/// both legs at the single vol versus both legs on the curve.
fn strangle_mismatch(curve: &SmileCurve, spread: f64) -> Result<f64> {
    let vol = curve.sigma_atm() + spread;
    if vol <= VOL_FLOOR {
        return Err(Error::Domain(format!("strangle vol {vol} below floor")));
    }
    let snap = &curve.snapshot;
    let conv = &curve.conventions;
    let k_c = strike_from_delta(PILLAR_DELTA, OptionSide::Call, vol, snap, curve.tau, conv)?;
    let k_p = strike_from_delta(-PILLAR_DELTA, OptionSide::Put, vol, snap, curve.tau, conv)?;
    let single = bs::vanilla_price(OptionSide::Call, k_c, vol, curve.tau, snap)
        + bs::vanilla_price(OptionSide::Put, k_p, vol, curve.tau, snap);
    let on_curve =
        curve.price_on_curve(OptionSide::Call, k_c)? + curve.price_on_curve(OptionSide::Put, k_p)?;
    Ok(single - on_curve)
}

/// One-vol butterfly implied by the curve: the spread over ATM at which the
/// 25-delta strangle, struck and priced at that single vol, costs the same
/// as the identical strangle priced on the smile.
pub fn bf1vol_from_curve(curve: &SmileCurve) -> Result<f64> {
    let ftol = 1e-10 * curve.snapshot.spot;
    let start = curve.sigma_bf25();
    let f = |s: f64| strangle_mismatch(curve, s).unwrap_or(f64::NAN);
    let root = secant(f, start, start + 1e-4, ftol, 100)?;
    if !root.is_finite() {
        return Err(Error::Convergence("strangle equality search left the quote domain".into()));
    }
    Ok(root)
}

/// The broker-strangle strikes at a given one-vol spread, for reporting.
pub fn strangle_strikes(
    curve: &SmileCurve,
    bf1vol: f64,
) -> Result<(f64, f64)> {
    let vol = curve.sigma_atm() + bf1vol;
    let snap = &curve.snapshot;
    let conv = &curve.conventions;
    let k_p = strike_from_delta(-PILLAR_DELTA, OptionSide::Put, vol, snap, curve.tau, conv)?;
    let k_c = strike_from_delta(PILLAR_DELTA, OptionSide::Call, vol, snap, curve.tau, conv)?;
    Ok((k_p, k_c))
}

/// Convert a one-vol butterfly quote to the two-vol quote whose smile
/// reproduces it, by an outer root search on the two-vol spread.
pub fn bf2vol_from_bf1vol(
    quote: &TenorQuote,
    snap: &MarketSnapshot,
    conv: &Conventions,
) -> Result<TenorQuote> {
    quote.validate()?;
    if quote.bf_kind != BfKind::OneVol {
        return Err(Error::Config("quote already carries a two-vol butterfly".into()));
    }
    let target = quote.sigma_bf25;
    let two_vol = |b2: f64| TenorQuote { sigma_bf25: b2, bf_kind: BfKind::TwoVol, ..*quote };
    let g = |b2: f64| -> Result<f64> {
        Ok(bf1vol_from_curve(&build_smile(&two_vol(b2), snap, conv)?)? - target)
    };
    // Pillar positivity bounds the search from below.
    let floor = 0.5 * quote.sigma_rr25.abs() - quote.sigma_atm + VOL_FLOOR;
    let mut lo = (target - 2e-3).max(floor);
    let mut hi = target + 2e-3;
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    let mut budget = 40;
    while g_lo.signum() == g_hi.signum() && budget > 0 {
        if g_lo > 0.0 {
            lo = (lo - 5e-3).max(floor);
            g_lo = g(lo)?;
        } else {
            hi += 5e-3;
            g_hi = g(hi)?;
        }
        budget -= 1;
        if hi > 0.5 {
            break;
        }
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoSolution(format!(
            "no two-vol butterfly in [{lo}, {hi}] reproduces the one-vol quote {target}"
        )));
    }
    let b2 = crate::math::bisect(|x| g(x).unwrap_or(f64::NAN), lo, hi, 1e-8, 100)?;
    Ok(two_vol(b2))
}

/// Vega-weighted average of the two 25-delta pillar vols, the first-order
/// stand-in for the one-vol butterfly.
pub fn vega_weighted_strangle(curve: &SmileCurve) -> f64 {
    let snap = &curve.snapshot;
    let sigma_atm = curve.sigma_atm();
    let v_p = bs::vanilla_greeks(curve.put_pillar.strike, sigma_atm, curve.tau, snap).vega;
    let v_c = bs::vanilla_greeks(curve.call_pillar.strike, sigma_atm, curve.tau, snap).vega;
    (curve.put_pillar.vol * v_p + curve.call_pillar.vol * v_c) / (v_p + v_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{included_conventions, usdchf_curve, usdchf_quote, usdchf_snapshot};
    use approx::assert_abs_diff_eq;

    #[test]
    fn usdchf_pillar_strikes() {
        let c = usdchf_curve();
        assert_abs_diff_eq!(c.put_pillar.strike, 0.958640541337, epsilon = 1e-8);
        assert_abs_diff_eq!(c.atm_pillar.strike, 1.067015011012, epsilon = 1e-8);
        assert_abs_diff_eq!(c.call_pillar.strike, 1.213243065012, epsilon = 1e-8);
        assert_abs_diff_eq!(c.put_pillar.vol, 0.1860, epsilon = 1e-15);
        assert_abs_diff_eq!(c.call_pillar.vol, 0.1730, epsilon = 1e-15);
    }

    #[test]
    fn interpolation_is_exact_at_pillars() {
        let c = usdchf_curve();
        for p in [c.put_pillar, c.atm_pillar, c.call_pillar] {
            assert_abs_diff_eq!(c.vol_at_strike(p.strike).unwrap(), p.vol, epsilon = 1e-10);
        }
    }

    #[test]
    fn interpolation_reference_values() {
        let c = usdchf_curve();
        assert_abs_diff_eq!(c.vol_at_strike(0.98).unwrap(), 0.180978568748, epsilon = 1e-9);
        assert_abs_diff_eq!(c.vol_at_strike(1.09).unwrap(), 0.167287234350, epsilon = 1e-9);
        assert_abs_diff_eq!(c.vol_at_strike(1.20).unwrap(), 0.171520944487, epsilon = 1e-9);
    }

    #[test]
    fn flat_quotes_give_a_flat_smile() {
        let quote = TenorQuote {
            sigma_rr25: 0.0,
            sigma_bf25: 0.0,
            ..usdchf_quote()
        };
        let c = build_smile(&quote, &usdchf_snapshot(), &included_conventions()).unwrap();
        let mut k = 0.9;
        while k < 1.3 {
            assert_abs_diff_eq!(c.vol_at_strike(k).unwrap(), 0.1685, epsilon = 1e-10);
            k += 0.05;
        }
    }

    #[test]
    fn quote_reconstruction_from_pillars() {
        let c = usdchf_curve();
        assert_abs_diff_eq!(c.sigma_rr25(), -0.0130, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sigma_bf25(), 0.0110, epsilon = 1e-12);
        let interp_rr = c.vol_at_strike(c.call_pillar.strike).unwrap()
            - c.vol_at_strike(c.put_pillar.strike).unwrap();
        assert_abs_diff_eq!(interp_rr, -0.0130, epsilon = 1e-9);
    }

    #[test]
    fn broker_strangle_reference_values() {
        let c = usdchf_curve();
        let bf1 = bf1vol_from_curve(&c).unwrap();
        assert_abs_diff_eq!(bf1, 0.010468135842, epsilon = 1e-8);
        let (k_p, k_c) = strangle_strikes(&c, bf1).unwrap();
        assert_abs_diff_eq!(k_p, 0.962994314317, epsilon = 1e-7);
        assert_abs_diff_eq!(k_c, 1.218029894543, epsilon = 1e-7);
    }

    #[test]
    fn flat_smile_brokers_at_zero() {
        let quote = TenorQuote { sigma_rr25: 0.0, sigma_bf25: 0.0, ..usdchf_quote() };
        let c = build_smile(&quote, &usdchf_snapshot(), &included_conventions()).unwrap();
        assert_abs_diff_eq!(bf1vol_from_curve(&c).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn one_vol_conversion_round_trips() {
        let snap = usdchf_snapshot();
        let conv = included_conventions();
        let c = usdchf_curve();
        let bf1 = bf1vol_from_curve(&c).unwrap();
        let one_vol = TenorQuote { sigma_bf25: bf1, bf_kind: BfKind::OneVol, ..usdchf_quote() };
        let back = bf2vol_from_bf1vol(&one_vol, &snap, &conv).unwrap();
        assert_eq!(back.bf_kind, BfKind::TwoVol);
        assert_abs_diff_eq!(back.sigma_bf25, 0.0110, epsilon = 1e-6);
    }

    #[test]
    fn vega_weighted_strangle_approximates_the_one_vol() {
        let c = usdchf_curve();
        let vws = vega_weighted_strangle(&c);
        assert_abs_diff_eq!(vws, 0.179022880265, epsilon = 1e-9);
        let bf1 = bf1vol_from_curve(&c).unwrap();
        assert!((vws - (c.sigma_atm() + bf1)).abs() < 0.0015);
        assert!(vws > c.call_pillar.vol.min(c.put_pillar.vol));
        assert!(vws < c.call_pillar.vol.max(c.put_pillar.vol));
    }

    #[test]
    fn vega_weighting_collapses_as_the_smile_symmetrizes() {
        // The gap between the vega-weighted strangle and the true broker
        // one-vol shrinks as the risk reversal goes to zero.
        let snap = usdchf_snapshot();
        let conv = included_conventions();
        let mut last_gap = f64::INFINITY;
        for rr in [-0.013, -0.0065, -0.002] {
            let quote = TenorQuote { sigma_rr25: rr, ..usdchf_quote() };
            let c = build_smile(&quote, &snap, &conv).unwrap();
            let gap = (vega_weighted_strangle(&c)
                - (c.sigma_atm() + bf1vol_from_curve(&c).unwrap()))
            .abs();
            assert!(gap < last_gap);
            last_gap = gap;
        }
    }

    #[test]
    fn one_vol_quotes_are_rejected_by_build() {
        let quote = TenorQuote { bf_kind: BfKind::OneVol, ..usdchf_quote() };
        assert!(build_smile(&quote, &usdchf_snapshot(), &included_conventions()).is_err());
    }

    #[test]
    fn negative_pillar_vol_is_rejected() {
        let quote = TenorQuote { sigma_rr25: 0.40, sigma_bf25: 0.0, ..usdchf_quote() };
        assert!(quote.validate().is_err());
    }
}
