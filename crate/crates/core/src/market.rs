//! FX market conventions: discounting, the four delta definitions, ATM
//! strike conventions and strike-from-delta inversion.
//!
//! Quote direction is Ccy2 per Ccy1 ("domestic per foreign"); rates are flat
//! continuously-compounded per currency and year fractions use ACT/365.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{bisect, inv_norm_cdf, norm_cdf, secant_polish, ternary_max};

/// Spot, rates and valuation date for one currency pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketSnapshot {
    pub valuation_date: NaiveDate,
    /// Ccy2 units per Ccy1 unit.
    pub spot: f64,
    /// Domestic (Ccy2) continuously-compounded rate.
    pub r_d: f64,
    /// Foreign (Ccy1) continuously-compounded rate.
    pub r_f: f64,
}

impl MarketSnapshot {
    pub fn validate(&self) -> Result<()> {
        if !(self.spot.is_finite() && self.spot > 0.0) {
            return Err(Error::Domain(format!("spot must be positive, got {}", self.spot)));
        }
        if !self.r_d.is_finite() || !self.r_f.is_finite() {
            return Err(Error::Domain("rates must be finite".into()));
        }
        Ok(())
    }

    /// Domestic discount factor for a year fraction.
    #[inline]
    pub fn df_d(&self, tau: f64) -> f64 {
        (-self.r_d * tau).exp()
    }

    /// Foreign discount factor for a year fraction.
    #[inline]
    pub fn df_f(&self, tau: f64) -> f64 {
        (-self.r_f * tau).exp()
    }

    /// Outright forward F = S * DF_f / DF_d.
    pub fn forward_price(&self, tau: f64) -> Result<f64> {
        if tau < 0.0 {
            return Err(Error::Domain(format!("negative tenor {tau}")));
        }
        Ok(self.spot * ((self.r_d - self.r_f) * tau).exp())
    }
}

/// Whether delta is quoted against spot or forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaStyle {
    Spot,
    Forward,
}

/// Whether the premium (paid in foreign currency) offsets the hedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiumStyle {
    Excluded,
    Included,
}

/// ATM strike convention; the delta-neutral definition depends on the
/// premium style, so the two variants are kept explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtmStyle {
    DeltaNeutralExcluded,
    DeltaNeutralIncluded,
}

/// Full quoting convention for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub delta_style: DeltaStyle,
    pub premium_style: PremiumStyle,
    pub atm_style: AtmStyle,
}

impl Conventions {
    /// The delta-neutral strike formula only straddle-balances deltas of the
    /// matching premium style, so mixed combinations are rejected.
    pub fn validate(&self) -> Result<()> {
        let ok = matches!(
            (self.premium_style, self.atm_style),
            (PremiumStyle::Excluded, AtmStyle::DeltaNeutralExcluded)
                | (PremiumStyle::Included, AtmStyle::DeltaNeutralIncluded)
        );
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "atm_style must match premium_style (delta-neutral strikes are premium-style specific)"
                    .into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionSide {
    Call,
    Put,
}

impl OptionSide {
    /// +1 for calls, -1 for puts.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            OptionSide::Call => 1.0,
            OptionSide::Put => -1.0,
        }
    }
}

/// d1 and d2 of the Black-Scholes formula, written on the forward.
#[inline]
pub(crate) fn d12(forward: f64, strike: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let st = sigma * tau.sqrt();
    let d1 = ((forward / strike).ln() + 0.5 * sigma * sigma * tau) / st;
    (d1, d1 - st)
}

fn check_delta_inputs(strike: f64, sigma: f64, tau: f64) -> Result<()> {
    if strike <= 0.0 {
        return Err(Error::Domain(format!("strike must be positive, got {strike}")));
    }
    if sigma <= 0.0 {
        return Err(Error::Domain(format!("vol must be positive, got {sigma}")));
    }
    if tau <= 0.0 {
        return Err(Error::Domain(format!("tenor must be positive, got {tau}")));
    }
    Ok(())
}

/// Convention-dependent delta as a signed fraction of the foreign notional.
///
/// Spot/excluded is the plain Black-Scholes hedge ratio; the premium-included
/// versions subtract the foreign-currency premium from the hedge, which turns
/// the N(d1) factor into (K/F)N(d2). Forward styles drop the DF_f factor.
pub fn delta(
    side: OptionSide,
    strike: f64,
    sigma: f64,
    tau: f64,
    snap: &MarketSnapshot,
    conv: &Conventions,
) -> Result<f64> {
    check_delta_inputs(strike, sigma, tau)?;
    snap.validate()?;
    let f = snap.forward_price(tau)?;
    let (d1, d2) = d12(f, strike, sigma, tau);
    let phi = side.sign();
    let raw = match conv.premium_style {
        PremiumStyle::Excluded => phi * norm_cdf(phi * d1),
        PremiumStyle::Included => phi * (strike / f) * norm_cdf(phi * d2),
    };
    Ok(match conv.delta_style {
        DeltaStyle::Forward => raw,
        DeltaStyle::Spot => snap.df_f(tau) * raw,
    })
}

/// Delta-neutral ATM strike: F*exp(+sigma^2 tau/2) when the premium is
/// excluded, F*exp(-sigma^2 tau/2) when included.
pub fn atm_strike(forward: f64, sigma_atm: f64, tau: f64, conv: &Conventions) -> Result<f64> {
    if forward <= 0.0 {
        return Err(Error::Domain(format!("forward must be positive, got {forward}")));
    }
    if sigma_atm < 0.0 || tau < 0.0 {
        return Err(Error::Domain("vol and tenor must be non-negative".into()));
    }
    let half_var = 0.5 * sigma_atm * sigma_atm * tau;
    Ok(match conv.atm_style {
        AtmStyle::DeltaNeutralExcluded => forward * half_var.exp(),
        AtmStyle::DeltaNeutralIncluded => forward * (-half_var).exp(),
    })
}

/// Solve the strike that produces a target delta under the given convention.
///
/// Excluded styles invert N(d1) in closed form. Premium-included deltas need
/// a search: puts are monotone in strike; calls are hump-shaped, so the peak
/// is located first and the root is taken on the decreasing out-of-the-money
/// branch (K above the forward), which is where pillar strikes live.
pub fn strike_from_delta(
    target_delta: f64,
    side: OptionSide,
    sigma: f64,
    snap: &MarketSnapshot,
    tau: f64,
    conv: &Conventions,
) -> Result<f64> {
    check_delta_inputs(1.0, sigma, tau)?;
    snap.validate()?;
    let f = snap.forward_price(tau)?;
    let df_f = snap.df_f(tau);
    let unit = match conv.delta_style {
        DeltaStyle::Spot => df_f,
        DeltaStyle::Forward => 1.0,
    };
    if target_delta * side.sign() <= 0.0 || target_delta.abs() >= unit {
        return Err(Error::Domain(format!(
            "target delta {target_delta} unreachable for this side/convention"
        )));
    }

    let st = sigma * tau.sqrt();
    if conv.premium_style == PremiumStyle::Excluded {
        let d1 = match side {
            OptionSide::Call => inv_norm_cdf(target_delta / unit)?,
            OptionSide::Put => -inv_norm_cdf(-target_delta / unit)?,
        };
        return Ok(f * (-d1 * st + 0.5 * sigma * sigma * tau).exp());
    }

    // Premium-included: bracketed search in log-strike.
    let lo = f * (-8.0 * st).exp();
    let hi = f * (8.0 * st).exp();
    let dd = |k: f64| delta(side, k, sigma, tau, snap, conv).unwrap_or(f64::NAN);
    let (mut lo_b, hi_b) = (lo, hi);
    if side == OptionSide::Call {
        // Included call delta rises then falls; root taken on the OTM branch.
        let k_peak = ternary_max(dd, lo, hi, 200);
        if dd(k_peak) < target_delta {
            return Err(Error::NoSolution(format!(
                "included call delta peaks below target {target_delta}"
            )));
        }
        lo_b = k_peak;
    }
    let g = |k: f64| dd(k) - target_delta;
    // Included deltas fall with strike for calls past the peak and puts are
    // increasing in magnitude, so g is monotone on the bracket either way.
    let root = bisect(g, lo_b, hi_b, 1e-12, 200)?;
    let polished = secant_polish(g, root, root * 1e-7, 8);
    Ok(polished)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn snap(spot: f64, r_d: f64, r_f: f64) -> MarketSnapshot {
        MarketSnapshot {
            valuation_date: NaiveDate::from_ymd_opt(2006, 7, 1).unwrap(),
            spot,
            r_d,
            r_f,
        }
    }

    fn conv(ds: DeltaStyle, ps: PremiumStyle) -> Conventions {
        let atm = match ps {
            PremiumStyle::Excluded => AtmStyle::DeltaNeutralExcluded,
            PremiumStyle::Included => AtmStyle::DeltaNeutralIncluded,
        };
        Conventions { delta_style: ds, premium_style: ps, atm_style: atm }
    }

    #[test]
    fn forward_with_equal_rates_is_spot() {
        let s = snap(1.25, 0.02, 0.02);
        assert_abs_diff_eq!(s.forward_price(1.7).unwrap(), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(s.forward_price(0.0).unwrap(), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn forward_reference_value() {
        // S=1.0902, r_d=1.3%, r_f=2.03%, tau=1 -> 1.0902*exp(-0.0073)
        let s = snap(1.0902, 0.013, 0.0203);
        assert_abs_diff_eq!(s.forward_price(1.0).unwrap(), 1.082270517823422, epsilon = 1e-12);
    }

    #[test]
    fn forward_rejects_negative_tenor() {
        assert!(snap(1.0, 0.01, 0.02).forward_price(-0.5).is_err());
    }

    #[test]
    fn deep_itm_excluded_call_delta_tends_to_df_f() {
        let s = snap(1.3, 0.03, 0.01);
        let c = conv(DeltaStyle::Spot, PremiumStyle::Excluded);
        let d = delta(OptionSide::Call, 1e-4, 0.2, 1.0, &s, &c).unwrap();
        assert_abs_diff_eq!(d, s.df_f(1.0), epsilon = 1e-12);
    }

    #[test]
    fn premium_link_ties_the_two_spot_deltas() {
        // S*(delta_excl - delta_incl) equals the premium for both sides.
        let s = snap(1.0902, 0.013, 0.0203);
        let ce = conv(DeltaStyle::Spot, PremiumStyle::Excluded);
        let ci = conv(DeltaStyle::Spot, PremiumStyle::Included);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let k = s.spot * rng.gen_range(0.6..1.6);
            let sigma = rng.gen_range(0.05..0.4);
            let tau = rng.gen_range(0.1..2.0);
            for side in [OptionSide::Call, OptionSide::Put] {
                let de = delta(side, k, sigma, tau, &s, &ce).unwrap();
                let di = delta(side, k, sigma, tau, &s, &ci).unwrap();
                let prem = bs::vanilla_price(side, k, sigma, tau, &s);
                assert_abs_diff_eq!(s.spot * (de - di), prem, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn forward_delta_is_spot_delta_scaled_by_df_f() {
        let s = snap(95.47, 0.0174, 0.0374);
        for ps in [PremiumStyle::Excluded, PremiumStyle::Included] {
            let cs = conv(DeltaStyle::Spot, ps);
            let cf = conv(DeltaStyle::Forward, ps);
            let ds = delta(OptionSide::Put, 90.0, 0.15, 1.0, &s, &cs).unwrap();
            let df = delta(OptionSide::Put, 90.0, 0.15, 1.0, &s, &cf).unwrap();
            assert_abs_diff_eq!(ds, s.df_f(1.0) * df, epsilon = 1e-14);
        }
    }

    #[test]
    fn atm_strike_is_straddle_delta_neutral() {
        let s = snap(1.0902, 0.013, 0.0203);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let sigma = rng.gen_range(0.05..0.4);
            let tau = rng.gen_range(0.1..2.0);
            for ps in [PremiumStyle::Excluded, PremiumStyle::Included] {
                for ds in [DeltaStyle::Spot, DeltaStyle::Forward] {
                    let c = conv(ds, ps);
                    let f = s.forward_price(tau).unwrap();
                    let k = atm_strike(f, sigma, tau, &c).unwrap();
                    let dc = delta(OptionSide::Call, k, sigma, tau, &s, &c).unwrap();
                    let dp = delta(OptionSide::Put, k, sigma, tau, &s, &c).unwrap();
                    assert_abs_diff_eq!(dc + dp, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn atm_strike_sits_on_the_expected_side_of_forward() {
        let c_ex = conv(DeltaStyle::Spot, PremiumStyle::Excluded);
        let c_in = conv(DeltaStyle::Spot, PremiumStyle::Included);
        let f = 1.1;
        assert!(atm_strike(f, 0.2, 1.0, &c_ex).unwrap() > f);
        assert!(atm_strike(f, 0.2, 1.0, &c_in).unwrap() < f);
        assert_abs_diff_eq!(atm_strike(f, 0.0, 1.0, &c_ex).unwrap(), f, epsilon = 1e-15);
    }

    #[test]
    fn strike_from_delta_round_trips_all_conventions() {
        let s = snap(1.0902, 0.013, 0.0203);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let sigma = rng.gen_range(0.08..0.35);
            let tau = rng.gen_range(0.2..1.8);
            for ps in [PremiumStyle::Excluded, PremiumStyle::Included] {
                for ds in [DeltaStyle::Spot, DeltaStyle::Forward] {
                    let c = conv(ds, ps);
                    for (side, tgt) in [(OptionSide::Call, 0.25), (OptionSide::Put, -0.25)] {
                        let k = strike_from_delta(tgt, side, sigma, &s, tau, &c).unwrap();
                        let d = delta(side, k, sigma, tau, &s, &c).unwrap();
                        assert_abs_diff_eq!(d, tgt, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn excluded_closed_form_matches_definition_of_atm() {
        // Target DF_f/2 for a call forces d1 = 0, i.e. the excluded ATM strike.
        let s = snap(1.3, 0.02, 0.04);
        let c = conv(DeltaStyle::Spot, PremiumStyle::Excluded);
        let (sigma, tau) = (0.22, 0.9);
        let k = strike_from_delta(0.5 * s.df_f(tau), OptionSide::Call, sigma, &s, tau, &c).unwrap();
        let f = s.forward_price(tau).unwrap();
        assert_abs_diff_eq!(k, f * (0.5 * sigma * sigma * tau).exp(), epsilon = 1e-10);
    }

    #[test]
    fn included_call_otm_root_is_above_forward() {
        let s = snap(95.47, 0.0174, 0.0374);
        let c = conv(DeltaStyle::Spot, PremiumStyle::Included);
        let k = strike_from_delta(0.25, OptionSide::Call, 0.1485, &s, 1.0, &c).unwrap();
        assert!(k > s.forward_price(1.0).unwrap());
    }

    #[test]
    fn unreachable_deltas_error_out() {
        let s = snap(1.0, 0.01, 0.02);
        let c = conv(DeltaStyle::Spot, PremiumStyle::Excluded);
        assert!(strike_from_delta(0.99, OptionSide::Call, 0.2, &s, 1.0, &c).is_err());
        assert!(strike_from_delta(-0.25, OptionSide::Call, 0.2, &s, 1.0, &c).is_err());
    }

    #[test]
    fn mixed_convention_pairs_are_rejected() {
        let bad = Conventions {
            delta_style: DeltaStyle::Spot,
            premium_style: PremiumStyle::Excluded,
            atm_style: AtmStyle::DeltaNeutralIncluded,
        };
        assert!(bad.validate().is_err());
    }
}
