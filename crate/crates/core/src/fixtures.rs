//! Shared market data for unit tests.

use chrono::NaiveDate;

use crate::market::{AtmStyle, Conventions, DeltaStyle, MarketSnapshot, PremiumStyle};
use crate::smile::{build_smile, BfKind, SmileCurve, TenorQuote};

pub(crate) fn usdchf_snapshot() -> MarketSnapshot {
    MarketSnapshot {
        valuation_date: NaiveDate::from_ymd_opt(2006, 7, 1).unwrap(),
        spot: 1.0902,
        r_d: 0.0130,
        r_f: 0.0203,
    }
}

pub(crate) fn included_conventions() -> Conventions {
    Conventions {
        delta_style: DeltaStyle::Spot,
        premium_style: PremiumStyle::Included,
        atm_style: AtmStyle::DeltaNeutralIncluded,
    }
}

pub(crate) fn usdchf_quote() -> TenorQuote {
    TenorQuote {
        tau: 1.0,
        sigma_atm: 0.1685,
        sigma_rr25: -0.0130,
        sigma_bf25: 0.0110,
        bf_kind: BfKind::TwoVol,
    }
}

pub(crate) fn usdchf_curve() -> SmileCurve {
    build_smile(&usdchf_quote(), &usdchf_snapshot(), &included_conventions()).unwrap()
}

/// One-year-ish EM-free test market with a wide band of reachable barriers.
pub(crate) fn band_snapshot() -> MarketSnapshot {
    MarketSnapshot {
        valuation_date: NaiveDate::from_ymd_opt(2006, 7, 1).unwrap(),
        spot: 1.3,
        r_d: 0.05,
        r_f: 0.03,
    }
}
