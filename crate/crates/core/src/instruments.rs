//! Instrument taxonomy: vanillas, single- and double-barrier options,
//! knock-in/knock-out combinations and touch products.
//!
//! Barriers are continuously monitored. Touch payoffs are one unit of
//! domestic currency; everything is priced per unit of foreign notional
//! (touches per unit domestic payout) and scaled by `notional` at the edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::OptionSide;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionKind {
    VanillaCall,
    VanillaPut,
    UpOutCall,
    DownOutCall,
    UpOutPut,
    DownOutPut,
    UpInCall,
    DownInCall,
    UpInPut,
    DownInPut,
    DkoCall,
    DkoPut,
    DkiCall,
    DkiPut,
    KikoCall,
    KikoPut,
    OneTouch,
    NoTouch,
    DoubleOneTouch,
    DoubleNoTouch,
    Cash,
}

/// Which side of spot a single barrier sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierSide {
    Lower,
    Upper,
}

/// One priceable contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub kind: OptionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_barrier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_barrier: Option<f64>,
    /// For knock-in-knock-out contracts: which barrier is the knock-in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ki_side: Option<BarrierSide>,
    /// Year fraction to expiry.
    pub tau: f64,
    /// Foreign notional (domestic payout for touch products). Prices are
    /// reported per unit; this field only scales cash amounts at the edge.
    #[serde(default = "default_notional")]
    pub notional: f64,
}

fn default_notional() -> f64 {
    1.0
}

impl OptionKind {
    /// Option side of the payoff at expiry, if there is one.
    pub fn side(self) -> Option<OptionSide> {
        use OptionKind::*;
        match self {
            VanillaCall | UpOutCall | DownOutCall | UpInCall | DownInCall | DkoCall | DkiCall
            | KikoCall => Some(OptionSide::Call),
            VanillaPut | UpOutPut | DownOutPut | UpInPut | DownInPut | DkoPut | DkiPut
            | KikoPut => Some(OptionSide::Put),
            OneTouch | NoTouch | DoubleOneTouch | DoubleNoTouch | Cash => None,
        }
    }

    /// True for kinds whose payoff involves a strike.
    pub fn has_strike(self) -> bool {
        self.side().is_some()
    }

    /// Touch products: payoff is a fixed domestic cash amount.
    pub fn is_touch(self) -> bool {
        matches!(
            self,
            OptionKind::OneTouch
                | OptionKind::NoTouch
                | OptionKind::DoubleOneTouch
                | OptionKind::DoubleNoTouch
        )
    }

    /// Kinds with no strike at all (touches and the cash leg).
    pub fn is_strikeless(self) -> bool {
        !self.has_strike()
    }

    /// Number of barriers the contract must carry: (lower, upper) as
    /// (required, required) flags, with `None` meaning "exactly one of the
    /// two" (single-barrier touches can sit on either side).
    fn barrier_shape(self) -> BarrierShape {
        use OptionKind::*;
        match self {
            VanillaCall | VanillaPut | Cash => BarrierShape::None,
            DownOutCall | DownOutPut | DownInCall | DownInPut => BarrierShape::LowerOnly,
            UpOutCall | UpOutPut | UpInCall | UpInPut => BarrierShape::UpperOnly,
            OneTouch | NoTouch => BarrierShape::EitherOne,
            DkoCall | DkoPut | DkiCall | DkiPut | KikoCall | KikoPut | DoubleOneTouch
            | DoubleNoTouch => BarrierShape::Both,
        }
    }
}

enum BarrierShape {
    None,
    LowerOnly,
    UpperOnly,
    EitherOne,
    Both,
}

impl OptionSpec {
    /// Vanilla contract.
    pub fn vanilla(side: OptionSide, strike: f64, tau: f64) -> Self {
        OptionSpec {
            kind: match side {
                OptionSide::Call => OptionKind::VanillaCall,
                OptionSide::Put => OptionKind::VanillaPut,
            },
            strike: Some(strike),
            lower_barrier: None,
            upper_barrier: None,
            ki_side: None,
            tau,
            notional: 1.0,
        }
    }

    /// Single-barrier knock-out.
    pub fn knock_out(side: OptionSide, strike: f64, barrier_side: BarrierSide, barrier: f64, tau: f64) -> Self {
        let kind = match (side, barrier_side) {
            (OptionSide::Call, BarrierSide::Upper) => OptionKind::UpOutCall,
            (OptionSide::Call, BarrierSide::Lower) => OptionKind::DownOutCall,
            (OptionSide::Put, BarrierSide::Upper) => OptionKind::UpOutPut,
            (OptionSide::Put, BarrierSide::Lower) => OptionKind::DownOutPut,
        };
        let (lo, up) = match barrier_side {
            BarrierSide::Lower => (Some(barrier), None),
            BarrierSide::Upper => (None, Some(barrier)),
        };
        OptionSpec {
            kind,
            strike: Some(strike),
            lower_barrier: lo,
            upper_barrier: up,
            ki_side: None,
            tau,
            notional: 1.0,
        }
    }

    /// Single-barrier knock-in.
    pub fn knock_in(side: OptionSide, strike: f64, barrier_side: BarrierSide, barrier: f64, tau: f64) -> Self {
        let kind = match (side, barrier_side) {
            (OptionSide::Call, BarrierSide::Upper) => OptionKind::UpInCall,
            (OptionSide::Call, BarrierSide::Lower) => OptionKind::DownInCall,
            (OptionSide::Put, BarrierSide::Upper) => OptionKind::UpInPut,
            (OptionSide::Put, BarrierSide::Lower) => OptionKind::DownInPut,
        };
        let mut spec = OptionSpec::knock_out(side, strike, barrier_side, barrier, tau);
        spec.kind = kind;
        spec
    }

    /// Double knock-out.
    pub fn double_knock_out(side: OptionSide, strike: f64, lower: f64, upper: f64, tau: f64) -> Self {
        OptionSpec {
            kind: match side {
                OptionSide::Call => OptionKind::DkoCall,
                OptionSide::Put => OptionKind::DkoPut,
            },
            strike: Some(strike),
            lower_barrier: Some(lower),
            upper_barrier: Some(upper),
            ki_side: None,
            tau,
            notional: 1.0,
        }
    }

    /// Double knock-in.
    pub fn double_knock_in(side: OptionSide, strike: f64, lower: f64, upper: f64, tau: f64) -> Self {
        let mut spec = OptionSpec::double_knock_out(side, strike, lower, upper, tau);
        spec.kind = match side {
            OptionSide::Call => OptionKind::DkiCall,
            OptionSide::Put => OptionKind::DkiPut,
        };
        spec
    }

    /// Knock-in-knock-out: knocks in at one barrier, dead if the other
    /// (knock-out) barrier trades first.
    pub fn kiko(side: OptionSide, strike: f64, lower: f64, upper: f64, ki_side: BarrierSide, tau: f64) -> Self {
        OptionSpec {
            kind: match side {
                OptionSide::Call => OptionKind::KikoCall,
                OptionSide::Put => OptionKind::KikoPut,
            },
            strike: Some(strike),
            lower_barrier: Some(lower),
            upper_barrier: Some(upper),
            ki_side: Some(ki_side),
            tau,
            notional: 1.0,
        }
    }

    /// Single-barrier touch contract (pays one domestic unit).
    pub fn touch(kind: OptionKind, barrier_side: BarrierSide, barrier: f64, tau: f64) -> Result<Self> {
        if !matches!(kind, OptionKind::OneTouch | OptionKind::NoTouch) {
            return Err(Error::Config(format!("{kind:?} is not a single-barrier touch")));
        }
        let (lo, up) = match barrier_side {
            BarrierSide::Lower => (Some(barrier), None),
            BarrierSide::Upper => (None, Some(barrier)),
        };
        Ok(OptionSpec {
            kind,
            strike: None,
            lower_barrier: lo,
            upper_barrier: up,
            ki_side: None,
            tau,
            notional: 1.0,
        })
    }

    /// Double-barrier touch contract.
    pub fn double_touch(kind: OptionKind, lower: f64, upper: f64, tau: f64) -> Result<Self> {
        if !matches!(kind, OptionKind::DoubleOneTouch | OptionKind::DoubleNoTouch) {
            return Err(Error::Config(format!("{kind:?} is not a double touch")));
        }
        Ok(OptionSpec {
            kind,
            strike: None,
            lower_barrier: Some(lower),
            upper_barrier: Some(upper),
            ki_side: None,
            tau,
            notional: 1.0,
        })
    }

    /// Unit domestic cash at expiry.
    pub fn cash(tau: f64) -> Self {
        OptionSpec {
            kind: OptionKind::Cash,
            strike: None,
            lower_barrier: None,
            upper_barrier: None,
            ki_side: None,
            tau,
            notional: 1.0,
        }
    }

    pub fn has_strike(&self) -> bool {
        self.kind.has_strike()
    }

    pub fn is_touch(&self) -> bool {
        self.kind.is_touch()
    }

    pub fn is_strikeless(&self) -> bool {
        self.kind.is_strikeless()
    }

    /// (lower, upper) barrier levels actually present on the contract.
    pub fn barrier_levels(&self) -> (Option<f64>, Option<f64>) {
        (self.lower_barrier, self.upper_barrier)
    }

    /// Payoff side, if the contract has a strike.
    pub fn side(&self) -> Option<OptionSide> {
        self.kind.side()
    }

    /// Structural validation. Barrier placement relative to spot is not a
    /// validity question: a barrier at or through spot means the trigger
    /// event has already happened and the pricers treat it as such.
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Domain(format!("tenor must be positive, got {}", self.tau)));
        }
        if !(self.notional.is_finite() && self.notional > 0.0) {
            return Err(Error::Domain(format!("notional must be positive, got {}", self.notional)));
        }
        match (self.kind.has_strike(), self.strike) {
            (true, None) => {
                return Err(Error::Config(format!("{:?} requires a strike", self.kind)));
            }
            (false, Some(_)) => {
                return Err(Error::Config(format!("{:?} takes no strike", self.kind)));
            }
            (true, Some(k)) if !(k.is_finite() && k > 0.0) => {
                return Err(Error::Domain(format!("strike must be positive, got {k}")));
            }
            _ => {}
        }
        for (name, level) in [("lower", self.lower_barrier), ("upper", self.upper_barrier)] {
            if let Some(b) = level {
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::Domain(format!("{name} barrier must be positive, got {b}")));
                }
            }
        }
        match self.kind.barrier_shape() {
            BarrierShape::None => {
                if self.lower_barrier.is_some() || self.upper_barrier.is_some() {
                    return Err(Error::Config(format!("{:?} takes no barriers", self.kind)));
                }
            }
            BarrierShape::LowerOnly => {
                if self.lower_barrier.is_none() || self.upper_barrier.is_some() {
                    return Err(Error::Config(format!("{:?} requires exactly a lower barrier", self.kind)));
                }
            }
            BarrierShape::UpperOnly => {
                if self.upper_barrier.is_none() || self.lower_barrier.is_some() {
                    return Err(Error::Config(format!("{:?} requires exactly an upper barrier", self.kind)));
                }
            }
            BarrierShape::EitherOne => {
                if self.lower_barrier.is_some() == self.upper_barrier.is_some() {
                    return Err(Error::Config(format!("{:?} requires exactly one barrier", self.kind)));
                }
            }
            BarrierShape::Both => {
                let (Some(lo), Some(up)) = (self.lower_barrier, self.upper_barrier) else {
                    return Err(Error::Config(format!("{:?} requires both barriers", self.kind)));
                };
                if lo >= up {
                    return Err(Error::Domain(format!(
                        "lower barrier {lo} must sit below upper barrier {up}"
                    )));
                }
            }
        }
        match (matches!(self.kind, OptionKind::KikoCall | OptionKind::KikoPut), self.ki_side) {
            (true, None) => {
                return Err(Error::Config("knock-in-knock-out requires ki_side".into()));
            }
            (false, Some(_)) => {
                return Err(Error::Config(format!("{:?} takes no ki_side", self.kind)));
            }
            _ => {}
        }
        Ok(())
    }
}
