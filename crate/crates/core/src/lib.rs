//! FX exotic option pricing by smile-cost correction with barrier-vicinity
//! attenuation.
//!
//! The library builds a three-pillar volatility smile from ATM, risk
//! reversal and butterfly quotes, prices first-generation exotics at the ATM
//! vol, then corrects them by the hedge cost of the vega, vanna and volga
//! exposures, attenuated by how close the contract lives to its barriers.
//! Attenuation is measured either by the risk-neutral survival probability
//! or by the normalized expected first exit time of the spot from the
//! barrier band.

pub mod arbitrage;
pub mod bs;
pub mod error;
pub(crate) mod math;
pub mod instruments;
pub mod market;

pub use error::{Error, Result};
