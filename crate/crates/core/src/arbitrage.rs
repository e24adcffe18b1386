//! Replication decompositions (knock-in = vanilla minus knock-out, one-touch
//! = cash minus no-touch) and the no-arbitrage clamps applied to corrected
//! barrier prices.

use serde::{Deserialize, Serialize};

use crate::instruments::{BarrierSide, OptionKind, OptionSpec};

/// Identifier of one clamp rule, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampRule {
    FloorZero,
    KoLeVanilla,
    DkoLeKo1,
    DkoLeKo2,
    WkoBounds,
}

/// Outcome of clamping one constituent price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampReport {
    pub original: f64,
    pub clamped: f64,
    /// Rules that actually changed the price, in application order; empty
    /// iff the input already satisfied every bound.
    pub applied_rules: Vec<ClampRule>,
}

impl ClampReport {
    pub fn untouched(&self) -> bool {
        self.applied_rules.is_empty()
    }
}

fn vanilla_of(spec: &OptionSpec) -> OptionSpec {
    let side = spec.side().expect("strike-bearing kind");
    let mut v = OptionSpec::vanilla(side, spec.strike.expect("strike"), spec.tau);
    v.notional = spec.notional;
    v
}

fn single_ko_of(spec: &OptionSpec, barrier_side: BarrierSide) -> OptionSpec {
    let side = spec.side().expect("strike-bearing kind");
    let level = match barrier_side {
        BarrierSide::Lower => spec.lower_barrier.expect("lower barrier"),
        BarrierSide::Upper => spec.upper_barrier.expect("upper barrier"),
    };
    let mut ko = OptionSpec::knock_out(side, spec.strike.expect("strike"), barrier_side, level, spec.tau);
    ko.notional = spec.notional;
    ko
}

fn dko_of(spec: &OptionSpec) -> OptionSpec {
    let side = spec.side().expect("strike-bearing kind");
    let mut dko = OptionSpec::double_knock_out(
        side,
        spec.strike.expect("strike"),
        spec.lower_barrier.expect("lower barrier"),
        spec.upper_barrier.expect("upper barrier"),
        spec.tau,
    );
    dko.notional = spec.notional;
    dko
}

/// Express a contract as signed constituents that the pricers handle
/// natively. Knock-outs, no-touches, vanillas and cash pass through as
/// themselves; everything else is a two-leg replication:
///
/// - knock-in = vanilla - knock-out (same barrier)
/// - double knock-in = vanilla - double knock-out
/// - knock-in-knock-out = knock-out at the KO barrier - double knock-out
///   (pays when the KI barrier has traded and the KO barrier has not)
/// - one-touch = cash - no-touch, double one-touch = cash - double no-touch
pub fn decompose(spec: &OptionSpec) -> Vec<(f64, OptionSpec)> {
    use OptionKind::*;
    match spec.kind {
        VanillaCall | VanillaPut | UpOutCall | DownOutCall | UpOutPut | DownOutPut | DkoCall
        | DkoPut | NoTouch | DoubleNoTouch | Cash => vec![(1.0, *spec)],
        UpInCall | UpInPut => {
            vec![(1.0, vanilla_of(spec)), (-1.0, single_ko_of(spec, BarrierSide::Upper))]
        }
        DownInCall | DownInPut => {
            vec![(1.0, vanilla_of(spec)), (-1.0, single_ko_of(spec, BarrierSide::Lower))]
        }
        DkiCall | DkiPut => vec![(1.0, vanilla_of(spec)), (-1.0, dko_of(spec))],
        KikoCall | KikoPut => {
            let ko_side = match spec.ki_side.expect("validated kiko") {
                BarrierSide::Lower => BarrierSide::Upper,
                BarrierSide::Upper => BarrierSide::Lower,
            };
            vec![(1.0, single_ko_of(spec, ko_side)), (-1.0, dko_of(spec))]
        }
        OneTouch | DoubleOneTouch => {
            let mut cash = OptionSpec::cash(spec.tau);
            cash.notional = spec.notional;
            let mut nt = *spec;
            nt.kind = if spec.kind == OneTouch { NoTouch } else { DoubleNoTouch };
            vec![(1.0, cash), (-1.0, nt)]
        }
    }
}

/// The vanilla payoff side of each decomposition leg, for reassembly checks.
pub fn recombine(parts: &[(f64, f64)]) -> f64 {
    parts.iter().map(|(sign, price)| sign * price).sum()
}

/// Clamp one constituent price against its references, in the fixed order
/// floor at zero, cap at the vanilla reference, cap at each single-KO
/// reference. References must already be clamped themselves (nonnegative,
/// mutually consistent); then no later rule can undo an earlier one.
///
/// The same rule set covers touch products: a no-touch is the knock-out of
/// the discounted cash amount, so its `vanilla_ref` is DF_d and a double
/// no-touch takes the two single no-touches as `single_ko_refs`.
pub fn clamp(price: f64, vanilla_ref: Option<f64>, single_ko_refs: &[f64]) -> ClampReport {
    let original = price;
    let mut p = price;
    let mut applied = Vec::new();
    if p < 0.0 {
        p = 0.0;
        applied.push(ClampRule::FloorZero);
    }
    if let Some(v) = vanilla_ref {
        if p > v {
            p = v;
            applied.push(ClampRule::KoLeVanilla);
        }
    }
    for (i, &ko) in single_ko_refs.iter().take(2).enumerate() {
        if p > ko {
            p = ko;
            applied.push(if i == 0 { ClampRule::DkoLeKo1 } else { ClampRule::DkoLeKo2 });
        }
    }
    ClampReport { original, clamped: p, applied_rules: applied }
}

/// Bounds for an externally priced window knock-out: at least the full-tenor
/// knock-out, at most the vanilla. Callable on its own because window
/// contracts are not priced here.
pub fn clamp_window(price: f64, vanilla_ref: f64, full_ko_ref: f64) -> ClampReport {
    let original = price;
    let mut p = price.max(0.0);
    if p < full_ko_ref {
        p = full_ko_ref;
    }
    if p > vanilla_ref {
        p = vanilla_ref;
    }
    let applied = if p == price { Vec::new() } else { vec![ClampRule::WkoBounds] };
    ClampReport { original, clamped: p, applied_rules: applied }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::{BarrierSide, OptionKind, OptionSpec};
    use crate::market::OptionSide;

    #[test]
    fn pass_through_kinds_decompose_to_themselves() {
        let specs = [
            OptionSpec::vanilla(OptionSide::Put, 1.2, 1.0),
            OptionSpec::knock_out(OptionSide::Call, 1.25, BarrierSide::Upper, 1.5, 1.0),
            OptionSpec::double_knock_out(OptionSide::Call, 1.3, 1.1, 1.55, 1.0),
            OptionSpec::touch(OptionKind::NoTouch, BarrierSide::Lower, 1.15, 1.0).unwrap(),
            OptionSpec::cash(0.5),
        ];
        for spec in specs {
            let parts = decompose(&spec);
            assert_eq!(parts.len(), 1);
            assert_eq!(parts[0].0, 1.0);
            assert_eq!(parts[0].1, spec);
        }
    }

    #[test]
    fn knock_in_splits_into_vanilla_minus_knock_out() {
        let ki = OptionSpec::knock_in(OptionSide::Call, 1.25, BarrierSide::Upper, 1.5, 1.0);
        let parts = decompose(&ki);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1.kind, OptionKind::VanillaCall);
        assert_eq!(parts[0].0, 1.0);
        assert_eq!(parts[1].1.kind, OptionKind::UpOutCall);
        assert_eq!(parts[1].0, -1.0);
        assert_eq!(parts[1].1.upper_barrier, Some(1.5));
    }

    #[test]
    fn one_touch_splits_into_cash_minus_no_touch() {
        let ot = OptionSpec::touch(OptionKind::OneTouch, BarrierSide::Upper, 1.5, 1.0).unwrap();
        let parts = decompose(&ot);
        assert_eq!(parts[0].1.kind, OptionKind::Cash);
        assert_eq!(parts[1].0, -1.0);
        assert_eq!(parts[1].1.kind, OptionKind::NoTouch);
        assert_eq!(parts[1].1.upper_barrier, Some(1.5));
    }

    #[test]
    fn kiko_single_leg_sits_at_the_knock_out_barrier() {
        let kiko = OptionSpec::kiko(OptionSide::Put, 1.3, 1.1, 1.55, BarrierSide::Lower, 1.0);
        let parts = decompose(&kiko);
        assert_eq!(parts[0].1.kind, OptionKind::UpOutPut);
        assert_eq!(parts[0].1.upper_barrier, Some(1.55));
        assert_eq!(parts[1].1.kind, OptionKind::DkoPut);

        let kiko_up = OptionSpec::kiko(OptionSide::Put, 1.3, 1.1, 1.55, BarrierSide::Upper, 1.0);
        let parts_up = decompose(&kiko_up);
        assert_eq!(parts_up[0].1.kind, OptionKind::DownOutPut);
        assert_eq!(parts_up[0].1.lower_barrier, Some(1.1));
    }

    #[test]
    fn decompositions_preserve_notional_and_tenor() {
        let mut dki = OptionSpec::double_knock_in(OptionSide::Call, 1.3, 1.1, 1.55, 0.75);
        dki.notional = 2.5e6;
        for (_, part) in decompose(&dki) {
            assert_eq!(part.tau, 0.75);
            assert_eq!(part.notional, 2.5e6);
        }
    }

    #[test]
    fn clamp_applies_rules_in_order() {
        let r = clamp(-0.001, Some(0.05), &[]);
        assert_eq!(r.clamped, 0.0);
        assert_eq!(r.applied_rules, vec![ClampRule::FloorZero]);

        let r = clamp(0.051, Some(0.05), &[]);
        assert_eq!(r.clamped, 0.05);
        assert_eq!(r.applied_rules, vec![ClampRule::KoLeVanilla]);

        let r = clamp(0.04, Some(0.05), &[0.03, 0.035]);
        assert_eq!(r.clamped, 0.03);
        assert_eq!(r.applied_rules, vec![ClampRule::DkoLeKo1]);

        let r = clamp(0.02, Some(0.05), &[0.03, 0.035]);
        assert!(r.untouched());
        assert_eq!(r.clamped, 0.02);
    }

    #[test]
    fn clamp_is_idempotent() {
        for (price, van, kos) in [
            (-0.3, Some(0.1), vec![0.08, 0.02]),
            (0.5, Some(0.1), vec![0.08, 0.02]),
            (0.05, None, vec![]),
            (0.09, Some(0.1), vec![0.08]),
        ] {
            let once = clamp(price, van, &kos);
            let twice = clamp(once.clamped, van, &kos);
            assert_eq!(twice.clamped, once.clamped);
            assert!(twice.untouched());
        }
    }

    #[test]
    fn window_bounds_pin_between_full_ko_and_vanilla() {
        let r = clamp_window(0.01, 0.10, 0.04);
        assert_eq!(r.clamped, 0.04);
        assert_eq!(r.applied_rules, vec![ClampRule::WkoBounds]);

        let r = clamp_window(0.12, 0.10, 0.04);
        assert_eq!(r.clamped, 0.10);
        assert_eq!(r.applied_rules, vec![ClampRule::WkoBounds]);

        let r = clamp_window(0.07, 0.10, 0.04);
        assert!(r.untouched());
    }
}
