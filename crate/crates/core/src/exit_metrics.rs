//! Barrier-vicinity measures.
//!
//! Two gauges of how close an instrument lives to its barriers, both
//! normalized to [0, 1]: the probability that no barrier is touched before
//! expiry, and the expected first exit time as a fraction of the tenor. Each
//! is averaged over the two natural measures of an FX pair (domestic and
//! foreign), the latter carrying the quanto drift adjustment sigma^2.

use serde::{Deserialize, Serialize};

use crate::bs::{barrier, double, MIN_TOTAL_STDDEV};
use crate::error::{Error, Result};
use crate::instruments::OptionSpec;
use crate::market::MarketSnapshot;
use crate::math;

/// A barrier further than this many total standard deviations from spot is
/// treated as absent.
const FAR_MULT_DEFAULT: f64 = 8.0;

/// Grid refinement beyond this change in gamma flags the solve as
/// under-resolved.
const REFINEMENT_TOL: f64 = 1e-3;

/// Which vicinity gauge attenuates the smile corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VicinityVariant {
    /// Survival probability of the barrier set.
    Surv,
    /// Normalized expected first exit time.
    Fet,
}

/// Discretization of the first-exit-time PDE.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PdeGrid {
    /// Log-spot nodes, boundaries included.
    pub nodes: usize,
    /// Time steps over the tenor.
    pub steps: usize,
    /// Half-width of the free side(s) of the domain in units of total
    /// standard deviation; doubles as the absent-barrier cutoff.
    pub far_mult: f64,
}

impl Default for PdeGrid {
    fn default() -> Self {
        PdeGrid { nodes: 400, steps: 400, far_mult: FAR_MULT_DEFAULT }
    }
}

impl PdeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 50 || self.steps < 50 {
            return Err(Error::Config(format!(
                "pde grid needs at least 50 nodes and 50 steps, got {}x{}",
                self.nodes, self.steps
            )));
        }
        if !(self.far_mult >= 3.0) {
            return Err(Error::Config(format!(
                "pde far boundary multiple {} too small, need >= 3",
                self.far_mult
            )));
        }
        Ok(())
    }
}

/// A vicinity gauge with its per-measure components.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VicinityMeasure {
    /// Mean of the two components, in [0, 1].
    pub gamma: f64,
    /// Normalized (domestic, foreign) components.
    pub components: (f64, f64),
    /// Set when grid refinement moved gamma by more than 1e-3.
    #[serde(default)]
    pub refinement_warning: bool,
}

impl VicinityMeasure {
    /// No barriers in reach.
    pub fn unit() -> Self {
        VicinityMeasure { gamma: 1.0, components: (1.0, 1.0), refinement_warning: false }
    }

    /// Spot at or beyond a barrier.
    pub fn zero() -> Self {
        VicinityMeasure { gamma: 0.0, components: (0.0, 0.0), refinement_warning: false }
    }

    fn from_components(d: f64, f: f64, warn: bool) -> Self {
        let d = d.clamp(0.0, 1.0);
        let f = f.clamp(0.0, 1.0);
        VicinityMeasure { gamma: 0.5 * (d + f), components: (d, f), refinement_warning: warn }
    }
}

/// Log drifts of spot under the domestic and foreign measures.
fn measure_drifts(sigma: f64, snap: &MarketSnapshot) -> (f64, f64) {
    let mu = snap.r_d - snap.r_f;
    (mu, mu + sigma * sigma)
}

fn touched(spec: &OptionSpec, spot: f64) -> bool {
    spec.lower_barrier.map_or(false, |l| spot <= l)
        || spec.upper_barrier.map_or(false, |h| spot >= h)
}

/// Probability that spot stays inside the barrier set until expiry,
/// averaged over the domestic and foreign measures.
pub fn survival_probability(
    spec: &OptionSpec,
    sigma_atm: f64,
    snap: &MarketSnapshot,
) -> Result<VicinityMeasure> {
    spec.validate()?;
    snap.validate()?;
    if !(sigma_atm >= 0.0) {
        return Err(Error::Domain(format!("negative volatility {sigma_atm}")));
    }
    if spec.lower_barrier.is_none() && spec.upper_barrier.is_none() {
        return Ok(VicinityMeasure::unit());
    }
    if touched(spec, snap.spot) {
        return Ok(VicinityMeasure::zero());
    }
    let (mu_d, mu_f) = measure_drifts(sigma_atm, snap);
    let surv = |mu: f64| match (spec.lower_barrier, spec.upper_barrier) {
        (Some(l), Some(h)) => {
            double::double_no_touch_probability(snap.spot, l, h, mu, sigma_atm, spec.tau)
        }
        (Some(b), None) | (None, Some(b)) => {
            barrier::no_touch_probability(snap.spot, b, mu, sigma_atm, spec.tau)
        }
        (None, None) => 1.0,
    };
    Ok(VicinityMeasure::from_components(surv(mu_d), surv(mu_f), false))
}

/// Expected first exit time as a fraction of the tenor, averaged over the
/// domestic and foreign measures.
///
/// Solves the backward equation for the expected remaining occupation time in
/// log-spot, Crank-Nicolson with a fully implicit start, and reads the value
/// at spot by cubic interpolation. Every call also solves on a once-refined
/// grid; a gamma shift beyond 1e-3 sets `refinement_warning` and the
/// requested-grid value is returned either way.
pub fn fet_solve(
    spec: &OptionSpec,
    sigma_atm: f64,
    snap: &MarketSnapshot,
    grid: &PdeGrid,
) -> Result<VicinityMeasure> {
    spec.validate()?;
    snap.validate()?;
    grid.validate()?;
    if !(sigma_atm >= 0.0) {
        return Err(Error::Domain(format!("negative volatility {sigma_atm}")));
    }
    if spec.lower_barrier.is_none() && spec.upper_barrier.is_none() {
        return Ok(VicinityMeasure::unit());
    }
    if touched(spec, snap.spot) {
        return Ok(VicinityMeasure::zero());
    }
    let tau = spec.tau;
    let (mu_d, mu_f) = measure_drifts(sigma_atm, snap);
    if sigma_atm * tau.sqrt() < MIN_TOTAL_STDDEV {
        let lam = |mu: f64| {
            deterministic_exit_time(
                snap.spot,
                spec.lower_barrier,
                spec.upper_barrier,
                mu - 0.5 * sigma_atm * sigma_atm,
                tau,
            )
        };
        return Ok(VicinityMeasure::from_components(lam(mu_d) / tau, lam(mu_f) / tau, false));
    }
    let lam = |mu: f64, nodes: usize, steps: usize| {
        fet_lambda(
            snap.spot,
            spec.lower_barrier,
            spec.upper_barrier,
            mu,
            sigma_atm,
            tau,
            nodes,
            steps,
            grid.far_mult,
        )
    };
    let lam_d = lam(mu_d, grid.nodes, grid.steps);
    let lam_f = lam(mu_f, grid.nodes, grid.steps);
    let gamma = 0.5 * (lam_d + lam_f) / tau;
    let fine_nodes = 2 * grid.nodes - 1;
    let fine_steps = 2 * grid.steps;
    let gamma_fine =
        0.5 * (lam(mu_d, fine_nodes, fine_steps) + lam(mu_f, fine_nodes, fine_steps)) / tau;
    let warn = (gamma_fine - gamma).abs() > REFINEMENT_TOL;
    Ok(VicinityMeasure::from_components(lam_d / tau, lam_f / tau, warn))
}

/// Vicinity of the spec's barrier set under the chosen gauge.
pub fn vicinity(
    spec: &OptionSpec,
    variant: VicinityVariant,
    sigma_atm: f64,
    snap: &MarketSnapshot,
    grid: &PdeGrid,
) -> Result<VicinityMeasure> {
    match variant {
        VicinityVariant::Surv => survival_probability(spec, sigma_atm, snap),
        VicinityVariant::Fet => fet_solve(spec, sigma_atm, snap, grid),
    }
}

/// First barrier crossing of the zero-noise log path, capped at the tenor.
fn deterministic_exit_time(
    spot: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    theta: f64,
    tau: f64,
) -> f64 {
    let mut exit = tau;
    if theta < 0.0 {
        if let Some(l) = lower {
            exit = exit.min((l / spot).ln() / theta);
        }
    } else if theta > 0.0 {
        if let Some(h) = upper {
            exit = exit.min((h / spot).ln() / theta);
        }
    }
    exit.max(0.0)
}

/// Expected value of min(first exit time, tau) started from `spot`.
///
/// Marches w(x, s) forward in time-to-go s from w(., 0) = tau with
/// w(barrier, s) = tau - s; a side without a barrier within `far_mult` total
/// standard deviations gets a zero-convexity boundary instead, folded into
/// the tridiagonal system by eliminating the boundary unknown.
#[allow(clippy::too_many_arguments)]
fn fet_lambda(
    spot: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    mu: f64,
    sigma: f64,
    tau: f64,
    nodes: usize,
    steps: usize,
    far_mult: f64,
) -> f64 {
    let x0 = spot.ln();
    let span = far_mult * sigma * tau.sqrt();
    let (lo, lo_dirichlet) = match lower {
        Some(l) if (spot / l).ln() <= span => (l.ln(), true),
        _ => (x0 - span, false),
    };
    let (hi, hi_dirichlet) = match upper {
        Some(h) if (h / spot).ln() <= span => (h.ln(), true),
        _ => (x0 + span, false),
    };
    let n = nodes;
    let h = (hi - lo) / (n - 1) as f64;
    let dt = tau / steps as f64;
    let theta_drift = mu - 0.5 * sigma * sigma;
    let diff = 0.5 * sigma * sigma / (h * h);
    let adv = theta_drift / (2.0 * h);
    let a = diff - adv;
    let b = -2.0 * diff;
    let c = diff + adv;

    let m = n - 2;
    let mut v = vec![tau; n];
    let mut rhs = vec![0.0; m];
    let mut sub = vec![0.0; m];
    let mut dia = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut scratch = vec![0.0; m];

    for k in 0..steps {
        let s_new = dt * (k + 1) as f64;
        let theta = if k < 4 { 1.0 } else { 0.5 };
        let w = (1.0 - theta) * dt;
        for i in 1..n - 1 {
            rhs[i - 1] = v[i] + w * (a * v[i - 1] + b * v[i] + c * v[i + 1]);
        }
        let (ia, ib, ic) = (-theta * dt * a, 1.0 - theta * dt * b, -theta * dt * c);
        sub.fill(ia);
        dia.fill(ib);
        sup.fill(ic);
        if lo_dirichlet {
            sub[0] = 0.0;
            rhs[0] -= ia * (tau - s_new);
        } else {
            dia[0] = 1.0 - theta * dt * (b + 2.0 * a);
            sup[0] = -theta * dt * (c - a);
        }
        if hi_dirichlet {
            sup[m - 1] = 0.0;
            rhs[m - 1] -= ic * (tau - s_new);
        } else {
            dia[m - 1] = 1.0 - theta * dt * (b + 2.0 * c);
            sub[m - 1] = -theta * dt * (a - c);
        }
        math::solve_tridiagonal(&sub, &dia, &sup, &mut rhs, &mut scratch);
        v[1..n - 1].copy_from_slice(&rhs);
        v[0] = if lo_dirichlet { tau - s_new } else { 2.0 * v[1] - v[2] };
        v[n - 1] = if hi_dirichlet { tau - s_new } else { 2.0 * v[n - 2] - v[n - 3] };
    }

    let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    math::lagrange_cubic(&xs, &v, x0).clamp(0.0, tau)
}
