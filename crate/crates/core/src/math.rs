//! Numerical building blocks: normal distribution, root solvers,
//! interpolation and a tridiagonal solve.

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF.
///
/// Hart's rational approximation below |x| = sqrt(50), a continued fraction
/// for the Mills ratio beyond. Absolute error is at machine precision across
/// the whole line; tail relative error stays below 5e-14 out to |x| = 16.
pub fn norm_cdf(x: f64) -> f64 {
    let z = x.abs();
    let tail = if z > 37.0 {
        0.0
    } else {
        let e = (-0.5 * z * z).exp();
        if z < 7.071_067_811_865_47 {
            let mut num = 3.526_249_659_989_11e-2 * z + 0.700_383_064_443_688;
            num = num * z + 6.373_962_203_531_65;
            num = num * z + 33.912_866_078_383;
            num = num * z + 112.079_291_497_871;
            num = num * z + 221.213_596_169_931;
            num = num * z + 220.206_867_912_376;
            let mut den = 8.838_834_764_831_84e-2 * z + 1.755_667_163_182_64;
            den = den * z + 16.064_177_579_207;
            den = den * z + 86.780_732_202_946_1;
            den = den * z + 296.564_248_779_674;
            den = den * z + 637.333_633_378_831;
            den = den * z + 793.826_512_519_948;
            den = den * z + 440.413_735_824_752;
            e * num / den
        } else {
            let mut b = z;
            for k in (1..=15).rev() {
                b = z + f64::from(k) / b;
            }
            e / (b * SQRT_2PI)
        }
    };
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Inverse standard normal CDF.
///
/// Seeds from Acklam's rational approximation and applies two Halley steps
/// against [`norm_cdf`], which brings the result to full double precision.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("inv_norm_cdf: p={p} outside [0,1]")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    };
    // Halley polish: f(x) = N(x) - p, f' = n(x), f'' = -x n(x).
    for _ in 0..2 {
        let f = norm_cdf(x) - p;
        let d = norm_pdf(x);
        if d > 0.0 {
            x -= f / (d + 0.5 * x * f);
        }
    }
    Ok(x)
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSolution(format!(
            "bisect: no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() <= xtol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A few secant iterations to polish a root that is already close.
/// Falls back to the starting point if the iteration misbehaves.
pub fn secant_polish(f: impl Fn(f64) -> f64, x0: f64, step: f64, iters: usize) -> f64 {
    let mut a = x0;
    let mut b = x0 + step;
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
        if fb == fa || !fb.is_finite() {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !c.is_finite() {
            break;
        }
        a = b;
        fa = fb;
        b = c;
        fb = f(b);
        if fb == 0.0 {
            break;
        }
    }
    if fb.abs() <= f(x0).abs() {
        b
    } else {
        x0
    }
}

/// Secant iteration with a convergence test on |f|; errors out when the
/// iteration stalls or exceeds `max_iter`.
pub fn secant(
    f: impl Fn(f64) -> f64,
    x0: f64,
    x1: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut a = x0;
    let mut b = x1;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.abs() <= ftol {
        return Ok(a);
    }
    for _ in 0..max_iter {
        if fb.abs() <= ftol {
            return Ok(b);
        }
        if fb == fa {
            return Err(Error::Convergence("secant: flat residual".into()));
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !c.is_finite() {
            return Err(Error::Convergence("secant: diverged".into()));
        }
        a = b;
        fa = fb;
        b = c;
        fb = f(b);
    }
    Err(Error::Convergence(format!(
        "secant: no convergence after {max_iter} iterations (residual {fb:.3e})"
    )))
}

/// Locate the maximizer of a unimodal function on [lo, hi] by ternary search.
pub fn ternary_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration safeguarded by a maintained bracket: any step leaving the
/// bracket is replaced by a bisection step. `f` returns (value, derivative).
pub fn newton_bracketed(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut x = x0.clamp(lo, hi);
    for _ in 0..max_iter {
        let (v, d) = f(x);
        if v.abs() <= ftol {
            return Ok(x);
        }
        if v > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = if d != 0.0 { x - v / d } else { f64::NAN };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::Convergence(format!(
        "newton_bracketed: no convergence after {max_iter} iterations"
    )))
}

/// Cubic Lagrange interpolation on a uniform grid.
///
/// `xs`/`ys` must have equal length >= 4; the 4-point stencil is centered on
/// `x` and clipped at the ends.
pub fn lagrange_cubic(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert!(xs.len() == ys.len() && xs.len() >= 4);
    let n = xs.len();
    let dx = xs[1] - xs[0];
    let i = (((x - xs[0]) / dx).floor() as isize).clamp(0, n as isize - 1) as usize;
    let j0 = i.saturating_sub(1).min(n - 4);
    let mut out = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - xs[j0 + b]) / (xs[j0 + a] - xs[j0 + b]);
            }
        }
        out += w * ys[j0 + a];
    }
    out
}

/// Thomas algorithm for a tridiagonal system; overwrites `b` with the
/// solution. `sub[i]` multiplies x[i-1] in row i (sub[0] ignored), `sup[i]`
/// multiplies x[i+1] (last entry ignored). `scratch` needs `b.len()` slots.
pub fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    b: &mut [f64],
    scratch: &mut [f64],
) {
    let n = b.len();
    debug_assert!(sub.len() == n && diag.len() == n && sup.len() == n && scratch.len() >= n);
    scratch[0] = sup[0] / diag[0];
    b[0] /= diag[0];
    for i in 1..n {
        let m = 1.0 / (diag[i] - sub[i] * scratch[i - 1]);
        scratch[i] = sup[i] * m;
        b[i] = (b[i] - sub[i] * b[i - 1]) * m;
    }
    for i in (0..n - 1).rev() {
        b[i] -= scratch[i] * b[i + 1];
    }
}
