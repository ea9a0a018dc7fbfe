//! Sphere averages of the one-dimensional kernels.
//!
//! For a radial reduction every symbol needs `∫_{S^{N-1}} k(t σ₁) dσ` for the
//! kernels `k = g` (inner ball) and `k = cos` (complement). In one and three
//! dimensions these are elementary; in two dimensions they are Bessel-type
//! integrals, evaluated by their power series for moderate `t` and by the
//! periodic trapezoid rule otherwise.

use std::f64::consts::PI;

use crate::error::Result;
use crate::quadrature::{integrate_adaptive, QuadratureConfig};
use crate::series::{bessel_gap, quadratic_gap, sinc, sinc_gap};

/// Below this argument the two-dimensional kernels use their power series,
/// whose largest term stays below 4 so no digits are lost.
const BESSEL_SERIES_RADIUS: f64 = 4.0;

/// Trapezoid nodes on the circle; the aliasing error is of order `J_n(t)`,
/// negligible once `n ≥ 2t + 40`.
fn circle_nodes(t: f64) -> usize {
    2 * t.abs().ceil() as usize + 40
}

/// `J₀(t) = (1/2π) ∫_0^{2π} cos(t cos θ) dθ`.
pub fn bessel_j0(t: f64) -> f64 {
    if t.abs() < BESSEL_SERIES_RADIUS {
        return 1.0 - 0.25 * t * t + bessel_gap(t);
    }
    let n = circle_nodes(t);
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| (t * (j as f64 * h).cos()).cos()).sum::<f64>() / n as f64
}

/// `A_N(t) = ∫_S (t²σ₁² − 2 + 2cos(tσ₁)) dσ`, of order `t⁴` at the origin.
pub fn ball_kernel(dim: usize, t: f64, switch: f64) -> f64 {
    match dim {
        1 => 2.0 * quadratic_gap(t, switch),
        2 => {
            if t.abs() < BESSEL_SERIES_RADIUS {
                4.0 * PI * bessel_gap(t)
            } else {
                PI * t * t - 4.0 * PI + 4.0 * PI * bessel_j0(t)
            }
        }
        3 => 2.0 * PI * sinc_gap(t, switch),
        _ => unreachable!("dimension checked by callers"),
    }
}

/// `B_N(t) = ∫_S cos(tσ₁) dσ`.
pub fn cos_kernel(dim: usize, t: f64) -> f64 {
    match dim {
        1 => 2.0 * t.cos(),
        2 => 2.0 * PI * bessel_j0(t),
        3 => 4.0 * PI * sinc(t),
        _ => unreachable!("dimension checked by callers"),
    }
}

/// `S_N(s) = ∫_S |σ₁|^{2s} dσ`.
pub fn moment(dim: usize, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(match dim {
        1 => 2.0,
        2 => 4.0 * integrate_adaptive(|th: f64| th.cos().powf(2.0 * s), 0.0, 0.5 * PI, cfg)?.value,
        3 => 4.0 * PI / (2.0 * s + 1.0),
        _ => unreachable!("dimension checked by callers"),
    })
}

/// `(ω_N − S_N(s)) / (1 − s)` without cancellation.
pub fn moment_defect(dim: usize, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(match dim {
        1 => 0.0,
        2 => {
            // cos²θ − cos^{2s}θ = cos^{2s}θ · expm1(2(1−s) ln cos θ)
            let a = 1.0 - s;
            let f = |th: f64| {
                let c = th.cos();
                if c <= 0.0 {
                    return 0.0;
                }
                c.powf(2.0 * s) * (2.0 * a * c.ln()).exp_m1() / a
            };
            4.0 * integrate_adaptive(f, 0.0, 0.5 * PI, cfg)?.value
        }
        3 => -8.0 * PI / (3.0 * (2.0 * s + 1.0)),
        _ => unreachable!("dimension checked by callers"),
    })
}

/// Sphere average by explicit angular quadrature, used to cross-check the
/// closed forms: `∫_S k(tσ₁) dσ` for `N = 2, 3`.
pub fn sphere_average_quadrature<K: Fn(f64) -> f64>(
    dim: usize,
    t: f64,
    kernel: K,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(match dim {
        1 => kernel(t) + kernel(-t),
        2 => integrate_adaptive(|th: f64| kernel(t * th.cos()), 0.0, 2.0 * PI, cfg)?.value,
        3 => 2.0 * PI * integrate_adaptive(|th: f64| kernel(t * th.cos()) * th.sin(), 0.0, PI, cfg)?.value,
        _ => unreachable!("dimension checked by callers"),
    })
}
