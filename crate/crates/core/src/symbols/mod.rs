//! Radial Fourier multipliers of the fractional and limit energies.
//!
//! With `ω_N` the unit-ball volume and `B` the unit ball:
//!
//! * `Φ_s(ξ) = ∫ (2 − 2cos ξ·h)|h|^{-N-2s} dh = 2|ξ|^{2s}/C(N,s)`;
//! * `m_s(ξ) = ∫_B (|ξ·h|² − 2 + 2cos ξ·h)|h|^{-N-2s} dh`, with `m = m_1`;
//! * `c_s(ξ) = ∫_{B^c} cos(ξ·h)|h|^{-N-2s} dh` and
//!   `T_s(ξ) = ∫_{B^c} (2 − 2cos ξ·h)|h|^{-N-2s} dh = Nω_N/s − 2c_s(ξ)`;
//! * the rate symbol `M_s = [(ω_N/2)|ξ|² − (1−s)Φ_s]/(1−s)`, which satisfies
//!   `M_s = −Nω_N/s + 2c_s + m_s` identically;
//! * `M_∞ = m − T_1` and the symbol of 𝔏, `−2Nω_N + 4c_1 + 2m = 2M_∞`.
//!
//! Every quantity is reduced to iterated one-dimensional integrals: a sphere
//! average (closed form, or a Bessel-type integral when `N = 2`) and a radial
//! integral `|ξ|^{2s}∫ t^{-1-2s} A_N(t) dt` over `[0, |ξ|]` or `[|ξ|, ∞)`.
//! Columns over many radii integrate consecutive segments and accumulate, so
//! a whole grid costs about as much as its largest radius.

pub mod angular;
mod bank;
mod bounds;
mod table;

use std::f64::consts::PI;

pub use bank::{GridSymbols, Symbol};
pub use bounds::{check_m_bounds, BoundRow, BoundsReport};
pub use table::{Order, SymbolRow, SymbolTable};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, sphere_measure, unit_ball_volume};
use crate::quadrature::{
    integrate_adaptive, integrate_oscillatory_tail, integrate_segments, Oscillation, QuadratureConfig,
};
use crate::series::quadratic_gap;
use angular::{ball_kernel, cos_kernel, moment, moment_defect};

/// Fractional orders closer to 1 than this are refused; the limit symbols
/// take over there.
pub const PRECISION_MARGIN: f64 = 1e-6;

/// Validates a fractional order `s ∈ (0, 1 − PRECISION_MARGIN)`.
pub fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput(format!("fractional order must lie in (0, 1) (got {s})")));
    }
    if s >= 1.0 - PRECISION_MARGIN {
        return Err(Error::PrecisionGuard { s, margin: PRECISION_MARGIN });
    }
    Ok(())
}

/// Validates a kernel exponent `s ∈ (0, 1]`; `s = 1` is the limit kernel.
fn check_exponent(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("kernel exponent must lie in (0, 1] (got {s})")))
    }
}

fn check_radius(xi: f64) -> Result<()> {
    if xi >= 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("|ξ| must be finite and non-negative (got {xi})")))
    }
}

/// `∫_1^∞ cos(ωr) r^{-1-p} dr`.
pub fn cos_power_tail(p: f64, omega: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate_oscillatory_tail(p, omega, 1.0, Oscillation::Cos, cfg)?.value)
}

/// The constant `C(N, s)` and the pieces needed to evaluate `Φ_s` and `M_s`
/// without cancellation.
///
/// `1/C = S_N(s) K_s` with `S_N(s) = ∫_S |σ₁|^{2s}` and
/// `K_s = ∫_0^∞ (1 − cos t) t^{-1-2s} dt = 1/(4(1−s)) + R_s`, where `R_s`
/// stays bounded as `s → 1`. The normalization defect
/// `D_s = [ω_N/2 − 2(1−s)/C]/(1−s)` is assembled from `R_s` and
/// `(ω_N − S_N(s))/(1−s)`, both free of the `1/(1−s)` blow-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub dim: usize,
    pub s: f64,
    /// `1/C(N, s)`.
    pub inv_constant: f64,
    /// `D_s`, so that `M_s(ξ) = (ω_N/2)|ξ|^{2s}·expm1(2(1−s)ln|ξ|)/(1−s) + D_s|ξ|^{2s}`.
    pub defect: f64,
}

impl Normalization {
    pub fn new(dim: usize, s: f64, cfg: &QuadratureConfig) -> Result<Self> {
        check_dim(dim)?;
        check_order(s)?;
        cfg.validate()?;
        let switch = cfg.series_switch_radius;
        // (1 − cos t) − t²/2 = −g(t)/2
        let inner = integrate_adaptive(|t: f64| -0.5 * quadratic_gap(t, switch) * t.powf(-1.0 - 2.0 * s), 0.0, 1.0, cfg)?
            .value;
        let outer = 1.0 / (2.0 * s) - cos_power_tail(2.0 * s, 1.0, cfg)?;
        let regular = inner + outer;
        let sphere = moment(dim, s, cfg)?;
        let k_s = 0.25 / (1.0 - s) + regular;
        let defect = 0.5 * moment_defect(dim, s, cfg)? - 2.0 * sphere * regular;
        Ok(Self { dim, s, inv_constant: sphere * k_s, defect })
    }

    pub fn constant(&self) -> f64 {
        1.0 / self.inv_constant
    }

    /// `Φ_s(ξ) = 2|ξ|^{2s}/C`.
    pub fn phi(&self, xi: f64) -> f64 {
        2.0 * xi.powf(2.0 * self.s) * self.inv_constant
    }

    /// `M_s(ξ)` by the split form.
    pub fn rate(&self, xi: f64) -> f64 {
        if xi == 0.0 {
            return 0.0;
        }
        let a = 1.0 - self.s;
        let p = xi.powf(2.0 * self.s);
        0.5 * unit_ball_volume(self.dim) * p * (2.0 * a * xi.ln()).exp_m1() / a + self.defect * p
    }

    /// The rate operator symbol in the unsplit form
    /// `[ω_N|ξ|² − 4(1−s)|ξ|^{2s}/C]/(1−s)`, equal to `2M_s`.
    pub fn rate_operator_unsplit(&self, xi: f64) -> f64 {
        let a = 1.0 - self.s;
        (unit_ball_volume(self.dim) * xi * xi - 2.0 * a * self.phi(xi)) / a
    }
}

pub fn frac_constant(dim: usize, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(Normalization::new(dim, s, cfg)?.constant())
}

pub fn phi_s(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_radius(xi)?;
    Ok(Normalization::new(dim, s, cfg)?.phi(xi))
}

/// `m_s(ξ)` for `s ∈ (0, 1]`.
pub fn singular_multiplier(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_radius(xi)?;
    Ok(singular_ball_column(dim, s, &[xi], cfg)?[0])
}

/// `m(ξ) = m_1(ξ)`.
pub fn m_multiplier(dim: usize, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    singular_multiplier(dim, 1.0, xi, cfg)
}

/// `c_s(ξ)` for `s ∈ (0, 1]`.
pub fn cos_tail(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_radius(xi)?;
    Ok(cos_tail_column(dim, s, &[xi], cfg)?[0])
}

/// `T_s(ξ) = Nω_N/s − 2c_s(ξ)` for `s ∈ (0, 1]`.
pub fn tail_t(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(sphere_measure(dim) / s - 2.0 * cos_tail(dim, s, xi, cfg)?)
}

pub fn rate_symbol(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_radius(xi)?;
    Ok(Normalization::new(dim, s, cfg)?.rate(xi))
}

/// `M_∞(ξ) = m(ξ) − T_1(ξ)`.
pub fn limit_symbol(dim: usize, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(m_multiplier(dim, xi, cfg)? - tail_t(dim, 1.0, xi, cfg)?)
}

/// Symbol of 𝔏 assembled from its three terms: `−2Nω_N + 4c_1 + 2m`.
pub fn l_symbol(dim: usize, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(-2.0 * sphere_measure(dim) + 4.0 * cos_tail(dim, 1.0, xi, cfg)? + 2.0 * m_multiplier(dim, xi, cfg)?)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("radii must be finite, non-negative and ascending".into()));
    }
    Ok(())
}

/// `m_s` at every radius of an ascending list, by forward accumulation of
/// `∫ t^{-1-2s} A_N(t) dt` from the origin.
pub(crate) fn singular_ball_column(dim: usize, s: f64, radii: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    check_dim(dim)?;
    check_exponent(s)?;
    check_radii(radii)?;
    let switch = cfg.series_switch_radius;
    let segs = integrate_segments(|t: f64| t.powf(-1.0 - 2.0 * s) * ball_kernel(dim, t, switch), 0.0, radii, cfg)?;
    let mut acc = 0.0;
    Ok(radii
        .iter()
        .zip(segs)
        .map(|(&r, v)| {
            acc += v;
            if r == 0.0 {
                0.0
            } else {
                r.powf(2.0 * s) * acc
            }
        })
        .collect())
}

/// `c_s` at every radius of an ascending list: the largest radius is
/// evaluated directly, the others by backward accumulation of
/// `∫ t^{-1-2s} B_N(t) dt`.
pub(crate) fn cos_tail_column(dim: usize, s: f64, radii: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    check_dim(dim)?;
    check_exponent(s)?;
    check_radii(radii)?;
    let zero_value = sphere_measure(dim) / (2.0 * s);
    let first_pos = radii.iter().position(|&r| r > 0.0);
    let Some(first_pos) = first_pos else {
        return Ok(vec![zero_value; radii.len()]);
    };
    let pos = &radii[first_pos..];
    let top = *pos.last().unwrap();
    let top_tail = top.powf(-2.0 * s) * cos_tail_direct(dim, s, top, cfg)?;
    // Segment j spans [pos[j], pos[j+1]].
    let segs = integrate_segments(|t: f64| t.powf(-1.0 - 2.0 * s) * cos_kernel(dim, t), pos[0], &pos[1..], cfg)?;
    let mut out = vec![zero_value; radii.len()];
    let mut acc = top_tail;
    out[radii.len() - 1] = top.powf(2.0 * s) * acc;
    for j in (0..pos.len() - 1).rev() {
        acc += segs[j];
        out[first_pos + j] = pos[j].powf(2.0 * s) * acc;
    }
    Ok(out)
}

/// `∫_1^∞ r^{-1-2s} B_N(|ξ| r) dr = c_s(ξ)` at a single radius.
fn cos_tail_direct(dim: usize, s: f64, xi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = 2.0 * s;
    match dim {
        1 => Ok(2.0 * cos_power_tail(p, xi, cfg)?),
        2 => {
            // ∫_S T(|ξ||σ₁|) dσ = 4 ∫_0^{π/2} T(|ξ| cos θ) dθ
            let f = |th: f64| cos_power_tail(p, xi * th.cos(), cfg).unwrap_or(f64::NAN);
            Ok(4.0 * integrate_adaptive(f, 0.0, 0.5 * PI, cfg)?.value)
        }
        3 => {
            if xi >= 0.5 {
                // B_3(t) = 4π sin t / t
                let sin_tail = integrate_oscillatory_tail(p + 1.0, xi, 1.0, Oscillation::Sin, cfg)?.value;
                Ok(4.0 * PI * sin_tail / xi)
            } else {
                let f = |u: f64| cos_power_tail(p, xi * u, cfg).unwrap_or(f64::NAN);
                Ok(4.0 * PI * integrate_adaptive(f, 0.0, 1.0, cfg)?.value)
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn zero_frequency_values() {
        for dim in 1..=3 {
            assert_eq!(m_multiplier(dim, 0.0, &cfg()).unwrap(), 0.0);
            assert_eq!(tail_t(dim, 1.0, 0.0, &cfg()).unwrap(), 0.0);
            assert_eq!(rate_symbol(dim, 0.5, 0.0, &cfg()).unwrap(), 0.0);
        }
    }

    #[test]
    fn refuses_orders_at_one() {
        assert!(matches!(frac_constant(1, 1.0 - 1e-7, &cfg()), Err(Error::PrecisionGuard { .. })));
        assert!(frac_constant(1, 0.0, &cfg()).is_err());
        assert!(frac_constant(1, 1.2, &cfg()).is_err());
    }

    #[test]
    fn split_rate_agrees_with_naive_form_at_moderate_order() {
        // At s = 0.9 the naive quotient only loses about one digit.
        let n = Normalization::new(1, 0.9, &cfg()).unwrap();
        let naive = (0.5 * unit_ball_volume(1) - 0.1 * n.phi(1.0)) / 0.1;
        assert!((n.rate(1.0) - naive).abs() <= 1e-10 * naive.abs().max(1.0));
        assert!((n.rate_operator_unsplit(2.5) - 2.0 * n.rate(2.5)).abs() < 1e-10 * n.rate(2.5).abs());
    }

    #[test]
    fn columns_match_single_evaluations() {
        let radii = [0.0, 0.2, 1.0, 3.3, 7.0, 20.0];
        for dim in 1..=3 {
            let m_col = singular_ball_column(dim, 0.8, &radii, &cfg()).unwrap();
            let c_col = cos_tail_column(dim, 0.8, &radii, &cfg()).unwrap();
            for (i, &r) in radii.iter().enumerate() {
                let m = singular_multiplier(dim, 0.8, r, &cfg()).unwrap();
                let c = cos_tail(dim, 0.8, r, &cfg()).unwrap();
                assert!((m - m_col[i]).abs() <= 1e-11 * m.abs().max(1.0), "m dim={dim} r={r}");
                assert!((c - c_col[i]).abs() <= 1e-11 * c.abs().max(1.0), "c dim={dim} r={r}: {c} vs {}", c_col[i]);
            }
        }
    }
}
