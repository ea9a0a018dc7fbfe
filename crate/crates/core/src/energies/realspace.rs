//! Real-space evaluation of the one-dimensional energies on the torus.
//!
//! Everything is expressed through the periodic autocorrelation
//! `P(h) = ∫_cell u(x) u(x+h) dx`, computed at grid lags by literal
//! summation, and the structure function `F(h) = 2(P(0) − P(h))`. Since the
//! spectral energies see the periodic extension of `u`, so does this module:
//! integrals over `|h| > L/2` are folded back onto one cell with the image
//! kernel `K(y) = Σ_{n≠0} |y + nL|^{-q}`.

use crate::error::{Error, Result};
use crate::fields::Field;
use crate::quadrature::{integrate_adaptive, integrate_power_weighted, QuadratureConfig};
use crate::series::hurwitz_zeta;

/// Lags below `NEAR * Δx` use the even interpolant of `F(h)/h²`.
const NEAR: usize = 4;
/// Points of the Lagrange stencil away from the origin.
const STENCIL: usize = 8;

pub(crate) struct Autocorrelation {
    dx: f64,
    length: f64,
    /// `P` at lags `0..M`, periodic.
    p: Vec<f64>,
    /// `F(iΔx)/(iΔx)²` for `i = 1..=NEAR`.
    w_near: [f64; NEAR],
    /// `lim_{h→0} F(h)/h² = ‖u'‖²`.
    grad_sq: f64,
}

impl Autocorrelation {
    pub(crate) fn new(u: &Field) -> Result<Self> {
        let g = u.grid;
        if g.dim != 1 {
            return Err(Error::InvalidInput("real-space energies are one-dimensional".into()));
        }
        let m = g.points;
        let dx = g.dx();
        if NEAR as f64 * dx >= 1.0 {
            return Err(Error::InvalidInput("real-space energies need Δx < 1/4".into()));
        }
        if g.length <= 2.0 {
            return Err(Error::InvalidInput("real-space energies need L > 2".into()));
        }
        let v = &u.values;
        let p: Vec<f64> = (0..m)
            .map(|k| (0..m).map(|i| v[i] * v[(i + k) % m]).sum::<f64>() * dx)
            .collect();
        let mut w_near = [0.0; NEAR];
        for (i, w) in w_near.iter_mut().enumerate() {
            let h = (i + 1) as f64 * dx;
            *w = 2.0 * (p[0] - p[i + 1]) / (h * h);
        }
        let mut ac = Self { dx, length: g.length, p, w_near, grad_sq: 0.0 };
        ac.grad_sq = ac.w_even(0.0);
        Ok(ac)
    }

    pub(crate) fn p0(&self) -> f64 {
        self.p[0]
    }

    pub(crate) fn grad_sq(&self) -> f64 {
        self.grad_sq
    }

    // Cubic in z = h² through (i²Δx², w_i), i = 1..=NEAR.
    fn w_even(&self, h: f64) -> f64 {
        let z = h * h;
        let nodes: [f64; NEAR] = std::array::from_fn(|i| ((i + 1) as f64 * self.dx).powi(2));
        let mut acc = 0.0;
        for i in 0..NEAR {
            let mut l = 1.0;
            for j in 0..NEAR {
                if i != j {
                    l *= (z - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            acc += l * self.w_near[i];
        }
        acc
    }

    /// `P(h)` by centred eight-point Lagrange interpolation with periodic wrap.
    pub(crate) fn p_at(&self, h: f64) -> f64 {
        let m = self.p.len() as i64;
        let x = h / self.dx;
        let base = x.floor() as i64 - (STENCIL as i64 / 2 - 1);
        let mut acc = 0.0;
        for a in 0..STENCIL as i64 {
            let ka = base + a;
            let mut l = 1.0;
            for b in 0..STENCIL as i64 {
                if a != b {
                    l *= (x - (base + b) as f64) / (a - b) as f64;
                }
            }
            acc += l * self.p[ka.rem_euclid(m) as usize];
        }
        acc
    }

    /// `w(h) = F(h)/h²`.
    pub(crate) fn w_at(&self, h: f64) -> f64 {
        if h < NEAR as f64 * self.dx {
            self.w_even(h)
        } else {
            2.0 * (self.p[0] - self.p_at(h)) / (h * h)
        }
    }

    /// `‖u'‖² − F(h)/h²`, exactly even and `O(h²)` near the origin.
    fn gap_at(&self, h: f64) -> f64 {
        self.grad_sq - self.w_at(h)
    }

    /// `∫_cell P(y) K(y) dy` with `K(y) = Σ_{n≠0}|y + nL|^{-q}`.
    pub(crate) fn image_pairing(&self, q: f64) -> f64 {
        let m = self.p.len();
        let l = self.length;
        let mut acc = 0.0;
        for j in 0..m {
            let k = j as i64 - (m / 2) as i64;
            let y = k as f64 * self.dx;
            let kern = l.powf(-q) * (hurwitz_zeta(q, 1.0 + y / l) + hurwitz_zeta(q, 1.0 - y / l));
            acc += self.p[k.rem_euclid(m as i64) as usize] * kern;
        }
        acc * self.dx
    }

    /// `𝒥_s = 2∫_0^1 (‖u'‖² h² − F(h)) h^{-1-2s} dh` for `s ∈ (0, 1]`.
    pub(crate) fn j_term(&self, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let near = NEAR as f64 * self.dx;
        // gap = O(h²), so the integrand is O(h^{3-2s}) and regular.
        let f = |h: f64| self.gap_at(h) * h.powf(1.0 - 2.0 * s);
        let a = integrate_adaptive(f, 0.0, near, cfg)?.value;
        let b = self.panels(f, near, 1.0, cfg)?;
        Ok(2.0 * (a + b))
    }

    /// `b = 2∫_{|h|>1} P(h)|h|^{-1-2s} dh`, `s ∈ (0, 1]`.
    pub(crate) fn b_term(&self, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let q = 1.0 + 2.0 * s;
        let central = self.panels(|h| self.p_at(h) * h.powf(-q), 1.0, 0.5 * self.length, cfg)?;
        Ok(2.0 * (2.0 * central + self.image_pairing(q)))
    }

    /// `∫_ℝ F(h)|h|^{-1-2s} dh`, the Gagliardo double integral ordered by `|h|`.
    pub(crate) fn structure_integral(&self, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let q = 1.0 + 2.0 * s;
        let half = 0.5 * self.length;
        let near = NEAR as f64 * self.dx;
        let inner = integrate_power_weighted(|h| self.w_at(h), 1.0 - 2.0 * s, near, cfg)?.value
            + self.panels(|h| self.w_at(h) * h.powf(1.0 - 2.0 * s), near, half, cfg)?;
        let outer = 4.0 * self.p[0] * half.powf(-2.0 * s) / (2.0 * s) - 2.0 * self.image_pairing(q);
        Ok(2.0 * inner + outer)
    }

    // The interpolants are polynomial inside each grid cell, so cells are
    // the natural panels.
    fn panels<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let mut acc = 0.0;
        let mut x = a;
        let mut k = (a / self.dx).floor() + 1.0;
        while x < b {
            let y = (k * self.dx).min(b);
            if y > x {
                acc += integrate_adaptive(&f, x, y, cfg)?.value;
            }
            x = y;
            k += 1.0;
        }
        Ok(acc)
    }
}
