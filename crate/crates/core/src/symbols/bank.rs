use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{cos_tail_column, singular_ball_column, Normalization};
use crate::error::Result;
use crate::fields::{same_grid, GridSpec, Spectrum};
use crate::geometry::{sphere_measure, unit_ball_volume};
use crate::quadrature::QuadratureConfig;

/// A radial multiplier that can be tabulated over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    /// `|ξ|^{2s}`.
    FracLaplacian(f64),
    /// `(ω_N/2)|ξ|²`, the symbol of `𝒢¹`.
    Dirichlet,
    /// `Φ_s`.
    Phi(f64),
    /// `m_s`, `s ∈ (0, 1]`.
    SingularBall(f64),
    /// `c_s`, `s ∈ (0, 1]`.
    CosTail(f64),
    /// `M_s` in split form.
    Rate(f64),
    /// `[ω_N|ξ|² − 4(1−s)|ξ|^{2s}/C]/(1−s)`, evaluated as written.
    RateOperatorUnsplit(f64),
    /// `M_∞ = m − T_1`.
    Limit,
    /// `−2Nω_N + 4c_1 + 2m`.
    LOperator,
}

impl Symbol {
    fn key(&self) -> (u8, u64) {
        match *self {
            Symbol::FracLaplacian(s) => (0, s.to_bits()),
            Symbol::Dirichlet => (1, 0),
            Symbol::Phi(s) => (2, s.to_bits()),
            Symbol::SingularBall(s) => (3, s.to_bits()),
            Symbol::CosTail(s) => (4, s.to_bits()),
            Symbol::Rate(s) => (5, s.to_bits()),
            Symbol::RateOperatorUnsplit(s) => (6, s.to_bits()),
            Symbol::Limit => (7, 0),
            Symbol::LOperator => (8, 0),
        }
    }
}

/// Radial multipliers tabulated once per distinct `|ξ|` of a grid.
///
/// Distinct radii are keyed by the integer `Σ k_a²`, so a grid with `M^N`
/// modes needs only a few thousand symbol evaluations. Columns are computed
/// on first use and cached.
#[derive(Debug)]
pub struct GridSymbols {
    grid: GridSpec,
    cfg: QuadratureConfig,
    radii: Vec<f64>,
    mode_radius: Vec<u32>,
    cache: Mutex<HashMap<(u8, u64), Arc<Vec<f64>>>>,
}

impl GridSymbols {
    pub fn new(grid: GridSpec, cfg: QuadratureConfig) -> Result<Self> {
        grid.validate()?;
        cfg.validate()?;
        let keys: Vec<u64> = (0..grid.len()).map(|i| grid.mode_norm_sq(i)).collect();
        let mut distinct = keys.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mode_radius = keys.iter().map(|k| distinct.binary_search(k).unwrap() as u32).collect();
        let radii = distinct.iter().map(|&k| grid.dxi() * (k as f64).sqrt()).collect();
        Ok(Self { grid, cfg, radii, mode_radius, cache: Mutex::new(HashMap::new()) })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// Distinct radii in ascending order.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Index into [`Self::radii`] of the mode at linear spectral index `i`.
    pub fn radius_index(&self, i: usize) -> usize {
        self.mode_radius[i] as usize
    }

    /// Symbol values at every distinct radius.
    pub fn column(&self, symbol: Symbol) -> Result<Arc<Vec<f64>>> {
        let key = symbol.key();
        if let Some(c) = self.cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(c));
        }
        let col = Arc::new(self.compute(symbol)?);
        self.cache.lock().unwrap().insert(key, Arc::clone(&col));
        Ok(col)
    }

    /// Symbol values per mode, in spectral storage order.
    pub fn per_mode(&self, symbol: Symbol) -> Result<Vec<f64>> {
        let col = self.column(symbol)?;
        Ok(self.mode_radius.iter().map(|&r| col[r as usize]).collect())
    }

    /// `Σ_k M(|ξ_k|) |û_k|² Δξ^N`.
    pub fn quadratic_form(&self, symbol: Symbol, spectrum: &Spectrum) -> Result<f64> {
        same_grid(&self.grid, &spectrum.grid)?;
        let col = self.column(symbol)?;
        Ok(spectrum.weighted_norm_sq(|i| col[self.mode_radius[i] as usize]))
    }

    fn compute(&self, symbol: Symbol) -> Result<Vec<f64>> {
        let dim = self.grid.dim;
        let r = &self.radii;
        let nw = sphere_measure(dim);
        Ok(match symbol {
            Symbol::FracLaplacian(s) => r.iter().map(|x| x.powf(2.0 * s)).collect(),
            Symbol::Dirichlet => r.iter().map(|x| 0.5 * unit_ball_volume(dim) * x * x).collect(),
            Symbol::Phi(s) => {
                let n = Normalization::new(dim, s, &self.cfg)?;
                r.iter().map(|&x| n.phi(x)).collect()
            }
            Symbol::Rate(s) => {
                let n = Normalization::new(dim, s, &self.cfg)?;
                r.iter().map(|&x| n.rate(x)).collect()
            }
            Symbol::RateOperatorUnsplit(s) => {
                let n = Normalization::new(dim, s, &self.cfg)?;
                r.iter().map(|&x| n.rate_operator_unsplit(x)).collect()
            }
            Symbol::SingularBall(s) => singular_ball_column(dim, s, r, &self.cfg)?,
            Symbol::CosTail(s) => cos_tail_column(dim, s, r, &self.cfg)?,
            Symbol::Limit => {
                let m = self.column(Symbol::SingularBall(1.0))?;
                let c = self.column(Symbol::CosTail(1.0))?;
                m.iter().zip(c.iter()).map(|(m, c)| m - (nw - 2.0 * c)).collect()
            }
            Symbol::LOperator => {
                let m = self.column(Symbol::SingularBall(1.0))?;
                let c = self.column(Symbol::CosTail(1.0))?;
                m.iter().zip(c.iter()).map(|(m, c)| -2.0 * nw + 4.0 * c + 2.0 * m).collect()
            }
        })
    }
}
