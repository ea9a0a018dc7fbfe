use serde::Serialize;

use super::singular_ball_column;
use crate::error::{Error, Result};
use crate::geometry::sphere_measure;
use crate::quadrature::QuadratureConfig;

/// Explicit two-sided bounds on `m` at one radius.
///
/// `upper` is `Nω_N|ξ|⁴/24` for `|ξ| ≤ 2` and `Nω_N|ξ|²(1/6 + log|ξ|)` beyond.
/// `lower` is `Nω_N|ξ|⁴/768` for `|ξ| < 3`; for `|ξ| ≥ 3` it is
/// `9Nω_N|ξ|²/768 + (5/36)Nω_N|ξ|²(log|ξ| − log 3)`, where the first term is
/// the contribution of `B(0, 3)`. `lower_quartic` keeps `|ξ|⁴/768` in that
/// first term instead; it exceeds the growth rate of `m` and fails for large
/// radii, so it is reported for information only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub xi: f64,
    pub m: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_quartic: f64,
    pub holds: bool,
    pub lower_quartic_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub dim: usize,
    pub tolerance: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Evaluates `m` on `xi_grid` and tests the bounds with slack `tolerance`
/// relative to the bound.
pub fn check_m_bounds(dim: usize, xi_grid: &[f64], tolerance: f64, cfg: &QuadratureConfig) -> Result<BoundsReport> {
    if xi_grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidInput("bound radii must be positive".into()));
    }
    let mut sorted = xi_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let m = singular_ball_column(dim, 1.0, &sorted, cfg)?;
    let nw = sphere_measure(dim);
    let rows = xi_grid
        .iter()
        .map(|&x| {
            let mv = m[sorted.binary_search_by(|p| p.total_cmp(&x)).unwrap()];
            let x2 = x * x;
            let upper = if x <= 2.0 { nw * x2 * x2 / 24.0 } else { nw * x2 * (1.0 / 6.0 + x.ln()) };
            let log_part = 5.0 / 36.0 * nw * x2 * (x.ln() - 3f64.ln());
            let (lower, lower_quartic) = if x < 3.0 {
                let l = nw * x2 * x2 / 768.0;
                (l, l)
            } else {
                (9.0 * nw * x2 / 768.0 + log_part, nw * x2 * x2 / 768.0 + log_part)
            };
            let slack = |b: f64| tolerance * b.abs().max(1.0);
            BoundRow {
                xi: x,
                m: mv,
                lower,
                upper,
                lower_quartic,
                holds: mv >= lower - slack(lower) && mv <= upper + slack(upper),
                lower_quartic_holds: mv >= lower_quartic - slack(lower_quartic),
            }
        })
        .collect();
    Ok(BoundsReport { dim, tolerance, rows })
}
