//! Exact gradient flows of the rate and limit functionals.
//!
//! Both generators are Fourier multipliers, so `û(t, ξ) = e^{−σ(ξ)t} û₀(ξ)`
//! with `σ = 2M_s` or `σ = 2M_∞`. Nothing is time-stepped. Energies are
//! evaluated with the energy symbols `M_s`, `M_∞` (not `σ/2`).

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{map_spectrum, same_grid, to_field, to_spectrum, write_csv, Field, Spectrum};
use crate::fmtnum::sig12;
use crate::geometry::sphere_measure;
use crate::operators::OperatorSpec;
use crate::symbols::{check_order, GridSymbols, Symbol};

/// Largest admissible `T·max(0, −min σ)`; `e^{700}` is near the `f64` ceiling.
pub const OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSpec {
    pub operator: OperatorSpec,
    pub horizon: f64,
    pub sample_times: Vec<f64>,
}

impl FlowSpec {
    pub fn new(operator: OperatorSpec, horizon: f64, sample_times: Vec<f64>) -> Result<Self> {
        let spec = Self { operator, horizon, sample_times };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.operator {
            OperatorSpec::RateOperator(s) => {
                check_order(s)?;
                if s <= 0.5 {
                    return Err(Error::InvalidInput(format!("rate flows need s > 1/2 (got {s})")));
                }
            }
            OperatorSpec::LimitOperator => {}
            OperatorSpec::FracLaplacian(_) => {
                return Err(Error::InvalidInput("flows are driven by the rate or limit operator".into()));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidInput(format!("horizon must be positive (got {})", self.horizon)));
        }
        let t = &self.sample_times;
        if t.first() != Some(&0.0) {
            return Err(Error::InvalidInput("sample times must start at 0".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) || t.last().is_some_and(|&l| l > self.horizon) {
            return Err(Error::InvalidInput("sample times must increase strictly within [0, T]".into()));
        }
        Ok(())
    }

    fn energy_symbol(&self) -> Symbol {
        match self.operator {
            OperatorSpec::RateOperator(s) => Symbol::Rate(s),
            _ => Symbol::Limit,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: FlowSpec,
    pub initial: Field,
    /// Generator symbol per mode.
    pub sigma: Vec<f64>,
    pub snapshots: Vec<Spectrum>,
    pub energies: Vec<f64>,
    /// `‖u_t‖²` at each sample time.
    pub dissipation: Vec<f64>,
    /// Number of modes with `σ < 0`; these grow.
    pub growing_modes: usize,
    /// `max(0, −min σ)`.
    pub max_growth_rate: f64,
}

/// Largest admissible growth rate `λ = 8Nω_N`. The energies dominate
/// `−(λ/2)‖u‖²`, so `σ = 2M ≥ −λ` and no mode grows faster than `e^{λt}`.
pub fn growth_bound(dim: usize) -> f64 {
    8.0 * sphere_measure(dim)
}

/// `e^{−σt}û` mode by mode.
pub fn propagate(spectrum: &Spectrum, sigma: &[f64], t: f64) -> Result<Spectrum> {
    if sigma.len() != spectrum.coeffs.len() {
        return Err(Error::GridMismatch(format!("{} symbol values for {} modes", sigma.len(), spectrum.coeffs.len())));
    }
    Ok(map_spectrum(spectrum, |i| Complex64::new((-sigma[i] * t).exp(), 0.0)))
}

pub fn evolve(spec: &FlowSpec, u0: &Field, bank: &GridSymbols) -> Result<Trajectory> {
    spec.validate()?;
    same_grid(&u0.grid, bank.grid())?;
    let sigma = spec.operator.symbol(bank)?;
    let min_sigma = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let max_growth_rate = (-min_sigma).max(0.0);
    let exponent = spec.horizon * max_growth_rate;
    if exponent > OVERFLOW_LIMIT {
        return Err(Error::Overflow { exponent, limit: OVERFLOW_LIMIT });
    }
    let growing_modes = sigma.iter().filter(|&&v| v < 0.0).count();
    if growing_modes > 0 {
        let bound = growth_bound(u0.grid.dim);
        log::info!(
            "{} has {growing_modes} growing modes, max rate {max_growth_rate:.3e} (λ-bound {bound:.3e})",
            spec.operator.label()
        );
        if max_growth_rate > bound {
            log::warn!("growth rate {max_growth_rate:.6e} exceeds the λ-bound {bound:.6e}");
        }
    }
    let initial_spectrum = to_spectrum(u0);
    let energy_symbol = spec.energy_symbol();
    let mut snapshots = Vec::with_capacity(spec.sample_times.len());
    let mut energies = Vec::with_capacity(spec.sample_times.len());
    let mut dissipation = Vec::with_capacity(spec.sample_times.len());
    for &t in &spec.sample_times {
        let snap = propagate(&initial_spectrum, &sigma, t)?;
        energies.push(bank.quadratic_form(energy_symbol, &snap)?);
        dissipation.push(snap.weighted_norm_sq(|i| sigma[i] * sigma[i]));
        snapshots.push(snap);
    }
    Ok(Trajectory {
        spec: spec.clone(),
        initial: u0.clone(),
        sigma,
        snapshots,
        energies,
        dissipation,
        growing_modes,
        max_growth_rate,
    })
}

impl Trajectory {
    pub fn field_at(&self, k: usize) -> Result<Field> {
        to_field(&self.snapshots[k])
    }

    /// `û(t)` for an arbitrary time, not just a sample time.
    pub fn spectrum_at(&self, t: f64) -> Result<Spectrum> {
        propagate(&self.snapshots[0], &self.sigma, t)
    }
}

/// `Σ |â − b̂|² w Δξ^N`.
fn gap_norm_sq(a: &Spectrum, b: &Spectrum, w: impl Fn(usize) -> f64) -> f64 {
    let s: f64 = a.coeffs.iter().zip(&b.coeffs).enumerate().map(|(i, (x, y))| w(i) * (x - y).norm_sqr()).sum();
    s * a.grid.dual_cell()
}

/// Distances between two trajectories on the same grid and sample times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDistance {
    /// `max_t ‖u_a(t) − u_b(t)‖`.
    pub sup_l2: f64,
    /// Trapezoid-in-time `∫ ‖∂_t u_a − ∂_t u_b‖² dt`.
    pub h1_seminorm_sq: f64,
    /// `‖u_a(t) − u_b(t)‖` per sample time.
    pub l2_per_time: Vec<f64>,
}

pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<TrajectoryDistance> {
    same_grid(&a.initial.grid, &b.initial.grid)?;
    if a.spec.sample_times != b.spec.sample_times {
        return Err(Error::InvalidInput("trajectories have different sample times".into()));
    }
    let l2_per_time: Vec<f64> =
        a.snapshots.iter().zip(&b.snapshots).map(|(x, y)| gap_norm_sq(x, y, |_| 1.0).sqrt()).collect();
    let sup_l2 = l2_per_time.iter().copied().fold(0.0, f64::max);
    let rates: Vec<f64> = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| {
            let s: f64 = x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .enumerate()
                .map(|(i, (p, q))| (p * a.sigma[i] - q * b.sigma[i]).norm_sqr())
                .sum();
            s * x.grid.dual_cell()
        })
        .collect();
    let t = &a.spec.sample_times;
    let h1_seminorm_sq = t.windows(2).zip(rates.windows(2)).map(|(w, r)| 0.5 * (w[1] - w[0]) * (r[0] + r[1])).sum();
    Ok(TrajectoryDistance { sup_l2, h1_seminorm_sq, l2_per_time })
}

/// One interval of the energy-dissipation identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipationInterval {
    pub t0: f64,
    pub t1: f64,
    /// `𝒢(u(t1)) − 𝒢(u(t0))` from the stored energies.
    pub energy_change: f64,
    /// `∫_{t0}^{t1} ‖u_t‖² dt` in closed form.
    pub dissipated: f64,
    pub residual: f64,
    /// `residual / max(|energy_change|, |dissipated|)`, 0 if both vanish.
    pub relative_residual: f64,
}

/// Checks `𝒢(u(t1)) − 𝒢(u(t0)) = −∫ ‖u_t‖²` over consecutive sample times.
///
/// Mode by mode, `∫_{t0}^{t1} σ²|û₀|² e^{−2σt} dt = σ|û₀|² e^{−2σt0}(1 − e^{−2σ(t1−t0)})/2`.
pub fn dissipation_audit(traj: &Trajectory) -> Vec<DissipationInterval> {
    let u0 = &traj.snapshots[0];
    let t = &traj.spec.sample_times;
    (1..t.len())
        .map(|k| {
            let (t0, t1) = (t[k - 1], t[k]);
            let dissipated = u0.weighted_norm_sq(|i| {
                let s = traj.sigma[i];
                -0.5 * s * (-2.0 * s * t0).exp() * (-2.0 * s * (t1 - t0)).exp_m1()
            });
            let energy_change = traj.energies[k] - traj.energies[k - 1];
            let residual = (energy_change + dissipated).abs();
            let scale = energy_change.abs().max(dissipated.abs());
            let relative_residual = if scale == 0.0 { 0.0 } else { residual / scale };
            DissipationInterval { t0, t1, energy_change, dissipated, residual, relative_residual }
        })
        .collect()
}

/// Per-`s` comparison of a rate flow with the limit flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub s: f64,
    pub sup_l2: f64,
    pub h1_seminorm_sq: f64,
    pub energies: Vec<f64>,
    /// `|𝒢¹_s(u^s(t)) − 𝒢¹_∞(u^∞(t))|`.
    pub energy_gap: Vec<f64>,
    pub l2_distance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub sample_times: Vec<f64>,
    pub limit_energies: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

pub const CONVERGENCE_HEADER: &str = "s,t,energy_s,energy_limit,energy_gap,l2_distance,sup_l2,h1_seminorm_sq";

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CONVERGENCE_HEADER}")?;
        for r in &self.rows {
            for (k, t) in self.sample_times.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    sig12(r.s),
                    sig12(*t),
                    sig12(r.energies[k]),
                    sig12(self.limit_energies[k]),
                    sig12(r.energy_gap[k]),
                    sig12(r.l2_distance[k]),
                    sig12(r.sup_l2),
                    sig12(r.h1_seminorm_sq)
                )?;
            }
        }
        Ok(())
    }
}

/// Runs the limit flow and one rate flow per `s` from the same datum.
pub fn convergence_study(
    u0: &Field,
    s_list: &[f64],
    horizon: f64,
    sample_times: &[f64],
    bank: &GridSymbols,
) -> Result<ConvergenceTable> {
    if s_list.is_empty() || s_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("s list must be non-empty and strictly ascending".into()));
    }
    let limit_spec = FlowSpec::new(OperatorSpec::LimitOperator, horizon, sample_times.to_vec())?;
    let limit = evolve(&limit_spec, u0, bank)?;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let spec = FlowSpec::new(OperatorSpec::RateOperator(s), horizon, sample_times.to_vec())?;
        let traj = evolve(&spec, u0, bank)?;
        let d = trajectory_distance(&traj, &limit)?;
        let energy_gap = traj.energies.iter().zip(&limit.energies).map(|(a, b)| (a - b).abs()).collect();
        rows.push(ConvergenceRow {
            s,
            sup_l2: d.sup_l2,
            h1_seminorm_sq: d.h1_seminorm_sq,
            energies: traj.energies,
            energy_gap,
            l2_distance: d.l2_per_time,
        });
    }
    Ok(ConvergenceTable { sample_times: sample_times.to_vec(), limit_energies: limit.energies, rows })
}

pub const SUMMARY_HEADER: &str = "t,energy,dissipation,l2_norm,boundary_leak";

/// Writes `u_<k>.csv` per sample time and `summary.csv` into `dir`.
///
/// `boundary_leak` is the largest `|u|` on the box faces, which measures how
/// far the torus solution is from staying inside the box.
pub fn export_trajectory(traj: &Trajectory, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut summary = std::io::BufWriter::new(std::fs::File::create(dir.join("summary.csv"))?);
    writeln!(summary, "{SUMMARY_HEADER}")?;
    for (k, t) in traj.spec.sample_times.iter().enumerate() {
        let u = traj.field_at(k)?;
        let file = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("u_{k:03}.csv")))?);
        write_csv(&u, file)?;
        writeln!(
            summary,
            "{},{},{},{},{}",
            sig12(*t),
            sig12(traj.energies[k]),
            sig12(traj.dissipation[k]),
            sig12(traj.snapshots[k].weighted_norm_sq(|_| 1.0).sqrt()),
            sig12(u.boundary_max())
        )?;
    }
    summary.flush()?;
    Ok(())
}
