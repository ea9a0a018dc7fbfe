//! The verification suite: every explicit inequality and identity checked
//! at desk scale, one [`CheckRecord`] per check.

use std::time::Instant;

use serde::Serialize;

use crate::energies::{
    decompose_rate, domain_membership, gagliardo_direct, gagliardo_fourier, limit_functional, rate_functional, Method,
    RateMethod,
};
use crate::error::Result;
use crate::fields::{sample, Field, GridSpec, Profile};
use crate::fmtnum::sig12;
use crate::flows::{convergence_study, dissipation_audit, evolve, FlowSpec};
use crate::geometry::{sphere_measure, unit_ball_volume};
use crate::operators::{apply_l_realspace, apply_spectral, first_variation_check, OperatorSpec, VariationEnergy};
use crate::quadrature::{integrate_adaptive, QuadratureConfig};
use crate::symbols::{check_m_bounds, frac_constant, l_symbol, m_multiplier, tail_t, GridSymbols, Symbol};

pub const BOUND_RADII: [f64; 9] = [0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 50.0, 100.0];
pub const BOUND_TOLERANCE: f64 = 1e-8;
pub const ASYMPTOTIC_ORDERS: [f64; 3] = [0.9, 0.99, 0.999];
pub const ASYMPTOTIC_TOLERANCE: f64 = 1e-2;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const DECOMPOSITION_ORDERS: [f64; 4] = [0.6, 0.75, 0.9, 0.99];
pub const REALSPACE_TOLERANCE: f64 = 1e-3;
pub const J_TOLERANCE: f64 = 1e-10;
pub const CONVERGENCE_RATIO: f64 = 0.05;
pub const VARIATION_TOLERANCE: f64 = 1e-8;
pub const VARIATION_EPS: f64 = 1e-3;
pub const L_TOLERANCE: f64 = 1e-4;
pub const FLOW_TIMES: [f64; 4] = [0.0, 0.1, 0.5, 1.0];
pub const DISSIPATION_TOLERANCE: f64 = 1e-8;
pub const FLOW_ENERGY_TOLERANCE: f64 = 0.02;
pub const ORACLE_ORDERS: [f64; 3] = [0.5, 0.75, 0.9];
pub const DOMAIN_BETAS: [f64; 5] = [1.4, 1.5, 1.6, 3.0, 10.0];

/// One-dimensional grid on which the real-space oracles resolve the unit
/// bump (spectral tail ratio about `2e-6`).
pub fn oracle_grid() -> GridSpec {
    GridSpec { dim: 1, length: 40.0, points: 2048 }
}

/// Box for the pointwise 𝔏 comparison. Periodic images add about
/// `8√(2π)/L³` to the torus operator, which is `3e-4` at `L = 40`.
pub fn l_comparison_grid() -> GridSpec {
    GridSpec { dim: 1, length: 160.0, points: 4096 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Comparison {
    fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Comparison::AtMost => value <= limit,
            Comparison::Below => value < limit,
            Comparison::AtLeast => value >= limit,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::Below => "<",
            Comparison::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub comparison: Comparison,
    pub limit: f64,
    pub passed: bool,
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64, comparison: Comparison, limit: f64) -> Self {
        let passed = comparison.holds(value, limit);
        Self { label: label.into(), value, comparison, limit, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub detail: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub all_passed: bool,
    pub checks: Vec<CheckRecord>,
}

type CheckFn = fn(&QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)>;

pub const CHECKS: [(usize, &str, CheckFn); 12] = [
    (1, "multiplier_bounds", multiplier_bounds),
    (2, "normalization_asymptotics", normalization_asymptotics),
    (3, "symbol_identity", symbol_identity),
    (4, "decomposition_identity", decomposition_identity),
    (5, "j_positivity_monotonicity", j_positivity_monotonicity),
    (6, "pointwise_convergence", pointwise_convergence),
    (7, "lambda_bound", lambda_bound),
    (8, "first_variation", first_variation),
    (9, "l_realspace_vs_spectral", l_realspace_vs_spectral),
    (10, "flow_stability", flow_stability),
    (11, "oracle_equivalence", oracle_equivalence),
    (12, "domain_classifier", domain_classifier),
];

/// Runs one check. A numerical failure inside the check is an error, not a
/// failed record.
pub fn run_check(id: usize, cfg: &QuadratureConfig) -> Result<CheckRecord> {
    let (id, name, f) = CHECKS
        .iter()
        .copied()
        .find(|c| c.0 == id)
        .ok_or_else(|| crate::Error::InvalidInput(format!("no check with id {id}")))?;
    let start = Instant::now();
    let (measurements, detail) = f(cfg)?;
    let passed = !measurements.is_empty() && measurements.iter().all(|m| m.passed);
    Ok(CheckRecord { id, name, passed, measurements, detail, seconds: start.elapsed().as_secs_f64() })
}

/// Resolves check names or numeric ids.
pub fn resolve(selector: &str) -> Option<usize> {
    let s = selector.trim();
    s.parse::<usize>()
        .ok()
        .filter(|id| (1..=CHECKS.len()).contains(id))
        .or_else(|| CHECKS.iter().find(|c| c.1 == s).map(|c| c.0))
}

pub fn run_suite(ids: &[usize], cfg: &QuadratureConfig) -> Result<Manifest> {
    let checks = ids.iter().map(|&id| run_check(id, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(Manifest { all_passed: checks.iter().all(|c| c.passed), checks })
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| sig12(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Largest `d_{k+1}/d_k`; below 1 exactly when the sequence strictly decreases.
fn max_ratio(d: &[f64]) -> f64 {
    d.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

fn bank(grid: GridSpec, cfg: &QuadratureConfig) -> Result<GridSymbols> {
    GridSymbols::new(grid, *cfg)
}

const GAUSSIAN: Profile = Profile::Gaussian { sigma: 1.0 };
const BUMP: Profile = Profile::SmoothBump { radius: 1.0 };

fn multiplier_bounds(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    let mut detail = Vec::new();
    for dim in 1..=3 {
        let r = check_m_bounds(dim, &BOUND_RADII, BOUND_TOLERANCE, cfg)?;
        // Worst violation relative to the bound; negative when all hold.
        let worst = r
            .rows
            .iter()
            .map(|row| ((row.lower - row.m) / row.lower.abs()).max((row.m - row.upper) / row.upper.abs()))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(Measurement::new(format!("N={dim} worst relative violation"), worst, Comparison::AtMost, BOUND_TOLERANCE));
        let quartic_failures: Vec<String> =
            r.rows.iter().filter(|row| !row.lower_quartic_holds).map(|row| format!("{}", row.xi)).collect();
        if !quartic_failures.is_empty() {
            detail.push(format!(
                "N={dim}: lower bound with |ξ|⁴/768 in the B(0,3) term fails at |ξ| ∈ {{{}}} (informational)",
                quartic_failures.join(", ")
            ));
        }
    }
    Ok((out, detail))
}

fn normalization_asymptotics(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    let mut detail = Vec::new();
    for dim in 1..=3 {
        let target = 4.0 / unit_ball_volume(dim);
        let dev = ASYMPTOTIC_ORDERS
            .iter()
            .map(|&s| Ok((frac_constant(dim, s, cfg)? / (1.0 - s) / target - 1.0).abs()))
            .collect::<Result<Vec<f64>>>()?;
        detail.push(format!("N={dim}: relative deviations {}", list(&dev)));
        out.push(Measurement::new(format!("N={dim} max deviation ratio"), max_ratio(&dev), Comparison::Below, 1.0));
        out.push(Measurement::new(
            format!("N={dim} deviation at s=0.999"),
            dev[2],
            Comparison::AtMost,
            ASYMPTOTIC_TOLERANCE,
        ));
    }
    Ok((out, detail))
}

/// Twenty radii from `10⁻²` to `10²`, log-spaced.
pub fn probe_radii() -> Vec<f64> {
    (0..20).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0)).collect()
}

fn symbol_identity(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    for dim in 1..=3 {
        let mut worst = 0.0f64;
        for xi in probe_radii() {
            let l = l_symbol(dim, xi, cfg)?;
            let two_limit = 2.0 * (m_multiplier(dim, xi, cfg)? - tail_t(dim, 1.0, xi, cfg)?);
            worst = worst.max(rel(l, two_limit));
        }
        out.push(Measurement::new(format!("N={dim} max relative error"), worst, Comparison::AtMost, IDENTITY_TOLERANCE));
    }
    Ok((out, Vec::new()))
}

fn decomposition_identity(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    let one = bank(oracle_grid(), cfg)?;
    let two = bank(GridSpec::default_for(2)?, cfg)?;
    for profile in [GAUSSIAN, BUMP] {
        let (mut fourier, mut real) = (0.0f64, 0.0f64);
        for b in [&one, &two] {
            let u = sample(b.grid(), &profile)?;
            for s in DECOMPOSITION_ORDERS {
                let f = decompose_rate(&u, s, b, Method::Fourier)?;
                fourier = fourier.max(f.identity_residual() / f.total.abs());
                if b.grid().dim == 1 {
                    let r = decompose_rate(&u, s, b, Method::RealSpace)?;
                    real = real.max(rel(r.total, rate_functional(&u, s, b, RateMethod::Fourier)?));
                }
            }
        }
        let l = profile.label();
        out.push(Measurement::new(format!("{l} FOURIER N=1,2"), fourier, Comparison::AtMost, IDENTITY_TOLERANCE));
        out.push(Measurement::new(format!("{l} REALSPACE N=1"), real, Comparison::AtMost, REALSPACE_TOLERANCE));
    }
    Ok((out, Vec::new()))
}

fn j_positivity_monotonicity(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    let mut detail = Vec::new();
    let b = bank(oracle_grid(), cfg)?;
    for profile in [GAUSSIAN, BUMP] {
        let u = sample(b.grid(), &profile)?;
        for method in [Method::Fourier, Method::RealSpace] {
            let mut j = DECOMPOSITION_ORDERS
                .iter()
                .map(|&s| Ok(decompose_rate(&u, s, &b, method)?.j_term))
                .collect::<Result<Vec<f64>>>()?;
            j.push(limit_functional(&u, &b, method)?.j_term);
            detail.push(format!("{} {method}: 𝒥 at s = 0.6, 0.75, 0.9, 0.99, 1: {}", profile.label(), list(&j)));
            let min = j.iter().copied().fold(f64::INFINITY, f64::min);
            let drop = j.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
            let l = format!("{} {method}", profile.label());
            out.push(Measurement::new(format!("{l} min 𝒥"), min, Comparison::AtLeast, -J_TOLERANCE));
            out.push(Measurement::new(format!("{l} max 𝒥(s₁) − 𝒥(s₂)"), drop, Comparison::AtMost, J_TOLERANCE));
        }
    }
    Ok((out, detail))
}

fn pointwise_convergence(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    let mut detail = Vec::new();
    for dim in [1, 2] {
        let b = bank(GridSpec::default_for(dim)?, cfg)?;
        let u = sample(b.grid(), &GAUSSIAN)?;
        let limit = limit_functional(&u, &b, Method::Fourier)?.total;
        let gaps = ASYMPTOTIC_ORDERS
            .iter()
            .map(|&s| Ok((rate_functional(&u, s, &b, RateMethod::Fourier)? - limit).abs()))
            .collect::<Result<Vec<f64>>>()?;
        detail.push(format!("N={dim}: 𝒢¹_∞ = {limit:.12e}, gaps {}", list(&gaps)));
        out.push(Measurement::new(format!("N={dim} max gap ratio"), max_ratio(&gaps), Comparison::Below, 1.0));
        out.push(Measurement::new(
            format!("N={dim} gap(0.999)/gap(0.9)"),
            gaps[2] / gaps[0],
            Comparison::AtMost,
            CONVERGENCE_RATIO,
        ));
    }
    Ok((out, detail))
}

fn lambda_bound(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut out = Vec::new();
    for dim in 1..=3 {
        let b = bank(GridSpec::default_for(dim)?, cfg)?;
        let bound = -4.0 * sphere_measure(dim);
        let mut min = f64::INFINITY;
        for s in DECOMPOSITION_ORDERS {
            min = min.min(b.column(Symbol::Rate(s))?.iter().copied().fold(f64::INFINITY, f64::min));
        }
        out.push(Measurement::new(format!("N={dim} min M_s"), min, Comparison::AtLeast, bound));
    }
    Ok((out, Vec::new()))
}

fn first_variation(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let b = bank(GridSpec::default_for(1)?, cfg)?;
    let u = sample(b.grid(), &GAUSSIAN)?;
    let phi = sample(b.grid(), &Profile::SmoothBump { radius: 0.5 })?;
    let mut out = Vec::new();
    let mut detail = Vec::new();
    for e in [VariationEnergy::Rate(0.9), VariationEnergy::Limit] {
        let r = first_variation_check(e, &u, &phi, VARIATION_EPS, &b)?;
        detail.push(format!("{e:?}: quotient {:.15e}, pairing {:.15e}", r.difference_quotient, r.pairing));
        out.push(Measurement::new(format!("{e:?} relative gap"), r.relative_gap, Comparison::AtMost, VARIATION_TOLERANCE));
    }
    Ok((out, detail))
}

/// Grid indices of `x ∈ {0, 0.625, 1.25, 1.875, 2.5}` on [`l_comparison_grid`].
pub fn l_sample_indices(grid: &GridSpec) -> Vec<usize> {
    let step = (0.625 / grid.dx()).round() as usize;
    (0..5).map(|k| grid.points / 2 + k * step).collect()
}

fn l_realspace_vs_spectral(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let b = bank(l_comparison_grid(), cfg)?;
    let g = *b.grid();
    let u = sample(&g, &GAUSSIAN)?;
    let spectral = apply_spectral(OperatorSpec::LimitOperator, &u, &b)?;
    let analytic = GAUSSIAN.analytic(1).expect("gaussian has a closed form");
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for j in l_sample_indices(&g) {
        let x = g.point(j);
        let real = apply_l_realspace(&analytic, &x, cfg)?;
        let e = (real - spectral.values[j]).abs() / real.abs();
        detail.push(format!("x = {}: real {real:.12e}, spectral {:.12e}", x[0], spectral.values[j]));
        worst = worst.max(e);
    }
    Ok((vec![Measurement::new("max relative error", worst, Comparison::AtMost, L_TOLERANCE)], detail))
}

fn flow_stability(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let b = bank(GridSpec::default_for(1)?, cfg)?;
    let u = sample(b.grid(), &GAUSSIAN)?;
    let horizon = 1.0;
    let mut residual = 0.0f64;
    for op in ASYMPTOTIC_ORDERS.iter().map(|&s| OperatorSpec::RateOperator(s)).chain([OperatorSpec::LimitOperator]) {
        let tr = evolve(&FlowSpec::new(op, horizon, FLOW_TIMES.to_vec())?, &u, &b)?;
        residual = dissipation_audit(&tr).iter().map(|d| d.relative_residual).fold(residual, f64::max);
    }
    let table = convergence_study(&u, &ASYMPTOTIC_ORDERS, horizon, &FLOW_TIMES, &b)?;
    let sup: Vec<f64> = table.rows.iter().map(|r| r.sup_l2).collect();
    let last = table.rows.last().expect("three orders");
    let energy = last
        .energies
        .iter()
        .zip(&table.limit_energies)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .fold(0.0, f64::max);
    let detail = vec![
        format!("sup-in-time L² distances {}", list(&sup)),
        format!("limit energies {}", list(&table.limit_energies)),
        format!("s=0.999 energies {}", list(&last.energies)),
    ];
    Ok((
        vec![
            Measurement::new("max dissipation residual", residual, Comparison::AtMost, DISSIPATION_TOLERANCE),
            Measurement::new("max sup-L² distance ratio", max_ratio(&sup), Comparison::Below, 1.0),
            Measurement::new("max relative energy gap at s=0.999", energy, Comparison::AtMost, FLOW_ENERGY_TOLERANCE),
        ],
        detail,
    ))
}

fn oracle_equivalence(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let b = bank(oracle_grid(), cfg)?;
    let mut out = Vec::new();
    for profile in [GAUSSIAN, BUMP] {
        let u: Field = sample(b.grid(), &profile)?;
        let mut worst = 0.0f64;
        for s in ORACLE_ORDERS {
            worst = worst.max(rel(gagliardo_direct(&u, s, cfg)?, gagliardo_fourier(&u, s, &b)?));
        }
        out.push(Measurement::new(
            format!("{} direct vs Fourier Gagliardo", profile.label()),
            worst,
            Comparison::AtMost,
            REALSPACE_TOLERANCE,
        ));
    }
    let u = sample(b.grid(), &BUMP)?;
    let gap = rel(limit_functional(&u, &b, Method::RealSpace)?.total, limit_functional(&u, &b, Method::Fourier)?.total);
    out.push(Measurement::new("smooth_bump(1) limit REALSPACE vs FOURIER", gap, Comparison::AtMost, REALSPACE_TOLERANCE));
    Ok((out, Vec::new()))
}

/// `∫_{10^k}^{10^{k+1}} r^{N+1} log(1+r²)(1+r²)^{-β} dr`, the log-weighted
/// integrand of `spectral_decay(β)` over one decade, computed in `ln r`.
pub fn decade_increment(beta: f64, dim: usize, k: i32, cfg: &QuadratureConfig) -> Result<f64> {
    let n = dim as f64;
    let f = |y: f64| {
        let r = y.exp();
        r.powf(n + 2.0) * r.mul_add(r, 1.0).ln() * (1.0 + r * r).powf(-beta)
    };
    let ln10 = std::f64::consts::LN_10;
    Ok(integrate_adaptive(f, k as f64 * ln10, (k + 1) as f64 * ln10, cfg)?.value)
}

/// Decade ratio `I_{k+1}/I_k` at `k = 6`: the tail converges iff the
/// increments eventually shrink geometrically, i.e. the ratio is below 1.
pub fn decade_ratio(beta: f64, dim: usize, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(decade_increment(beta, dim, 7, cfg)? / decade_increment(beta, dim, 6, cfg)?)
}

fn domain_classifier(cfg: &QuadratureConfig) -> Result<(Vec<Measurement>, Vec<String>)> {
    let mut disagreements = 0.0;
    let mut detail = Vec::new();
    for beta in DOMAIN_BETAS {
        let v = domain_membership(beta, 1, cfg)?;
        let ratio = decade_ratio(beta, 1, cfg)?;
        let expected = beta > 1.5;
        let numerical = ratio < 1.0;
        if v.is_member != expected || v.is_member != numerical || v.log_weighted_integral.is_some() != v.is_member {
            disagreements += 1.0;
        }
        detail.push(format!(
            "β={beta}: member={} integral={:?} decade ratio={ratio:.4}",
            v.is_member, v.log_weighted_integral
        ));
    }
    Ok((vec![Measurement::new("misclassified β values", disagreements, Comparison::AtMost, 0.0)], detail))
}
