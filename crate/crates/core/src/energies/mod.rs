//! Fractional energies, the rate functional, its decomposition and limit.
//!
//! For `u` sampled on a periodic grid:
//!
//! * `𝒢ˢ(u) = (1−s)∫∫ |u(x)−u(y)|²/|x−y|^{N+2s}`;
//! * `(𝒢¹ − 𝒢ˢ)/(1−s) = a_s + b_s + 𝒥_s` with
//!   `a_s = −(Nω_N/s)‖u‖²`, `b_s = 2∫∫_{|x−y|>1} u(x)u(y)/|x−y|^{N+2s}` and
//!   `𝒥_s = ∫∫_{|x−y|<1} (|∇u(x)·(y−x)|² − |u(x)−u(y)|²)/|x−y|^{N+2s}`;
//! * `𝒢¹_∞ = a_1 + b_1 + 𝒥_1`, the limit as `s → 1`.
//!
//! FOURIER evaluates each term with its own multiplier. REALSPACE (one
//! dimension) works from the periodic autocorrelation and never touches the
//! spectrum.

mod realspace;

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{same_grid, to_spectrum, Field};
use crate::fmtnum::sig12;
use crate::geometry::{check_dim, sphere_measure};
use crate::quadrature::{integrate_adaptive, QuadratureConfig};
use crate::symbols::{check_order, GridSymbols, Symbol};
use realspace::Autocorrelation;

/// Largest grid accepted by the `O(M²)` direct Gagliardo evaluation.
pub const DIRECT_MAX_POINTS: usize = 2048;
/// Largest grid accepted by the real-space decomposition.
pub const REALSPACE_MAX_POINTS: usize = 4096;
/// `𝒥_s` values in `[−J_CLAMP, 0)` are rounding noise and reported as 0.
pub const J_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Fourier,
    RealSpace,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Fourier => "FOURIER",
            Method::RealSpace => "REALSPACE",
        })
    }
}

/// How the rate functional is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    /// `Σ M_s |û|²` with the split symbol.
    Fourier,
    /// `(𝒢¹ − 𝒢ˢ)/(1−s)` from two spectral energies, as written.
    Definition,
    /// `a + b + 𝒥` from the autocorrelation (one dimension).
    RealSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// Kernel exponent; 1 for the limit functional.
    pub s: f64,
    pub a_term: f64,
    pub b_term: f64,
    pub j_term: f64,
    pub total: f64,
    pub method: Method,
}

impl EnergyBreakdown {
    /// `|total − (a + b + 𝒥)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.total - (self.a_term + self.b_term + self.j_term)).abs()
    }
}

fn clamp_j(j: f64) -> f64 {
    if (-J_CLAMP..0.0).contains(&j) {
        0.0
    } else {
        j
    }
}

fn check_bank(u: &Field, bank: &GridSymbols) -> Result<()> {
    same_grid(&u.grid, bank.grid())
}

fn realspace_input(u: &Field, limit: usize) -> Result<()> {
    if u.grid.dim != 1 {
        return Err(Error::InvalidInput("REALSPACE evaluation is available for N = 1 only".into()));
    }
    if u.grid.points > limit {
        return Err(Error::CostGuard(format!(
            "real-space evaluation is O(M²); M = {} exceeds {limit}",
            u.grid.points
        )));
    }
    Ok(())
}

/// `𝒢ˢ(u) = (1−s) Σ Φ_s |û|² Δξ^N`.
pub fn gagliardo_fourier(u: &Field, s: f64, bank: &GridSymbols) -> Result<f64> {
    check_order(s)?;
    check_bank(u, bank)?;
    Ok((1.0 - s) * bank.quadratic_form(Symbol::Phi(s), &to_spectrum(u))?)
}

/// `𝒢ˢ(u)` as the literal double integral on the one-dimensional torus.
pub fn gagliardo_direct(u: &Field, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_order(s)?;
    realspace_input(u, DIRECT_MAX_POINTS)?;
    let ac = Autocorrelation::new(u)?;
    Ok((1.0 - s) * ac.structure_integral(s, cfg)?)
}

/// `𝒢¹(u) = (ω_N/2)‖∇u‖²`.
pub fn dirichlet(u: &Field, bank: &GridSymbols) -> Result<f64> {
    check_bank(u, bank)?;
    bank.quadratic_form(Symbol::Dirichlet, &to_spectrum(u))
}

pub fn rate_functional(u: &Field, s: f64, bank: &GridSymbols, method: RateMethod) -> Result<f64> {
    check_order(s)?;
    match method {
        RateMethod::Fourier => {
            check_bank(u, bank)?;
            bank.quadratic_form(Symbol::Rate(s), &to_spectrum(u))
        }
        RateMethod::Definition => {
            let g1 = dirichlet(u, bank)?;
            let gs = gagliardo_fourier(u, s, bank)?;
            Ok((g1 - gs) / (1.0 - s))
        }
        RateMethod::RealSpace => Ok(decompose_rate(u, s, bank, Method::RealSpace)?.total),
    }
}

/// The three-term decomposition of the rate functional.
///
/// FOURIER: `total` uses the split rate symbol while `a`, `b`, `𝒥` use the
/// multipliers `−Nω_N/s`, `2c_s` and `m_s`, so `total − (a + b + 𝒥)` is a
/// genuine consistency check. REALSPACE: all three terms come from the
/// autocorrelation and `total = a + b + 𝒥`.
pub fn decompose_rate(u: &Field, s: f64, bank: &GridSymbols, method: Method) -> Result<EnergyBreakdown> {
    check_order(s)?;
    breakdown(u, s, bank, method)
}

/// `𝒢¹_∞(u)` and its decomposition `a_1 + b_1 + 𝒥_1`.
pub fn limit_functional(u: &Field, bank: &GridSymbols, method: Method) -> Result<EnergyBreakdown> {
    breakdown(u, 1.0, bank, method)
}

fn breakdown(u: &Field, s: f64, bank: &GridSymbols, method: Method) -> Result<EnergyBreakdown> {
    let nw = sphere_measure(u.grid.dim);
    match method {
        Method::Fourier => {
            check_bank(u, bank)?;
            let spec = to_spectrum(u);
            let a = -nw / s * spec.weighted_norm_sq(|_| 1.0);
            let b = 2.0 * bank.quadratic_form(Symbol::CosTail(s), &spec)?;
            let j = clamp_j(bank.quadratic_form(Symbol::SingularBall(s), &spec)?);
            let total = if s == 1.0 {
                bank.quadratic_form(Symbol::Limit, &spec)?
            } else {
                bank.quadratic_form(Symbol::Rate(s), &spec)?
            };
            Ok(EnergyBreakdown { s, a_term: a, b_term: b, j_term: j, total, method })
        }
        Method::RealSpace => {
            realspace_input(u, REALSPACE_MAX_POINTS)?;
            let cfg = bank.config();
            let ac = Autocorrelation::new(u)?;
            let a = -nw / s * ac.p0();
            let b = ac.b_term(s, cfg)?;
            let j = clamp_j(ac.j_term(s, cfg)?);
            Ok(EnergyBreakdown { s, a_term: a, b_term: b, j_term: j, total: a + b + j, method })
        }
    }
}

/// `‖u'‖²` from the structure function, for cross-checks against the
/// spectral gradient.
pub fn realspace_gradient_norm_sq(u: &Field) -> Result<f64> {
    realspace_input(u, REALSPACE_MAX_POINTS)?;
    Ok(Autocorrelation::new(u)?.grad_sq())
}

/// Membership of `u` with `û(ξ) = (1 + |ξ|²)^{-β/2}` in the domain of `𝒢¹_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainVerdict {
    pub beta: f64,
    pub dim: usize,
    pub is_member: bool,
    /// `∫|ξ|²|û|² < ∞`.
    pub h1_member: bool,
    /// `∫ |ξ|² log(1 + |ξ|²) |û|² dξ`, `None` when it diverges.
    pub log_weighted_integral: Option<f64>,
}

/// Classifies the `spectral_decay(β)` profile.
///
/// Both `∫|ξ|²|û|²` and the log-weighted integral reduce to
/// `∫^∞ r^{N+1-2β}(·) dr`, so both converge exactly when `β > (N+2)/2`; the
/// log factor does not move the threshold. For members the log-weighted
/// integral is evaluated by quadrature, the tail mapped by `r = 1/t` and
/// then `t = v^{1/(2β−N−2)}`, which removes the power weight. Near the
/// threshold that exponent is huge, so `t` is formed from `ln v`.
pub fn domain_membership(beta: f64, dim: usize, cfg: &QuadratureConfig) -> Result<DomainVerdict> {
    check_dim(dim)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("β must be positive (got {beta})")));
    }
    let threshold = 0.5 * (dim as f64 + 2.0);
    let member = beta > threshold;
    let integral = if member {
        let n = dim as f64;
        let head = |r: f64| r.powf(n + 1.0) * r.mul_add(r, 1.0).ln() * (1.0 + r * r).powf(-beta);
        // r = 1/t: r^{N+1} log(1+r²)(1+r²)^{-β} dr = t^{2β-N-3} log((1+t²)/t²)(1+t²)^{-β} dt.
        // With e = 1/(2β − N − 2) and t = v^e this is e·log((1+t²)/t²)(1+t²)^{-β} dv.
        let e = 1.0 / (2.0 * beta - n - 2.0);
        let tail = |v: f64| {
            let ln_t = e * v.ln();
            let t2 = (2.0 * ln_t).exp();
            e * (t2.ln_1p() - 2.0 * ln_t) * (1.0 + t2).powf(-beta)
        };
        let relaxed = QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 10_000, ..*cfg };
        let v = integrate_adaptive(head, 0.0, 1.0, &relaxed)?.value + integrate_adaptive(tail, 0.0, 1.0, &relaxed)?.value;
        Some(sphere_measure(dim) * v)
    } else {
        None
    };
    Ok(DomainVerdict { beta, dim, is_member: member, h1_member: member, log_weighted_integral: integral })
}

/// One row of the energies report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub profile: String,
    pub dim: usize,
    /// `None` for the limit functional.
    pub s: Option<f64>,
    pub breakdown: EnergyBreakdown,
    pub g1: f64,
    /// `𝒢ˢ`, absent for the limit functional.
    pub gs: Option<f64>,
}

pub const REPORT_HEADER: &str = "profile,N,s,method,a_term,b_term,j_term,total,G1,Gs";

pub fn write_report<W: Write>(rows: &[EnergyRow], mut out: W) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        let b = &r.breakdown;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.profile,
            r.dim,
            r.s.map(sig12).unwrap_or_else(|| "LIMIT".into()),
            b.method,
            sig12(b.a_term),
            sig12(b.b_term),
            sig12(b.j_term),
            sig12(b.total),
            sig12(r.g1),
            r.gs.map(sig12).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// `‖u‖² = √π σ` and `‖u'‖² = √π/(2σ)` for the one-dimensional Gaussian,
/// used by tests and diagnostics.
pub fn gaussian_norms_1d(sigma: f64) -> (f64, f64) {
    (PI.sqrt() * sigma, PI.sqrt() / (2.0 * sigma))
}
