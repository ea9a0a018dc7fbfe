//! The operators generated by the fractional and limit energies.
//!
//! Every operator here is a radial Fourier multiplier on the grid:
//!
//! * `(−Δ)^s` with symbol `|ξ|^{2s}`;
//! * the rate operator `[ω_N(−Δ) − 4(1−s)C(N,s)^{-1}(−Δ)^s]/(1−s)`, the
//!   first variation of the rate functional, with symbol `2M_s`;
//! * 𝔏, the first variation of the limit functional, with symbol `2M_∞`.
//!
//! 𝔏 is also evaluated pointwise from its singular-integral definition on
//! closed-form profiles, which is the independent check on the multiplier.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{map_spectrum, same_grid, to_field, to_spectrum, Field, PointProfile};
use crate::geometry::{check_dim, sphere_measure};
use crate::quadrature::{integrate_adaptive, integrate_segments, QuadratureConfig};
use crate::symbols::{check_order, GridSymbols, Symbol};

/// Below this radius the inner-ball integrand of 𝔏 is fitted by `ar + br³`
/// instead of evaluated; the second difference loses every digit as `r → 0`.
const INNER_FIT_RADIUS: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "s", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperatorSpec {
    FracLaplacian(f64),
    RateOperator(f64),
    LimitOperator,
}

impl OperatorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OperatorSpec::FracLaplacian(s) if !(s > 0.0 && s <= 1.0) => {
                Err(Error::InvalidInput(format!("fractional Laplacian order must lie in (0, 1] (got {s})")))
            }
            OperatorSpec::RateOperator(s) => check_order(s),
            _ => Ok(()),
        }
    }

    /// Symbol values per mode, in spectral storage order.
    pub fn symbol(&self, bank: &GridSymbols) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match *self {
            OperatorSpec::FracLaplacian(s) => bank.per_mode(Symbol::FracLaplacian(s))?,
            OperatorSpec::RateOperator(s) => bank.per_mode(Symbol::Rate(s))?.into_iter().map(|v| 2.0 * v).collect(),
            OperatorSpec::LimitOperator => bank.per_mode(Symbol::LOperator)?,
        })
    }

    pub fn label(&self) -> String {
        match *self {
            OperatorSpec::FracLaplacian(s) => format!("FRAC_LAPLACIAN({s})"),
            OperatorSpec::RateOperator(s) => format!("RATE_OPERATOR({s})"),
            OperatorSpec::LimitOperator => "LIMIT_OPERATOR".to_string(),
        }
    }
}

/// Multiplies `û` by a per-mode symbol and transforms back.
pub fn apply_symbol(values: &[f64], u: &Field) -> Result<Field> {
    if values.len() != u.grid.len() {
        return Err(Error::GridMismatch(format!("{} symbol values for {} modes", values.len(), u.grid.len())));
    }
    let spec = to_spectrum(u);
    to_field(&map_spectrum(&spec, |i| Complex64::new(values[i], 0.0)))
}

pub fn apply_spectral(op: OperatorSpec, u: &Field, bank: &GridSymbols) -> Result<Field> {
    same_grid(&u.grid, bank.grid())?;
    apply_symbol(&op.symbol(bank)?, u)
}

/// `∫_S g(σ) dσ` over the unit sphere.
fn sphere_integral<G: Fn(&[f64]) -> f64>(dim: usize, g: G, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(match dim {
        1 => g(&[1.0]) + g(&[-1.0]),
        2 => integrate_adaptive(|t: f64| g(&[t.cos(), t.sin()]), 0.0, 2.0 * PI, cfg)?.value,
        _ => {
            let polar = |th: f64| -> Result<f64> {
                let (st, ct) = th.sin_cos();
                let ring = integrate_adaptive(|p: f64| g(&[st * p.cos(), st * p.sin(), ct]), 0.0, 2.0 * PI, cfg)?;
                Ok(st * ring.value)
            };
            // Propagate inner failures through a side channel; the outer
            // integrand itself must be infallible.
            let failure = std::cell::RefCell::new(None);
            let v = integrate_adaptive(
                |th: f64| {
                    polar(th).unwrap_or_else(|e| {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    })
                },
                0.0,
                PI,
                cfg,
            )?
            .value;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            v
        }
    })
}

/// `(𝔏φ)(x)` from the singular-integral definition
///
/// `−2Nω_Nφ(x) + 4∫_{B^c} φ(x+h)|h|^{-N-2} − 2∫_B (2φ(x) − φ(x+h) − φ(x−h) + h·∇²φ(x)h)|h|^{-N-2}`.
///
/// Both integrals are taken in polar form, `∫ r^{-3} ∫_S (·) dσ dr`. The
/// outer one stops at `support + |x|`, past which `φ(x+h)` vanishes (below
/// `1e-17` for Gaussians). The inner integrand is `O(r)`.
pub fn apply_l_realspace<P: PointProfile + ?Sized>(phi: &P, x: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let dim = phi.dim();
    check_dim(dim)?;
    if x.len() < dim {
        return Err(Error::InvalidInput(format!("point has {} coordinates, need {dim}", x.len())));
    }
    let shifted = |r: f64, sg: &[f64], sign: f64| -> f64 {
        let mut y = [0.0; 3];
        for a in 0..dim {
            y[a] = x[a] + sign * r * sg[a];
        }
        phi.value(&y)
    };
    let centre = phi.value(x);
    let hess = phi.hessian(x);
    let quad_form = |sg: &[f64]| -> f64 {
        let mut q = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                q += sg[a] * hess[a][b] * sg[b];
            }
        }
        q
    };

    // r^{-3} ∫_S Δ(r, σ) dσ
    let inner_density = |r: f64| -> Result<f64> {
        let avg = sphere_integral(
            dim,
            |sg| 2.0 * centre - shifted(r, sg, 1.0) - shifted(r, sg, -1.0) + r * r * quad_form(sg),
            cfg,
        )?;
        Ok(avg / (r * r * r))
    };
    // The density is odd in r: fit a r + b r³ through δ and δ/2.
    let d = INNER_FIT_RADIUS;
    let f1 = inner_density(d)?;
    let f2 = inner_density(0.5 * d)?;
    let b = (f1 - 2.0 * f2) / (0.75 * d * d * d);
    let a = (f1 - b * d * d * d) / d;
    let near = 0.5 * a * d * d + 0.25 * b * d.powi(4);
    let far_inner = integrate_fallible(inner_density, d, 1.0, cfg)?;
    let inner = near + far_inner;

    let norm_x: f64 = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
    let reach = phi.support_radius() + norm_x;
    let outer = if reach <= 1.0 {
        0.0
    } else {
        let edges: Vec<f64> = (2..=reach.ceil() as usize).map(|k| (k as f64).min(reach)).collect();
        let pieces = integrate_segments(
            |r: f64| match sphere_integral(dim, |sg| shifted(r, sg, 1.0), cfg) {
                Ok(v) => v / (r * r * r),
                Err(_) => f64::NAN,
            },
            1.0,
            &edges,
            cfg,
        )?;
        let total: f64 = pieces.iter().sum();
        if !total.is_finite() {
            return Err(Error::NonFinite { what: "outer integral of 𝔏", at: norm_x });
        }
        total
    };

    Ok(-2.0 * sphere_measure(dim) * centre + 4.0 * outer - 2.0 * inner)
}

fn integrate_fallible<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let v = integrate_adaptive(
        |t| {
            f(t).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                0.0
            })
        },
        a,
        b,
        cfg,
    )?
    .value;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Energy whose first variation is checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "s", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VariationEnergy {
    Rate(f64),
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationReport {
    pub energy: VariationEnergy,
    pub eps: f64,
    /// `(E(u+εφ) − E(u−εφ))/(2ε)`.
    pub difference_quotient: f64,
    /// `⟨Op u, φ⟩` in real space.
    pub pairing: f64,
    /// `|difference_quotient − pairing| / max(|pairing|, |difference_quotient|)`, 0 if both vanish.
    pub relative_gap: f64,
}

/// Compares a central difference of the energy with the operator pairing.
///
/// The energy side uses the split rate symbol (or `M_∞`); the operator side
/// applies the rate operator in its unsplit form (or the 𝔏 symbol
/// `−2Nω_N + 4c_1 + 2m`) and pairs in real space. For quadratic energies the
/// central difference is exact, so the gap measures only the agreement of
/// the two evaluations.
pub fn first_variation_check(
    energy: VariationEnergy,
    u: &Field,
    phi: &Field,
    eps: f64,
    bank: &GridSymbols,
) -> Result<VariationReport> {
    if !(1e-6..=1e-2).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps must lie in [1e-6, 1e-2] (got {eps})")));
    }
    same_grid(&u.grid, &phi.grid)?;
    same_grid(&u.grid, bank.grid())?;
    let (energy_symbol, operator_symbol) = match energy {
        VariationEnergy::Rate(s) => {
            check_order(s)?;
            (Symbol::Rate(s), Symbol::RateOperatorUnsplit(s))
        }
        VariationEnergy::Limit => (Symbol::Limit, Symbol::LOperator),
    };
    let e = |v: &Field| bank.quadratic_form(energy_symbol, &to_spectrum(v));
    let plus = e(&u.combine(1.0, phi, eps)?)?;
    let minus = e(&u.combine(1.0, phi, -eps)?)?;
    let difference_quotient = (plus - minus) / (2.0 * eps);
    let op_u = apply_symbol(&bank.per_mode(operator_symbol)?, u)?;
    let pairing = op_u.inner(phi)?;
    let scale = difference_quotient.abs().max(pairing.abs());
    let relative_gap = if scale == 0.0 { 0.0 } else { (difference_quotient - pairing).abs() / scale };
    Ok(VariationReport { energy, eps, difference_quotient, pairing, relative_gap })
}
