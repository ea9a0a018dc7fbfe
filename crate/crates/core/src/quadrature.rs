//! Adaptive Gauss–Kronrod quadrature and oscillatory tail integrals.
//!
//! Every symbol in this crate reduces to one-dimensional integrals of three
//! kinds: smooth integrands on finite intervals, integrands with an
//! integrable power singularity at the left endpoint, and slowly decaying
//! oscillatory tails `∫_R^∞ cos(ωr) r^{-1-p} dr`. The first two are handled by
//! [`integrate_adaptive`]; the third by [`integrate_oscillatory_tail`], which
//! integrates a finite window panel by panel and closes the remainder with a
//! repeated integration-by-parts expansion carrying an explicit bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and switches shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Below this argument the cancellation-prone kernels (`t² − 2 + 2cos t`
    /// and relatives) are evaluated by their Taylor series.
    pub series_switch_radius: f64,
    /// Smallest radius at which an oscillatory tail may be replaced by its
    /// asymptotic expansion.
    pub tail_truncation_radius: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            series_switch_radius: 0.5,
            tail_truncation_radius: 1.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.abs_tol.is_finite()
            && self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.max_subdivisions > 0
            && self.series_switch_radius > 0.0
            && self.series_switch_radius < 1.0
            && self.tail_truncation_radius >= 1.0
            && self.tail_truncation_radius.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid quadrature configuration {self:?}")))
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

impl IntegralResult {
    const ZERO: Self = Self { value: 0.0, error_estimate: 0.0, subdivisions_used: 0 };

    fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions_used: self.subdivisions_used + other.subdivisions_used,
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Rounding floor `50·eps·∫|f|` included in `error`.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position so the refinement order is
    // fully deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { what: "integrand", at: x })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut resabs = kronrod.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Ok(Panel { a, b, value, error, floor })
}

/// Globally adaptive GK21 quadrature of `f` over `[a, b]`.
///
/// The integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are admissible. Exhausting the subdivision budget yields
/// [`Error::QuadratureBudget`] carrying the best available estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidInput(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(IntegralResult::ZERO);
    }
    let first = gk21(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut value = first.value;
    let mut error = first.error;
    let mut floor = first.floor;
    heap.push(first);
    let mut subdivisions = 0usize;
    loop {
        // Once the estimate is dominated by the rounding floor, further
        // bisection cannot improve it.
        if error <= cfg.tolerance(value).max(1.5 * floor) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        // Panels are too narrow once the midpoint can no longer separate them.
        if worst.b - worst.a <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE) {
            settled.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            let best = collect(&heap, &settled, subdivisions);
            return Err(Error::QuadratureBudget { best });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    let result = collect(&heap, &settled, subdivisions);
    if result.error_estimate > cfg.tolerance(result.value).max(1.5 * floor) && heap.is_empty() {
        return Err(Error::QuadratureBudget { best: result });
    }
    Ok(result)
}

// Re-sum in interval order so the value does not depend on refinement history.
fn collect(heap: &BinaryHeap<Panel>, settled: &[Panel], subdivisions: usize) -> IntegralResult {
    let mut panels: Vec<Panel> = heap.iter().chain(settled.iter()).copied().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error_estimate = panels.iter().map(|p| p.error).sum();
    IntegralResult { value, error_estimate, subdivisions_used: subdivisions }
}

/// `∫_0^a f(h) h^α dh` for smooth `f` and `α > −1`.
///
/// The substitution `h = a t^{1/(1+α)}` absorbs the weight, leaving
/// `a^{1+α}/(1+α) ∫_0^1 f(a t^{1/(1+α)}) dt` with a smooth integrand.
pub fn integrate_power_weighted<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(alpha > -1.0) || !(a >= 0.0) {
        return Err(Error::InvalidInput(format!("power weight needs α > −1 and a ≥ 0 (got α={alpha}, a={a})")));
    }
    if a == 0.0 {
        return Ok(IntegralResult::ZERO);
    }
    let e = 1.0 / (1.0 + alpha);
    let scale = a.powf(1.0 + alpha) * e;
    let r = integrate_adaptive(|t: f64| f(a * t.powf(e)), 0.0, 1.0, cfg)?;
    Ok(IntegralResult {
        value: scale * r.value,
        error_estimate: scale * r.error_estimate,
        subdivisions_used: r.subdivisions_used,
    })
}

/// Integrates over consecutive panels `[x_0, x_1], [x_1, x_2], ...`, splitting
/// the absolute tolerance evenly.
pub fn integrate_panels<F: Fn(f64) -> f64 + Sync>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if breakpoints.len() < 2 {
        return Ok(IntegralResult::ZERO);
    }
    let n = (breakpoints.len() - 1) as f64;
    let local = QuadratureConfig { abs_tol: cfg.abs_tol / n, ..*cfg };
    let mut total = IntegralResult::ZERO;
    for w in breakpoints.windows(2) {
        total = total.add(integrate_adaptive(&f, w[0], w[1], &local)?);
    }
    Ok(total)
}

/// Returns the segment integrals `∫_{x_{i-1}}^{x_i} f` with `x_{-1} = start`
/// for the ascending list `points`. Segments run in parallel; results are
/// collected in input order.
pub fn integrate_segments<F: Fn(f64) -> f64 + Sync>(
    f: F,
    start: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let mut edges = Vec::with_capacity(points.len() + 1);
    edges.push(start);
    edges.extend_from_slice(points);
    if edges.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("integration points must be ascending".into()));
    }
    edges
        .par_windows(2)
        .map(|w| integrate_adaptive(&f, w[0], w[1], cfg).map(|r| r.value))
        .collect()
}

/// Returns `∫_{start}^{x_i} f` for every point of the ascending list `points`.
/// The prefix sum is taken in a fixed order so the output does not depend on
/// thread scheduling.
pub fn integrate_cumulative<F: Fn(f64) -> f64 + Sync>(
    f: F,
    start: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    Ok(integrate_segments(f, start, points, cfg)?
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect())
}

/// Which trigonometric weight an oscillatory tail carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillation {
    Cos,
    Sin,
}

/// `∫_R^∞ w(ωr) r^{-1-p} dr` with `w ∈ {cos, sin}`, `p > 0`, `ω ≥ 0`, `R > 0`.
///
/// The window `[R, X]` is integrated panel by panel (geometric panels while
/// `ωr ≲ 1`, half-period panels afterwards); `[X, ∞)` uses the asymptotic
/// expansion `∫_X^∞ e^{iωr} r^{-q} = −e^{iωX}/(iωX^q) Σ_k (q)_k/(iωX)^k` whose
/// truncation remainder is bounded by `(q)_K ω^{-K} X^{1-q-K}/(q+K-1)` and
/// added to the error estimate.
pub fn integrate_oscillatory_tail(
    p: f64,
    omega: f64,
    start: f64,
    kind: Oscillation,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(p > 0.0 && p.is_finite() && omega >= 0.0 && omega.is_finite() && start > 0.0) {
        return Err(Error::InvalidInput(format!(
            "oscillatory tail needs p > 0, ω ≥ 0, R > 0 (got p={p}, ω={omega}, R={start})"
        )));
    }
    if omega == 0.0 {
        let value = match kind {
            Oscillation::Cos => start.powf(-p) / p,
            Oscillation::Sin => 0.0,
        };
        return Ok(IntegralResult { value, error_estimate: 0.0, subdivisions_used: 0 });
    }
    let q = 1.0 + p;
    let (cutoff, asym) = asymptotic_tail(q, omega, start.max(cfg.tail_truncation_radius), cfg)?;
    let asym_value = match kind {
        Oscillation::Cos => asym.0,
        Oscillation::Sin => asym.1,
    };

    let mut breaks = vec![start];
    let knee = (1.0 / omega).min(cutoff);
    let mut r = start;
    while 2.0 * r < knee {
        r *= 2.0;
        breaks.push(r);
    }
    let step = std::f64::consts::PI / omega;
    let mut x = *breaks.last().unwrap();
    while x + step < cutoff {
        x += step;
        breaks.push(x);
    }
    if cutoff > *breaks.last().unwrap() {
        breaks.push(cutoff);
    }
    let window = match kind {
        Oscillation::Cos => integrate_panels(|r: f64| (omega * r).cos() * r.powf(-q), &breaks, cfg)?,
        Oscillation::Sin => integrate_panels(|r: f64| (omega * r).sin() * r.powf(-q), &breaks, cfg)?,
    };
    Ok(IntegralResult {
        value: window.value + asym_value,
        error_estimate: window.error_estimate + asym.2,
        subdivisions_used: window.subdivisions_used,
    })
}

// Returns (X, (Re, Im, bound)) for ∫_X^∞ e^{iωr} r^{-q} dr with X ≥ lower.
fn asymptotic_tail(q: f64, omega: f64, lower: f64, cfg: &QuadratureConfig) -> Result<(f64, (f64, f64, f64))> {
    let mut x = lower.max(40.0 / omega);
    for _ in 0..60 {
        let z = omega * x;
        let lead = x.powf(-q) / omega; // 1/(ω X^q)
        let target = 0.01 * cfg.abs_tol.max(cfg.rel_tol * lead);
        // Σ_k (q)_k / (iz)^k, accumulated as a complex number.
        let (mut re, mut im) = (0.0, 0.0);
        let mut term = 1.0; // |(q)_k / z^k|
        let mut bound = f64::INFINITY;
        let mut converged = false;
        for k in 0..200usize {
            // (iz)^{-k} = (-i)^k z^{-k}
            match k % 4 {
                0 => re += term,
                1 => im -= term,
                2 => re -= term,
                _ => im += term,
            }
            let next = term * (q + k as f64) / z;
            // With K = k+1 terms kept: (q)_K ω^{-K} X^{1-q-K}/(q+K-1) = next · X^{1-q}/(q+k).
            let remainder = next * lead * z / (q + k as f64);
            if remainder < bound {
                bound = remainder;
            }
            if remainder <= target {
                converged = true;
                break;
            }
            if next >= term {
                break;
            }
            term = next;
        }
        if converged {
            // −e^{iz}/(iωX^q) · S = i e^{iz} S / (ωX^q)
            let (sz, cz) = z.sin_cos();
            let (er, ei) = (cz * re - sz * im, cz * im + sz * re);
            return Ok((x, (-ei * lead, er * lead, bound)));
        }
        x *= 2.0;
    }
    Err(Error::NonFinite { what: "asymptotic tail", at: omega })
}
