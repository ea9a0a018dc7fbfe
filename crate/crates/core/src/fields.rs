//! Uniform periodic grids, sampled fields and their unitary spectra.
//!
//! A grid on `[−L/2, L/2)^N` with `M` points per axis carries the unitary
//! transform `û(ξ) = (2π)^{-N/2} ∫ e^{-ix·ξ} u(x) dx` discretized as
//! `û_k = (2π)^{-N/2} Δx^N Σ_j u_j e^{-iξ_k·x_j}` at `ξ_k = 2πk/L`,
//! `k ∈ [−M/2, M/2)`. Plancherel then reads `Σ|u_j|²Δx^N = Σ|û_k|²Δξ^N`.
//! Coefficients are stored in FFT order along each axis.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmtnum::sig12;
use crate::geometry::{check_dim, unit_ball_volume};

/// Relative amplitude below which a sample counts as outside the support.
pub const SUPPORT_TOL: f64 = 1e-14;
/// Spectral tail ratio above which a field is reported as under-resolved.
pub const RESOLUTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "M")]
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        let g = Self { dim, length, points };
        g.validate()?;
        Ok(g)
    }

    /// Default box for each dimension.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 40.0, 1024),
            2 => Self::new(2, 20.0, 128),
            3 => Self::new(3, 10.0, 64),
            _ => Err(Error::InvalidInput(format!("dimension must be 1, 2 or 3 (got {dim})"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidInput(format!("box length must be positive (got {})", self.length)));
        }
        if self.points < 8 || self.points % 2 != 0 {
            return Err(Error::InvalidInput(format!("M must be even and ≥ 8 (got {})", self.points)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `Δx^N`.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Dual cell volume `Δξ^N`.
    pub fn dual_cell(&self) -> f64 {
        self.dxi().powi(self.dim as i32)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    /// Multi-index of a linear index; axis 0 varies slowest.
    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coordinate(m[a]);
        }
        x
    }

    /// Signed wavenumber index of FFT slot `j`.
    pub fn signed_mode(&self, j: usize) -> i64 {
        let m = self.points as i64;
        let j = j as i64;
        if j < m / 2 {
            j
        } else {
            j - m
        }
    }

    /// Signed mode indices of a linear spectral index.
    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let m = self.multi_index(idx);
        let mut k = [0; 3];
        for a in 0..self.dim {
            k[a] = self.signed_mode(m[a]);
        }
        k
    }

    /// `Σ_a k_a²`, the integer key of `|ξ|² = Δξ² Σ k_a²`.
    pub fn mode_norm_sq(&self, idx: usize) -> u64 {
        self.modes(idx).iter().map(|k| (k * k) as u64).sum()
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.modes(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.dxi() * k[a] as f64;
        }
        xi
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.points / 2
    }
}

/// Initial profiles available for sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `exp(−|x|²/(2σ²))`.
    Gaussian { sigma: f64 },
    /// `exp(−1/(1 − |x|²/r²))` on `|x| < r`, zero outside.
    SmoothBump { radius: f64 },
    /// Defined through `û(ξ) = (1 + |ξ|²)^{-β/2}`.
    SpectralDecay { beta: f64 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            Profile::Gaussian { sigma } => ("sigma", sigma),
            Profile::SmoothBump { radius } => ("radius", radius),
            Profile::SpectralDecay { beta } => ("beta", beta),
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("profile parameter {name} must be positive (got {v})")))
        }
    }

    /// Short label such as `gaussian(1)`.
    pub fn label(&self) -> String {
        match *self {
            Profile::Gaussian { sigma } => format!("gaussian({sigma})"),
            Profile::SmoothBump { radius } => format!("smooth_bump({radius})"),
            Profile::SpectralDecay { beta } => format!("spectral_decay({beta})"),
        }
    }

    /// Parses `gaussian(1)`, `smooth_bump(0.5)`, `spectral_decay(3)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let err = || Error::Parse(format!("unrecognised profile '{t}'"));
        let open = t.find('(').ok_or_else(err)?;
        if !t.ends_with(')') {
            return Err(err());
        }
        let v: f64 = t[open + 1..t.len() - 1].trim().parse().map_err(|_| err())?;
        let p = match &t[..open] {
            "gaussian" => Profile::Gaussian { sigma: v },
            "smooth_bump" | "bump" => Profile::SmoothBump { radius: v },
            "spectral_decay" => Profile::SpectralDecay { beta: v },
            _ => return Err(err()),
        };
        p.validate()?;
        Ok(p)
    }

    /// Closed-form value, gradient and Hessian, if the profile has them.
    pub fn analytic(&self, dim: usize) -> Option<Analytic> {
        match *self {
            Profile::Gaussian { .. } | Profile::SmoothBump { .. } => Some(Analytic { profile: *self, dim }),
            Profile::SpectralDecay { .. } => None,
        }
    }
}

/// What real-space operators need from a smooth test function.
pub trait PointProfile: Sync {
    fn dim(&self) -> usize;
    /// Radius outside which the function is negligible.
    fn support_radius(&self) -> f64;
    fn value(&self, x: &[f64]) -> f64;
    fn hessian(&self, x: &[f64]) -> [[f64; 3]; 3];
}

impl PointProfile for Analytic {
    fn dim(&self) -> usize {
        Analytic::dim(self)
    }
    fn support_radius(&self) -> f64 {
        Analytic::support_radius(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        Analytic::value(self, x)
    }
    fn hessian(&self, x: &[f64]) -> [[f64; 3]; 3] {
        Analytic::hessian(self, x)
    }
}

/// A profile with pointwise value, gradient and Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    profile: Profile,
    dim: usize,
}

impl Analytic {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Radius outside which the profile is below `1e-17` (zero for bumps).
    pub fn support_radius(&self) -> f64 {
        match self.profile {
            Profile::Gaussian { sigma } => sigma * (2.0 * 17.0 * std::f64::consts::LN_10).sqrt(),
            Profile::SmoothBump { radius } => radius,
            Profile::SpectralDecay { .. } => unreachable!(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x[..self.dim].iter().map(|v| v * v).sum();
        match self.profile {
            Profile::Gaussian { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
            Profile::SmoothBump { radius } => {
                let q = 1.0 - r2 / (radius * radius);
                if q > 0.0 {
                    (-1.0 / q).exp()
                } else {
                    0.0
                }
            }
            Profile::SpectralDecay { .. } => unreachable!(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> [f64; 3] {
        let mut g = [0.0; 3];
        let r2: f64 = x[..self.dim].iter().map(|v| v * v).sum();
        let factor = match self.profile {
            Profile::Gaussian { sigma } => -self.value(x) / (sigma * sigma),
            Profile::SmoothBump { radius } => {
                let q = 1.0 - r2 / (radius * radius);
                if q <= 0.0 {
                    return g;
                }
                -2.0 * self.value(x) / (radius * radius * q * q)
            }
            Profile::SpectralDecay { .. } => unreachable!(),
        };
        for a in 0..self.dim {
            g[a] = factor * x[a];
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        let r2: f64 = x[..self.dim].iter().map(|v| v * v).sum();
        let phi = self.value(x);
        // H = α x xᵀ + γ I
        let (alpha, gamma) = match self.profile {
            Profile::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                (phi / (s2 * s2), -phi / s2)
            }
            Profile::SmoothBump { radius } => {
                let r_2 = radius * radius;
                let q = 1.0 - r2 / r_2;
                if q <= 0.0 {
                    return h;
                }
                let q2 = q * q;
                (phi * (4.0 / (r_2 * r_2 * q2 * q2) - 8.0 / (r_2 * r_2 * q2 * q)), -2.0 * phi / (r_2 * q2))
            }
            Profile::SpectralDecay { .. } => unreachable!(),
        };
        for a in 0..self.dim {
            for b in 0..self.dim {
                h[a][b] = alpha * x[a] * x[b] + if a == b { gamma } else { 0.0 };
            }
        }
        h
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    /// Largest `|x|` at which `|u| > SUPPORT_TOL · max|u|`.
    pub support_radius: f64,
}

impl Field {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field sample", at: i as f64 });
        }
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cut = SUPPORT_TOL * peak;
        let mut support = 0.0f64;
        for (i, v) in values.iter().enumerate() {
            if v.abs() > cut {
                let x = grid.point(i);
                let r = x[..grid.dim].iter().map(|c| c * c).sum::<f64>().sqrt();
                support = support.max(r);
            }
        }
        Ok(Self { grid, values, support_radius: support })
    }

    pub fn zeros(grid: GridSpec) -> Result<Self> {
        Self::from_values(grid, vec![0.0; grid.len()])
    }

    /// `a·self + b·other` on the same grid.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Field::from_values(self.grid, values)
    }

    /// Largest `|u|` on the faces of the box (index 0 along some axis).
    pub fn boundary_max(&self) -> f64 {
        let mut m = 0.0f64;
        for (i, v) in self.values.iter().enumerate() {
            let idx = self.grid.multi_index(i);
            if idx[..self.grid.dim].iter().any(|&j| j == 0) {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Real-space `⟨u, v⟩ = Σ u_j v_j Δx^N`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        same_grid(&self.grid, &other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell())
    }
}

pub(crate) fn same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

/// Unitary transform coefficients in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// Largest coefficient in the outer band `max_a |k_a| ≥ 3M/8`, relative to
    /// the largest coefficient overall.
    pub fn tail_ratio(&self) -> f64 {
        let band = (3 * self.grid.points / 8) as i64;
        let (mut peak, mut tail) = (0.0f64, 0.0f64);
        for (i, c) in self.coeffs.iter().enumerate() {
            let a = c.norm();
            peak = peak.max(a);
            if self.grid.modes(i)[..self.grid.dim].iter().any(|k| k.abs() >= band) {
                tail = tail.max(a);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.tail_ratio() <= RESOLUTION_TOL
    }

    /// `Σ w(|ξ_k|) |û_k|² Δξ^N` for a radial weight given per mode.
    pub fn weighted_norm_sq<W: Fn(usize) -> f64>(&self, weight: W) -> f64 {
        let s: f64 = self.coeffs.iter().enumerate().map(|(i, c)| weight(i) * c.norm_sqr()).sum();
        s * self.grid.dual_cell()
    }
}

/// Samples a profile on a grid.
pub fn sample(grid: &GridSpec, profile: &Profile) -> Result<Field> {
    grid.validate()?;
    profile.validate()?;
    match profile.analytic(grid.dim) {
        Some(a) => {
            let values = (0..grid.len()).map(|i| a.value(&grid.point(i))).collect();
            Field::from_values(*grid, values)
        }
        None => {
            let Profile::SpectralDecay { beta } = *profile else { unreachable!() };
            let coeffs = (0..grid.len())
                .map(|i| {
                    let xi = grid.wavevector(i);
                    let r2: f64 = xi[..grid.dim].iter().map(|v| v * v).sum();
                    Complex64::new((1.0 + r2).powf(-0.5 * beta), 0.0)
                })
                .collect();
            to_field(&Spectrum { grid: *grid, coeffs })
        }
    }
}

fn fft_nd(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let m = grid.points;
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..grid.dim {
        let stride = m.pow((grid.dim - 1 - axis) as u32);
        let outer = data.len() / (m * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * m * stride + inner;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

// (−1)^{Σk_a}: the phase of the box offset −L/2.
fn parity(grid: &GridSpec, idx: usize) -> f64 {
    let m = grid.multi_index(idx);
    if m[..grid.dim].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_spectrum(u: &Field) -> Spectrum {
    let g = u.grid;
    let mut data: Vec<Complex64> = u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&g, &mut data, false);
    let scale = (2.0 * PI).powf(-(g.dim as f64) / 2.0) * g.cell();
    for (i, c) in data.iter_mut().enumerate() {
        *c *= scale * parity(&g, i);
    }
    Spectrum { grid: g, coeffs: data }
}

/// Inverse transform; the imaginary part is discarded.
pub fn to_field(s: &Spectrum) -> Result<Field> {
    let g = s.grid;
    let mut data: Vec<Complex64> = s.coeffs.iter().enumerate().map(|(i, c)| c * parity(&g, i)).collect();
    fft_nd(&g, &mut data, true);
    let scale = (2.0 * PI).powf(g.dim as f64 / 2.0) / (g.cell() * g.len() as f64);
    Field::from_values(g, data.iter().map(|c| c.re * scale).collect())
}

/// Applies a mode-wise complex multiplier.
pub(crate) fn map_spectrum<F: Fn(usize) -> Complex64>(s: &Spectrum, f: F) -> Spectrum {
    Spectrum {
        grid: s.grid,
        coeffs: s.coeffs.iter().enumerate().map(|(i, c)| c * f(i)).collect(),
    }
}

fn warn_unresolved(s: &Spectrum, what: &str) {
    let r = s.tail_ratio();
    if r > RESOLUTION_TOL {
        log::warn!("{what}: spectral tail ratio {r:.3e} exceeds {RESOLUTION_TOL:e}; derivatives may be inaccurate");
    }
}

/// Spectral gradient `∂_a u ↔ iξ_a û`, Nyquist modes zeroed.
pub fn gradient(u: &Field) -> Result<Vec<Field>> {
    let s = to_spectrum(u);
    warn_unresolved(&s, "gradient");
    let g = u.grid;
    (0..g.dim)
        .map(|a| {
            let d = map_spectrum(&s, |i| {
                let m = g.multi_index(i);
                if g.is_nyquist(m[a]) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, g.wavevector(i)[a])
                }
            });
            to_field(&d)
        })
        .collect()
}

/// Spectral Hessian `∂_a∂_b u ↔ −ξ_aξ_b û`; mixed derivatives drop the
/// Nyquist modes of both axes.
pub fn hessian(u: &Field) -> Result<Vec<Vec<Field>>> {
    let s = to_spectrum(u);
    warn_unresolved(&s, "hessian");
    let g = u.grid;
    (0..g.dim)
        .map(|a| {
            (0..g.dim)
                .map(|b| {
                    let d = map_spectrum(&s, |i| {
                        let m = g.multi_index(i);
                        if a != b && (g.is_nyquist(m[a]) || g.is_nyquist(m[b])) {
                            return Complex64::new(0.0, 0.0);
                        }
                        let xi = g.wavevector(i);
                        Complex64::new(-xi[a] * xi[b], 0.0)
                    });
                    to_field(&d)
                })
                .collect()
        })
        .collect()
}

pub fn l2_norm_sq(u: &Field) -> f64 {
    u.values.iter().map(|v| v * v).sum::<f64>() * u.grid.cell()
}

/// `𝒢¹(u) = (ω_N/2) Σ |ξ|² |û|² Δξ^N`.
pub fn dirichlet_energy(u: &Field) -> f64 {
    dirichlet_energy_spectrum(&to_spectrum(u))
}

pub fn dirichlet_energy_spectrum(s: &Spectrum) -> f64 {
    let g = s.grid;
    let dxi2 = g.dxi() * g.dxi();
    0.5 * unit_ball_volume(g.dim) * s.weighted_norm_sq(|i| dxi2 * g.mode_norm_sq(i) as f64)
}

/// Writes `x1[,x2[,x3]],value` rows, twelve significant digits.
pub fn write_csv<W: Write>(u: &Field, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let header = ["x1", "x2", "x3"][..u.grid.dim].join(",");
    writeln!(w, "{header},value")?;
    for (i, v) in u.values.iter().enumerate() {
        let x = u.grid.point(i);
        for c in &x[..u.grid.dim] {
            write!(w, "{},", sig12(*c))?;
        }
        writeln!(w, "{}", sig12(*v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Field> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))??;
    let dim = header.split(',').count() - 1;
    check_dim(dim)?;
    let mut first = None;
    let mut second = None;
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number in '{line}'"))))
            .collect::<Result<_>>()?;
        if cols.len() != dim + 1 {
            return Err(Error::Parse(format!("expected {} columns in '{line}'", dim + 1)));
        }
        // The last axis varies fastest; its first two entries fix x₀ and Δx.
        if first.is_none() {
            first = Some(cols[dim - 1]);
        } else if second.is_none() {
            second = Some(cols[dim - 1]);
        }
        values.push(cols[dim]);
    }
    let m = (values.len() as f64).powf(1.0 / dim as f64).round() as usize;
    let (x0, x1) = match (first, second) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Parse("field file too short".into())),
    };
    let dx = x1 - x0;
    let length = m as f64 * dx;
    if ((-0.5 * length) - x0).abs() > 1e-9 * length {
        return Err(Error::Parse("grid must start at −L/2".into()));
    }
    Field::from_values(GridSpec::new(dim, length, m)?, values)
}

/// Raw little-endian layout: `N: u64, L: f64, M: u64`, then `M^N` f64 samples
/// in row-major order.
pub fn write_binary<W: Write>(u: &Field, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(&(u.grid.dim as u64).to_le_bytes())?;
    w.write_all(&u.grid.length.to_le_bytes())?;
    w.write_all(&(u.grid.points as u64).to_le_bytes())?;
    for v in &u.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Field> {
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let dim = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let points = u64::from_le_bytes(b8) as usize;
    let grid = GridSpec::new(dim, length, points)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        input.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Field::from_values(grid, values)
}

pub fn save(u: &Field, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_csv(u, f),
        _ => write_binary(u, f),
    }
}

pub fn load(path: &Path) -> Result<Field> {
    let f = std::fs::File::open(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(f),
        _ => read_binary(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // û(ξ) = σ e^{-σ²ξ²/2} for σ = 1 in one dimension.
        let g = GridSpec::new(1, 40.0, 256).unwrap();
        let u = sample(&g, &Profile::Gaussian { sigma: 1.0 }).unwrap();
        let s = to_spectrum(&u);
        for (i, c) in s.coeffs.iter().enumerate() {
            let xi = g.wavevector(i)[0];
            assert!((c.re - (-xi * xi / 2.0).exp()).abs() < 1e-13, "mode {i}");
            assert!(c.im.abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let g = GridSpec::new(2, 20.0, 32).unwrap();
        let u = sample(&g, &Profile::SmoothBump { radius: 3.0 }).unwrap();
        let v = to_field(&to_spectrum(&u)).unwrap();
        let err = u.values.iter().zip(&v.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn plancherel() {
        let g = GridSpec::new(3, 10.0, 16).unwrap();
        let u = sample(&g, &Profile::Gaussian { sigma: 1.0 }).unwrap();
        let s = to_spectrum(&u);
        let lhs = l2_norm_sq(&u);
        let rhs = s.weighted_norm_sq(|_| 1.0);
        assert!((lhs - rhs).abs() < 1e-13 * lhs);
    }

    #[test]
    fn gaussian_dirichlet_energy() {
        // (ω₁/2)‖u'‖² = ‖u'‖² = √π/2 for σ = 1.
        let g = GridSpec::default_for(1).unwrap();
        let u = sample(&g, &Profile::Gaussian { sigma: 1.0 }).unwrap();
        let expect = PI.sqrt() / 2.0;
        assert!((dirichlet_energy(&u) - expect).abs() < 1e-12);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let a = Profile::SmoothBump { radius: 1.3 }.analytic(2).unwrap();
        let x = [0.3, -0.4, 0.0];
        let h = 1e-5;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (a.value(&xp) - a.value(&xm)) / (2.0 * h);
            assert!((fd - a.gradient(&x)[i]).abs() < 1e-8);
            for j in 0..2 {
                let fd = (a.gradient(&xp)[j] - a.gradient(&xm)[j]) / (2.0 * h);
                assert!((fd - a.hessian(&x)[i][j]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn profile_labels_parse_back() {
        for p in [
            Profile::Gaussian { sigma: 1.0 },
            Profile::SmoothBump { radius: 0.5 },
            Profile::SpectralDecay { beta: 3.0 },
        ] {
            assert_eq!(Profile::parse(&p.label()).unwrap(), p);
        }
        assert!(Profile::parse("cauchy(1)").is_err());
    }

    #[test]
    fn rejects_odd_grids() {
        assert!(GridSpec::new(1, 10.0, 9).is_err());
        assert!(GridSpec::new(4, 10.0, 16).is_err());
        assert!(GridSpec::new(1, -1.0, 16).is_err());
    }
}
