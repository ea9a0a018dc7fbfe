//! Closed-form helpers for oracles, written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Lanczos approximation (g = 7, n = 9), about 15 digits for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `ζ(q)` for `q > 1` by direct summation plus an Euler–Maclaurin tail.
pub fn zeta(q: f64) -> f64 {
    let n: f64 = 1000.0;
    let head: f64 = (1..1000).map(|k| (k as f64).powf(-q)).sum();
    head + n.powf(1.0 - q) / (q - 1.0) + 0.5 * n.powf(-q) + q / 12.0 * n.powf(-q - 1.0)
}

/// `C(N, s) = s 4^s Γ(N/2 + s) / (π^{N/2} Γ(1 − s))`.
pub fn frac_constant(dim: usize, s: f64) -> f64 {
    let n = dim as f64;
    s * 4f64.powf(s) * gamma(0.5 * n + s) / (PI.powf(0.5 * n) * gamma(1.0 - s))
}

pub fn ball_volume(dim: usize) -> f64 {
    [2.0, PI, 4.0 * PI / 3.0][dim - 1]
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `t² − 2 + 2cos t`, by its Taylor series below `0.01`.
pub fn quadratic_gap(t: f64) -> f64 {
    if t.abs() < 0.01 {
        let t2 = t * t;
        t2 * t2 / 12.0 - t2 * t2 * t2 / 360.0 + t2.powi(4) / 20160.0
    } else {
        t * t - 2.0 + 2.0 * t.cos()
    }
}
