//! Cancellation-free kernels used by the radial reductions.
//!
//! Each function switches to its Taylor series below `switch`, where the
//! direct formula would lose most of its significant digits. The series is
//! summed until a term drops below machine precision relative to the sum.

/// `g(t) = t² − 2 + 2cos t = 2 Σ_{k≥2} (−1)^k t^{2k}/(2k)!`, of order `t⁴/12`.
pub fn quadratic_gap(t: f64, switch: f64) -> f64 {
    if t.abs() >= switch {
        return t * t - 2.0 + 2.0 * t.cos();
    }
    let t2 = t * t;
    // k = 2 term: t⁴/24, then ratio −t²/((2k+1)(2k+2)).
    let mut term = t2 * t2 / 24.0;
    let mut sum = term;
    let mut k = 2.0;
    loop {
        term *= -t2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        sum += term;
        k += 1.0;
        if term.abs() <= f64::EPSILON * sum.abs() || k > 40.0 {
            break;
        }
    }
    2.0 * sum
}

/// `2t²/3 − 4 + 4 sin t / t = 4 Σ_{k≥2} (−1)^k t^{2k}/(2k+1)!`.
pub fn sinc_gap(t: f64, switch: f64) -> f64 {
    if t.abs() >= switch {
        return 2.0 * t * t / 3.0 - 4.0 + 4.0 * t.sin() / t;
    }
    let t2 = t * t;
    let mut term = t2 * t2 / 120.0;
    let mut sum = term;
    let mut k = 2.0;
    loop {
        term *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
        k += 1.0;
        if term.abs() <= f64::EPSILON * sum.abs() || k > 40.0 {
            break;
        }
    }
    4.0 * sum
}

/// `Σ_{k≥2} (−1)^k t^{2k} / (4^k (k!)²)`, i.e. `J₀(t) − 1 + t²/4`.
pub fn bessel_gap(t: f64) -> f64 {
    let q = t * t / 4.0;
    let mut term = q * q / 4.0;
    let mut sum = term;
    let mut k = 2.0;
    loop {
        term *= -q / ((k + 1.0) * (k + 1.0));
        sum += term;
        k += 1.0;
        if term.abs() <= f64::EPSILON * sum.abs() || k > 200.0 {
            break;
        }
    }
    sum
}

/// `sin t / t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Hurwitz zeta `ζ(q, a) = Σ_{n≥0} (n + a)^{-q}` for `q > 1`, `a > 0`.
///
/// Direct summation of the first terms followed by an Euler–Maclaurin
/// remainder with six Bernoulli corrections.
pub fn hurwitz_zeta(q: f64, a: f64) -> f64 {
    debug_assert!(q > 1.0 && a > 0.0);
    const DIRECT: usize = 24;
    // B_{2k}/(2k)! for k = 1..6
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for n in 0..DIRECT {
        sum += (n as f64 + a).powf(-q);
    }
    let x = DIRECT as f64 + a;
    let fx = x.powf(-q);
    sum += x * fx / (q - 1.0) + 0.5 * fx;
    // f^{(2k-1)}(x) = −(q)_{2k-1} x^{-q-2k+1}; the remainder is −Σ B_{2k}/(2k)! f^{(2k-1)}.
    let mut poch = q; // (q)_{2k-1}
    let mut pow = fx / x; // x^{-q-1}
    for (k, b) in B.iter().enumerate() {
        sum += b * poch * pow;
        let j = 2.0 * k as f64 + 1.0;
        poch *= (q + j) * (q + j + 1.0);
        pow /= x * x;
    }
    sum
}
