//! Dimension-dependent constants.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Checked spatial dimension, `N ∈ {1, 2, 3}`.
pub fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("dimension must be 1, 2 or 3 (got {n})")))
    }
}

/// Volume `ω_N` of the unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Surface measure `N ω_N` of the unit sphere.
pub fn sphere_measure(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}
