use std::fmt;
use std::io::Write;

use serde::Serialize;

use super::{cos_tail_column, singular_ball_column, Normalization};
use crate::error::{Error, Result};
use crate::fmtnum::sig12;
use crate::geometry::{check_dim, sphere_measure, unit_ball_volume};
use crate::quadrature::QuadratureConfig;

/// A fractional order or the limit `s → 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Fractional(f64),
    Limit,
}

impl Order {
    /// Accepts `LIMIT` or a number.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("limit") {
            return Ok(Order::Limit);
        }
        t.parse::<f64>()
            .map(Order::Fractional)
            .map_err(|_| Error::Parse(format!("order must be a number or LIMIT (got '{t}')")))
    }

    /// Kernel exponent: `s`, or 1 for the limit.
    pub fn exponent(&self) -> f64 {
        match *self {
            Order::Fractional(s) => s,
            Order::Limit => 1.0,
        }
    }
}

/// A number, or the string `LIMIT`.
impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Order::Fractional(s) => ser.serialize_f64(s),
            Order::Limit => ser.serialize_str("LIMIT"),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Fractional(s) => write!(f, "{s}"),
            Order::Limit => write!(f, "LIMIT"),
        }
    }
}

/// One row of a symbol table.
///
/// For a `LIMIT` table `phi_s` holds `(ω_N/2)|ξ|²`, the limit of
/// `(1−s)Φ_s`, and `rate_m` coincides with `limit_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolRow {
    pub xi: f64,
    pub phi_s: f64,
    pub m: f64,
    pub tail_t: f64,
    pub cos_tail: f64,
    pub rate_m: f64,
    pub limit_m: f64,
    pub l_symbol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolTable {
    pub dim: usize,
    pub order: Order,
    pub rows: Vec<SymbolRow>,
}

pub const TABLE_HEADER: &str = "xi,phi_s,m,tail_T,cos_tail,rate_M,limit_M,L_symbol";

impl SymbolTable {
    /// Evaluates every column at the given radii (any order, duplicates
    /// allowed); rows keep the input order.
    pub fn build(dim: usize, order: Order, xi: &[f64], cfg: &QuadratureConfig) -> Result<Self> {
        check_dim(dim)?;
        cfg.validate()?;
        if xi.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidInput("radii must be finite and non-negative".into()));
        }
        let mut sorted: Vec<f64> = xi.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let lookup = |x: f64| sorted.binary_search_by(|p| p.total_cmp(&x)).unwrap();
        let s = order.exponent();
        let norm = match order {
            Order::Fractional(s) => Some(Normalization::new(dim, s, cfg)?),
            Order::Limit => None,
        };
        let m = singular_ball_column(dim, 1.0, &sorted, cfg)?;
        let cos_1 = cos_tail_column(dim, 1.0, &sorted, cfg)?;
        let cos_s = if norm.is_some() { cos_tail_column(dim, s, &sorted, cfg)? } else { cos_1.clone() };
        let nw = sphere_measure(dim);
        let rows = xi
            .iter()
            .map(|&x| {
                let i = lookup(x);
                let limit_m = m[i] - (nw - 2.0 * cos_1[i]);
                let (phi_s, rate_m) = match &norm {
                    Some(n) => (n.phi(x), n.rate(x)),
                    None => (0.5 * unit_ball_volume(dim) * x * x, limit_m),
                };
                SymbolRow {
                    xi: x,
                    phi_s,
                    m: m[i],
                    tail_t: nw / s - 2.0 * cos_s[i],
                    cos_tail: cos_s[i],
                    rate_m,
                    limit_m,
                    l_symbol: -2.0 * nw + 4.0 * cos_1[i] + 2.0 * m[i],
                }
            })
            .collect();
        Ok(Self { dim, order, rows })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TABLE_HEADER}")?;
        for r in &self.rows {
            let cols = [r.xi, r.phi_s, r.m, r.tail_t, r.cos_tail, r.rate_m, r.limit_m, r.l_symbol];
            let line: Vec<String> = cols.iter().map(|v| sig12(*v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}
