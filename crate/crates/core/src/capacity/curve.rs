use serde::Serialize;

use super::optimizer::{wtc2_ss_capacity_with, CapacityMethod, OptimizerConfig};
use crate::error::{Error, Result};
use crate::numeric::ser_f64;
use crate::probability::Channel;

pub const CONVEXITY_TOLERANCE: f64 = 1e-6;
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub method: CapacityMethod,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityCurve {
    pub points: Vec<CurvePoint>,
    pub non_increasing: bool,
    pub convex: bool,
    /// Smallest spacing-weighted second difference; `inf` with fewer than 3 points.
    #[serde(serialize_with = "ser_f64")]
    pub min_second_difference: f64,
    #[serde(serialize_with = "ser_f64")]
    pub log2_output_size: f64,
    pub bounded: bool,
    pub any_flagged: bool,
}

/// `C(α)` over `grid`, with the shape checks.
pub fn capacity_curve(main: &Channel, grid: &[f64], u_card: usize, cfg: &OptimizerConfig) -> Result<CapacityCurve> {
    if grid.is_empty() {
        return Err(Error::validation("grid", "empty"));
    }
    for (i, a) in grid.iter().enumerate() {
        if !(0.0..=1.0).contains(a) {
            return Err(Error::validation(format!("grid[{i}]"), format!("{a} is not in [0, 1]")));
        }
        if i > 0 && *a <= grid[i - 1] {
            return Err(Error::validation(format!("grid[{i}]"), "grid must be strictly increasing"));
        }
    }
    let mut points = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let r = wtc2_ss_capacity_with(main, alpha, u_card, cfg)?;
        points.push(CurvePoint { alpha, value: r.value, method: r.method, flagged: r.flagged });
    }
    let v: Vec<f64> = points.iter().map(|p| p.value).collect();
    let non_increasing = v.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOLERANCE);
    let mut min_sd = f64::INFINITY;
    for k in 1..v.len().saturating_sub(1) {
        let h1 = grid[k] - grid[k - 1];
        let h2 = grid[k + 1] - grid[k];
        let sd = ((v[k + 1] - v[k]) / h2 - (v[k] - v[k - 1]) / h1) * 0.5 * (h1 + h2);
        min_sd = min_sd.min(sd);
    }
    let log2_y = (main.output_len() as f64).log2();
    Ok(CapacityCurve {
        non_increasing,
        convex: min_sd >= -CONVEXITY_TOLERANCE,
        min_second_difference: min_sd,
        log2_output_size: log2_y,
        bounded: v.iter().all(|&c| c <= log2_y + 1e-12),
        any_flagged: points.iter().any(|p| p.flagged),
        points,
    })
}

/// `n + 1` equally spaced points on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}
