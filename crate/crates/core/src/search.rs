//! Grid search over power-splitting ratios and the parameter sweeps built on it.
//!
//! Every grid point is an independent analytic evaluation, so points are
//! evaluated in parallel and reduced in grid order afterwards.

use rayon::prelude::*;
use serde::Serialize;

use crate::chebyshev::QuadratureRule;
use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::sysout::system_outage_with_limits;
use crate::t2t::capacity_from_outage;

/// Points per axis used when the caller has no preference.
pub const DEFAULT_RESOLUTION: usize = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsMode {
    /// `lambda_a = lambda_b`, searched on a 1-D grid.
    Symmetric,
    /// Independent ratios, searched on the full 2-D grid.
    Asymmetric,
}

impl PsMode {
    pub fn label(self) -> &'static str {
        match self {
            PsMode::Symmetric => "symmetric",
            PsMode::Asymmetric => "asymmetric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Value of the swept parameter. For a PS search this is `lambda_a`.
    pub value: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub theta_a_sq: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: &'static str,
    pub grid: Vec<f64>,
    /// `None` when the power-splitting ratios are held fixed.
    pub mode: Option<PsMode>,
    pub points: Vec<SweepPoint>,
    pub optimum: SweepPoint,
}

/// System outage capacity of one configuration, honouring the forced-outage
/// endpoints.
pub fn system_capacity(cfg: &NetworkConfig, rule: &QuadratureRule) -> Result<f64> {
    let p_out = system_outage_with_limits(cfg, rule)?;
    Ok(capacity_from_outage(cfg, p_out))
}

/// `resolution` evenly spaced points strictly inside (0, 1).
pub fn ps_grid(resolution: usize) -> Result<Vec<f64>> {
    if resolution < 3 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 3, got {resolution}"
        )));
    }
    let step = 1.0 / (resolution + 1) as f64;
    Ok((1..=resolution).map(|k| k as f64 * step).collect())
}

/// First maximum in iteration order, so earlier points win ties.
fn argmax(points: &[SweepPoint]) -> Result<SweepPoint> {
    let mut best: Option<SweepPoint> = None;
    for p in points {
        if !p.capacity.is_finite() {
            return Err(Error::NonFinite { at: p.value });
        }
        if best.is_none_or(|b| p.capacity > b.capacity) {
            best = Some(*p);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty grid".into()))
}

fn check_grid(name: &str, grid: &[f64], lo: f64, hi: f64, hi_inclusive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    for &v in grid {
        let above_hi = if hi_inclusive { v > hi } else { v >= hi };
        if !v.is_finite() || v <= lo || above_hi {
            return Err(Error::InvalidArgument(format!(
                "{name} grid value {v} out of range"
            )));
        }
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must be increasing"
        )));
    }
    Ok(())
}

/// Maximize system outage capacity over the power-splitting ratios.
///
/// Ties go to the smallest `lambda_a`, then the smallest `lambda_b`.
pub fn optimize_ps(
    cfg: &NetworkConfig,
    mode: PsMode,
    resolution: usize,
    rule: &QuadratureRule,
) -> Result<SweepResult> {
    let grid = ps_grid(resolution)?;
    let pairs: Vec<(f64, f64)> = match mode {
        PsMode::Symmetric => grid.iter().map(|&l| (l, l)).collect(),
        PsMode::Asymmetric => grid
            .iter()
            .flat_map(|&la| grid.iter().map(move |&lb| (la, lb)))
            .collect(),
    };
    let points = pairs
        .par_iter()
        .map(|&(la, lb)| {
            let c = cfg.with_lambdas(la, lb);
            Ok(SweepPoint {
                value: la,
                lambda_a: la,
                lambda_b: lb,
                theta_a_sq: c.theta_a_sq,
                capacity: system_capacity(&c, rule)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let optimum = argmax(&points)?;
    Ok(SweepResult {
        axis: "lambda_a",
        grid,
        mode: Some(mode),
        points,
        optimum,
    })
}

fn sweep_optimized<F>(
    axis: &'static str,
    grid: &[f64],
    mode: PsMode,
    resolution: usize,
    rule: &QuadratureRule,
    configure: F,
) -> Result<SweepResult>
where
    F: Fn(f64) -> NetworkConfig + Sync,
{
    let points = grid
        .par_iter()
        .map(|&v| {
            let best = optimize_ps(&configure(v), mode, resolution, rule)?.optimum;
            Ok(SweepPoint { value: v, ..best })
        })
        .collect::<Result<Vec<_>>>()?;
    let optimum = argmax(&points)?;
    Ok(SweepResult {
        axis,
        grid: grid.to_vec(),
        mode: Some(mode),
        points,
        optimum,
    })
}

/// Move the relay along the A-B segment, re-optimizing PS ratios at each `d_a`.
pub fn sweep_relay_location(
    cfg_base: &NetworkConfig,
    d_total: f64,
    grid: &[f64],
    mode: PsMode,
    resolution: usize,
    rule: &QuadratureRule,
) -> Result<SweepResult> {
    if !(d_total.is_finite() && d_total > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "total distance {d_total} must be positive"
        )));
    }
    check_grid("d_a", grid, 0.0, d_total, false)?;
    sweep_optimized("d_a", grid, mode, resolution, rule, |d_a| NetworkConfig {
        d_a,
        d_b: d_total - d_a,
        ..*cfg_base
    })
}

/// Optimized capacity as a function of the energy conversion efficiency.
pub fn sweep_eta(
    cfg_base: &NetworkConfig,
    eta_grid: &[f64],
    mode: PsMode,
    resolution: usize,
    rule: &QuadratureRule,
) -> Result<SweepResult> {
    check_grid("eta", eta_grid, 0.0, 1.0, true)?;
    sweep_optimized("eta", eta_grid, mode, resolution, rule, |eta| {
        NetworkConfig { eta, ..*cfg_base }
    })
}

/// Capacity as a function of the relay's static power allocation, with the
/// PS ratios taken from `cfg`.
pub fn sweep_theta(
    cfg: &NetworkConfig,
    theta_grid: &[f64],
    rule: &QuadratureRule,
) -> Result<SweepResult> {
    check_grid("theta_a_sq", theta_grid, 0.0, 1.0, false)?;
    let points = theta_grid
        .par_iter()
        .map(|&theta_a_sq| {
            let c = NetworkConfig { theta_a_sq, ..*cfg };
            Ok(SweepPoint {
                value: theta_a_sq,
                lambda_a: c.lambda_a,
                lambda_b: c.lambda_b,
                theta_a_sq,
                capacity: system_capacity(&c, rule)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let optimum = argmax(&points)?;
    Ok(SweepResult {
        axis: "theta_a_sq",
        grid: theta_grid.to_vec(),
        mode: None,
        points,
        optimum,
    })
}

/// Largest capacity change between the optimum and its grid neighbours.
pub fn capacity_step(result: &SweepResult) -> f64 {
    let pts = &result.points;
    let Some(i) = pts
        .iter()
        .position(|p| p.value == result.optimum.value && p.capacity == result.optimum.capacity)
    else {
        return 0.0;
    };
    let lo = i.saturating_sub(1);
    let hi = (i + 1).min(pts.len() - 1);
    (lo..=hi)
        .map(|j| (pts[j].capacity - pts[i].capacity).abs())
        .fold(0.0, f64::max)
}

/// Number of adjacent steps that break a nonincreasing trend.
pub fn increasing_steps(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

/// Number of adjacent steps that break a nondecreasing trend.
pub fn decreasing_steps(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] < w[0]).count()
}
