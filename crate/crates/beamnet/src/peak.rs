//! Distribution of the maximum sidelobe over the 3 dB sidelobe region.
//!
//! Treating the in-phase/quadrature components as a stationary zero-mean
//! Gaussian process in `u = sin(phi/2)`, the mean number of upward
//! envelope crossings of a level bounds the probability that any peak
//! exceeds it. The bound, its simplified large-radius form and its
//! inversion live here next to the Monte Carlo peak-outage measurement.

use crate::array::{sample_realization, ArrayConfig};
use crate::average::{sidelobe_region, SidelobeRegion};
use crate::ccdf::{CcdfCurve, CcdfMethod};
use crate::error::{Error, Result};
use crate::quad::bisect;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A peak-outage query: threshold `p0` in linear power, with its
/// floor-normalized form `normalized_p0 = N * p0` (the bound is valid
/// only above 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    pub n_nodes: usize,
    pub r_tilde: f64,
    pub p0: f64,
    pub normalized_p0: f64,
}

impl OutageQuery {
    pub fn new(n_nodes: usize, r_tilde: f64, p0: f64) -> Result<Self> {
        if n_nodes < 1 || !(r_tilde > 0.0) || !(p0 >= 0.0) {
            return Err(Error::domain("OutageQuery::new", "invalid query"));
        }
        let normalized_p0 = n_nodes as f64 * p0;
        if normalized_p0 <= 0.5 {
            return Err(Error::regime(
                "OutageQuery::new",
                format!("bound requires N*P0 > 1/2, got {normalized_p0}"),
            ));
        }
        Ok(OutageQuery {
            n_nodes,
            r_tilde,
            p0,
            normalized_p0,
        })
    }
}

/// Variance of the u-differentiated component process, `2 pi^2 r_tilde^2`.
pub fn derivative_process_variance(r_tilde: f64) -> f64 {
    2.0 * PI * PI * r_tilde * r_tilde
}

/// Mean number of upward crossings of envelope level `a` over the 3 dB
/// sidelobe region: `4 (1 - sin(phi_zero/2)) sqrt(pi) r_tilde a e^{-a^2}`.
/// Monotone decreasing (hence meaningful) only for `a > 1/sqrt(2)`.
pub fn mean_upcrossings(level_a: f64, region: &SidelobeRegion) -> Result<f64> {
    if !(level_a > std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::regime(
            "mean_upcrossings",
            format!("level {level_a} is not above 1/sqrt(2)"),
        ));
    }
    let span = 1.0 - (0.5 * region.phi_zero).sin();
    Ok(4.0 * span * PI.sqrt() * region.r_tilde * level_a * (-level_a * level_a).exp())
}

/// Upper bound on `Pr[max over the region of N*P > normalized_p0]`,
/// clamped to 1.
pub fn outage_upper_bound(q: &OutageQuery, region: &SidelobeRegion) -> Result<f64> {
    if q.n_nodes != region.n_nodes || q.r_tilde != region.r_tilde {
        return Err(Error::domain(
            "outage_upper_bound",
            "query and region describe different arrays",
        ));
    }
    let a = q.normalized_p0.sqrt();
    Ok(mean_upcrossings(a, region)?.min(1.0))
}

/// Simplified large-radius bound `4 sqrt(pi) r_tilde sqrt(t) e^{-t}`
/// (the region boundary angle dropped).
pub fn outage_bound_simplified(normalized_p0: f64, r_tilde: f64) -> Result<f64> {
    if normalized_p0 <= 0.5 {
        return Err(Error::regime(
            "outage_bound_simplified",
            format!("bound requires N*P0 > 1/2, got {normalized_p0}"),
        ));
    }
    Ok((4.0 * PI.sqrt() * r_tilde * normalized_p0.sqrt() * (-normalized_p0).exp()).min(1.0))
}

/// Invert the simplified bound: the largest normalized threshold whose
/// outage bound still reaches `p_out`. Root-finds the decreasing branch
/// `t > 1/2` of `4 sqrt(pi) r_tilde sqrt(t) e^{-t} = p_out`.
pub fn threshold_for_outage(p_out: f64, r_tilde: f64) -> Result<f64> {
    if !(0.0 < p_out && p_out < 1.0) {
        return Err(Error::domain(
            "threshold_for_outage",
            format!("p_out must be in (0, 1), got {p_out}"),
        ));
    }
    let g = |t: f64| 4.0 * PI.sqrt() * r_tilde * t.sqrt() * (-t).exp();
    if g(0.5) <= p_out {
        return Err(Error::regime(
            "threshold_for_outage",
            format!("no root above 1/2: bound peaks at {:.3e} < p_out", g(0.5)),
        ));
    }
    let mut hi = 1.0;
    while g(hi) > p_out {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::numeric("threshold_for_outage", "no upper bracket"));
        }
    }
    // bisection on the log for uniform relative accuracy
    let root = bisect(|t| g(t).ln() - p_out.ln(), 0.5, hi, 1e-13)?;
    Ok(root)
}

/// Empirical CCDF of the per-realization maximum of `N * P` over the
/// 3 dB sidelobe region, on a grid of at least `16 pi r_tilde` points.
///
/// `thresholds` are linear power values `P0`; the curve reports
/// `Pr[max P > P0]` with binomial standard errors. `refine` applies a
/// three-point parabolic correction to each grid maximum.
pub fn mc_peak_outage_with(
    cfg: &ArrayConfig,
    thresholds: &[f64],
    n_trials: usize,
    refine: bool,
) -> Result<CcdfCurve> {
    if n_trials < 100 {
        return Err(Error::domain("mc_peak_outage", "need at least 100 trials"));
    }
    let region = sidelobe_region(cfg.n_nodes, cfg.r_tilde)?;
    let maxima = peak_samples(cfg, &region, n_trials, refine);
    let n = n_trials as f64;
    let mut probs = Vec::with_capacity(thresholds.len());
    let mut se = Vec::with_capacity(thresholds.len());
    for &p0 in thresholds {
        let count = maxima.iter().filter(|&&p| p > p0).count();
        let p = count as f64 / n;
        probs.push(p);
        se.push((p * (1.0 - p) / n).sqrt());
    }
    Ok(CcdfCurve {
        thresholds: thresholds.to_vec(),
        probs,
        method: CcdfMethod::MonteCarlo,
        std_err: Some(se),
    })
}

/// Dense-sampling protocol without refinement.
pub fn mc_peak_outage(cfg: &ArrayConfig, thresholds: &[f64], n_trials: usize) -> Result<CcdfCurve> {
    mc_peak_outage_with(cfg, thresholds, n_trials, false)
}

/// Per-realization maxima of the pattern over the region grid. Sampling
/// runs at twice the minimum rate: the minimum sits right at the Nyquist
/// density of the squared pattern, where grid maxima still undershoot
/// systematically; one octave of margin makes them density-stable.
pub(crate) fn peak_samples(
    cfg: &ArrayConfig,
    region: &SidelobeRegion,
    n_trials: usize,
    refine: bool,
) -> Vec<f64> {
    peak_samples_at_density(cfg, region, n_trials, refine, 2.0)
}

pub(crate) fn peak_samples_at_density(
    cfg: &ArrayConfig,
    region: &SidelobeRegion,
    n_trials: usize,
    refine: bool,
    density_factor: f64,
) -> Vec<f64> {
    let grid = region_grid(region, density_factor);
    (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = sample_realization(cfg, t);
            let mut values = Vec::with_capacity(grid.len());
            // phase of node k at angle phi: -2 pi r_tilde r_k
            // [cos(phi - psi_k) - cos(psi_k)]
            let scale = 2.0 * PI * cfg.r_tilde;
            for &phi in &grid {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for (&r, &psi) in real.radii.iter().zip(&real.angles) {
                    let phase = -scale * r * ((phi - psi).cos() - psi.cos());
                    let (s, c) = phase.sin_cos();
                    re += c;
                    im += s;
                }
                let nf = real.len() as f64;
                values.push((re * re + im * im) / (nf * nf));
            }
            let mut best = 0.0f64;
            for i in 0..values.len() {
                let v = if refine && i > 0 && i + 1 < values.len() {
                    parabolic_peak(values[i - 1], values[i], values[i + 1])
                } else {
                    values[i]
                };
                best = best.max(v);
            }
            best
        })
        .collect()
}

/// Uniform sampling of both halves of the sidelobe region at the
/// rate of at least `16 pi r_tilde` points total.
fn region_grid(region: &SidelobeRegion, density_factor: f64) -> Vec<f64> {
    let total = ((density_factor * 16.0 * PI * region.r_tilde).ceil() as usize).max(64);
    let per_side = total / 2 + 1;
    let mut grid = Vec::with_capacity(2 * per_side);
    let lo = region.phi_zero;
    let hi = PI;
    for i in 0..per_side {
        let phi = lo + (hi - lo) * i as f64 / (per_side - 1) as f64;
        grid.push(phi);
        grid.push(-phi);
    }
    grid
}

/// Peak of the parabola through three equally spaced samples (used only
/// when the middle one dominates).
fn parabolic_peak(a: f64, b: f64, c: f64) -> f64 {
    if b >= a && b >= c {
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            let num = (a - c) * (a - c);
            return b - num / (8.0 * denom);
        }
    }
    b
}
