//! Random-array geometry and per-realization beampatterns.
//!
//! Nodes are drawn uniformly on the unit disk (normalized radius
//! `r_tilde = R / lambda` carries the physical scale). A realization's
//! far-field array factor at azimuth `phi` is the mean of unit-modulus
//! phase terms, and the beampattern is its squared magnitude, normalized
//! so the coherent target direction (`phi = 0`) has power 1.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Experiment identity: node count, normalized disk radius, RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_nodes: usize,
    pub r_tilde: f64,
    pub seed: u64,
}

impl ArrayConfig {
    pub fn new(n_nodes: usize, r_tilde: f64, seed: u64) -> Result<Self> {
        if n_nodes < 1 {
            return Err(Error::domain("ArrayConfig::new", "n_nodes must be >= 1"));
        }
        if !(r_tilde > 0.0) || !r_tilde.is_finite() {
            return Err(Error::domain(
                "ArrayConfig::new",
                format!("r_tilde must be finite and > 0, got {r_tilde}"),
            ));
        }
        Ok(ArrayConfig {
            n_nodes,
            r_tilde,
            seed,
        })
    }

    /// Independent, reproducible RNG stream for one Monte Carlo trial.
    /// Streams are keyed by (seed, stream_index) so batch results do not
    /// depend on how trials are distributed over workers.
    pub(crate) fn stream_rng(&self, stream_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_index);
        rng
    }
}

/// One sample of node positions, in normalized polar coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRealization {
    /// Normalized radii in [0, 1], density 2r (uniform over the disk).
    pub radii: Vec<f64>,
    /// Azimuths, uniform on [-pi, pi).
    pub angles: Vec<f64>,
}

impl NodeRealization {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Angle grid paired with linear power values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCurve {
    /// Azimuths in radians over [-pi, pi].
    pub angles: Vec<f64>,
    /// Linear power, coherent mainbeam = 1.
    pub power: Vec<f64>,
    /// Method tag for provenance.
    pub label: String,
}

/// Monte Carlo mean pattern with per-angle standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPatternStats {
    pub angles: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_trials: usize,
    pub label: String,
}

/// Draw one node realization; deterministic given (cfg.seed, stream_index).
pub fn sample_realization(cfg: &ArrayConfig, stream_index: u64) -> NodeRealization {
    let mut rng = cfg.stream_rng(stream_index);
    let n = cfg.n_nodes;
    let mut radii = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    for _ in 0..n {
        // inverse CDF of the disk radial density 2r
        let u: f64 = rng.gen();
        radii.push(u.sqrt());
        let v: f64 = rng.gen();
        angles.push(v * 2.0 * PI - PI);
    }
    NodeRealization { radii, angles }
}

/// Phase scale `alpha(phi) = 4 pi r_tilde sin(phi / 2)`.
#[inline]
pub fn alpha(phi: f64, r_tilde: f64) -> f64 {
    4.0 * PI * r_tilde * (0.5 * phi).sin()
}

/// Compound variables `z_k = r_k sin(psi_k - phi/2)` at look angle `phi`
/// (target direction fixed at zero azimuth). Each lies in [-1, 1] with
/// density `(2/pi) sqrt(1 - z^2)` over the node ensemble.
pub fn compound_z(real: &NodeRealization, phi: f64) -> Vec<f64> {
    let half = 0.5 * phi;
    real.radii
        .iter()
        .zip(&real.angles)
        .map(|(&r, &psi)| r * (psi - half).sin())
        .collect()
}

/// Far-field array factor `(1/N) sum_k exp(-j alpha(phi) z_k(phi))`.
/// Equals exactly 1 at `phi = 0`; magnitude never exceeds 1.
pub fn array_factor(real: &NodeRealization, phi: f64, r_tilde: f64) -> Complex64 {
    let a = alpha(phi, r_tilde);
    if a == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let half = 0.5 * phi;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&r, &psi) in real.radii.iter().zip(&real.angles) {
        let z = r * (psi - half).sin();
        let (s, c) = (-a * z).sin_cos();
        acc += Complex64::new(c, s);
    }
    acc / real.len() as f64
}

/// Beampattern `P(phi) = |F(phi)|^2` on a caller-supplied angle grid.
pub fn beampattern(real: &NodeRealization, grid: &[f64], r_tilde: f64) -> PatternCurve {
    let power = grid
        .iter()
        .map(|&phi| array_factor(real, phi, r_tilde).norm_sqr())
        .collect();
    PatternCurve {
        angles: grid.to_vec(),
        power,
        label: "realization".to_string(),
    }
}

/// Uniform angle grid over [-pi, pi] with at least `16 pi r_tilde` points
/// (the density needed to resolve sidelobe oscillation).
pub fn default_grid(r_tilde: f64, min_points: usize) -> Vec<f64> {
    let n = ((16.0 * PI * r_tilde).ceil() as usize).max(min_points).max(2);
    (0..n)
        .map(|i| -PI + 2.0 * PI * (i as f64) / ((n - 1) as f64))
        .collect()
}

/// Monte Carlo mean of the beampattern over `n_trials` realizations.
/// Trials map to RNG streams 0..n_trials; the reduction is ordered by
/// stream index, so the result is identical for any worker count.
pub fn mc_average_pattern(cfg: &ArrayConfig, grid: &[f64], n_trials: usize) -> McPatternStats {
    let curves: Vec<Vec<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = sample_realization(cfg, t);
            grid.iter()
                .map(|&phi| array_factor(&real, phi, cfg.r_tilde).norm_sqr())
                .collect()
        })
        .collect();
    let (mean, std_err) = mean_and_se_columns(&curves);
    McPatternStats {
        angles: grid.to_vec(),
        mean,
        std_err,
        n_trials,
        label: "monte-carlo".to_string(),
    }
}

/// Column-wise mean and standard error of a set of equal-length rows.
pub(crate) fn mean_and_se_columns(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; m];
    for row in rows {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    let mut var = vec![0.0; m];
    for row in rows {
        for ((acc, v), mu) in var.iter_mut().zip(row).zip(&mean) {
            let d = v - mu;
            *acc += d * d;
        }
    }
    let se = var
        .into_iter()
        .map(|s| (s / ((n.max(2) - 1) as f64) / n as f64).sqrt())
        .collect();
    (mean, se)
}
