//! Directivity of random-array realizations: the exact per-realization
//! value, its Monte Carlo ensemble average, the analytic lower bound,
//! and the density bound with its re-derived constants.

use crate::array::{sample_realization, ArrayConfig};
use crate::error::{Error, Result};
use crate::quad::{self, bisect, QuadratureSpec};
use crate::specfun::{hyp2f3_sidelobe, j1_ratio_unchecked};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Node count above which the pairwise Bessel sum is traded for angular
/// quadrature of the pattern (the O(N^2) sum stops paying off).
const PAIRWISE_LIMIT: usize = 2048;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanWithSe {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

/// Constants of the sidelobe-energy bound, re-derived at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Constants {
    /// Crossing of J1(t) with sqrt(2/(pi t)).
    pub x0: f64,
    /// Smallest non-negative solution of cos(a x0) = sqrt(8/(pi x0^3)).
    pub alpha0: f64,
    /// Leading coefficient of the 1/x bound.
    pub c0: f64,
}

/// Everything the CLI reports about one directivity experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectivityReport {
    pub d_realizations: Vec<f64>,
    pub d_av_mc: MeanWithSe,
    pub d_tilde_av: f64,
    pub theorem1_bound: f64,
    pub n_nodes: usize,
    pub r_tilde: f64,
}

/// Directivity of one realization, from the target-frame compound values
/// `z_k = r_k sin(psi_k)`:
/// `D = [1/N + (1/N^2) sum_{k != l} J0(4 pi r_tilde (z_k - z_l))]^{-1}`.
pub fn directivity_realization(real: &crate::array::NodeRealization, r_tilde: f64) -> f64 {
    let n = real.len();
    let z: Vec<f64> = real
        .radii
        .iter()
        .zip(&real.angles)
        .map(|(&r, &psi)| r * psi.sin())
        .collect();
    if n > PAIRWISE_LIMIT {
        return directivity_by_angular_quadrature(&z, r_tilde);
    }
    let nf = n as f64;
    let scale = 4.0 * PI * r_tilde;
    let mut cross = 0.0;
    for k in 0..n {
        for l in (k + 1)..n {
            cross += libm::j0(scale * (z[k] - z[l]));
        }
    }
    let denom = 1.0 / nf + 2.0 * cross / (nf * nf);
    1.0 / denom
}

/// Angular-quadrature route: `D = 2 pi / integral of P(phi | z) d phi`,
/// with the pattern held in the fixed-z frame. The pattern is a smooth
/// 2 pi-periodic function, so a uniform trapezoid at the sidelobe
/// sampling density is spectrally accurate.
fn directivity_by_angular_quadrature(z: &[f64], r_tilde: f64) -> f64 {
    let m = ((16.0 * PI * r_tilde).ceil() as usize).max(64);
    let nf = z.len() as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let phi = -PI + 2.0 * PI * (i as f64) / (m as f64);
        let a = 4.0 * PI * r_tilde * (0.5 * phi).sin();
        let (mut re, mut im) = (0.0, 0.0);
        for &zk in z {
            let (s, c) = (a * zk).sin_cos();
            re += c;
            im -= s;
        }
        acc += (re * re + im * im) / (nf * nf);
    }
    let integral = acc * 2.0 * PI / (m as f64);
    2.0 * PI / integral
}

/// Monte Carlo mean directivity over independent realizations.
/// Deterministic for a given seed regardless of worker count.
pub fn mc_average_directivity(cfg: &ArrayConfig, n_trials: usize) -> Result<MeanWithSe> {
    if n_trials < 2 {
        return Err(Error::domain(
            "mc_average_directivity",
            "need at least 2 trials",
        ));
    }
    let ds = directivity_samples(cfg, n_trials);
    Ok(summarize(&ds))
}

/// Per-realization directivities for trials 0..n_trials, in stream order.
pub fn directivity_samples(cfg: &ArrayConfig, n_trials: usize) -> Vec<f64> {
    (0..n_trials as u64)
        .into_par_iter()
        .map(|t| directivity_realization(&sample_realization(cfg, t), cfg.r_tilde))
        .collect()
}

fn summarize(xs: &[f64]) -> MeanWithSe {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / ((n - 1).max(1) as f64);
    MeanWithSe {
        mean,
        std_err: (var / n as f64).sqrt(),
        n,
    }
}

/// Analytic lower bound `D_tilde = 2 pi / integral of P_av`, computed by
/// quadrature. The integrand has ~4 r_tilde lobes over the half period;
/// supply a `QuadratureSpec` with a budget to match (see
/// [`QuadratureSpec::for_oscillatory`]).
pub fn directivity_lower(n_nodes: usize, r_tilde: f64, spec: &QuadratureSpec) -> Result<f64> {
    if n_nodes < 1 {
        return Err(Error::domain("directivity_lower", "n_nodes must be >= 1"));
    }
    if n_nodes == 1 {
        return Ok(1.0);
    }
    let seeds = ((4.0 * r_tilde).ceil() as usize * 2 + 8).min(spec.max_subdivisions);
    let f = |phi: f64| {
        let r = j1_ratio_unchecked(crate::array::alpha(phi, r_tilde));
        r * r
    };
    let half = quad::integrate_oscillatory(f, 0.0, PI, seeds, spec)?;
    let n = n_nodes as f64;
    let integral = 2.0 * PI / n + (1.0 - 1.0 / n) * 2.0 * half;
    Ok(2.0 * PI / integral)
}

/// Same bound through the closed form `N / (1 + (N-1) f(4 pi r_tilde))`
/// with `f` the sidelobe hypergeometric; cross-check route for moderate
/// radii.
pub fn directivity_lower_closed_form(
    n_nodes: usize,
    r_tilde: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = n_nodes as f64;
    let f = hyp2f3_sidelobe(4.0 * PI * r_tilde, spec)?;
    Ok(n / (1.0 + (n - 1.0) * f))
}

/// Re-derive the bound constants: the crossing `x0` of `J1(t)` with
/// `sqrt(2/(pi t))`, the matching `alpha0`, and the coefficient `c0`.
pub fn lemma1_constants() -> Lemma1Constants {
    static CONSTS: OnceLock<Lemma1Constants> = OnceLock::new();
    *CONSTS.get_or_init(|| {
        let x0 = bisect(
            |t: f64| libm::j1(t) - (2.0 / (PI * t)).sqrt(),
            2.0,
            3.0,
            1e-13,
        )
        .expect("x0 bracket");
        let rhs = (8.0 / (PI * x0.powi(3))).sqrt();
        // cos(a x0) decreasing on [0, pi/x0]: bisection for the smallest root
        let alpha0 = bisect(|a: f64| (a * x0).cos() - rhs, 0.0, PI / x0, 1e-13)
            .expect("alpha0 bracket");
        let c0 = (x0 + (2.0 * alpha0 * x0).sin() / (2.0 * alpha0) + 8.0 / (PI * x0 * x0)) / PI;
        Lemma1Constants { x0, alpha0, c0 }
    })
}

/// Finite-N density bound `1 / (1 + (1 - 1/N) (c0 / 4 pi) N / r_tilde)`
/// on the normalized directivity; valid in the large-radius regime.
pub fn theorem1_bound(n_nodes: usize, r_tilde: f64) -> f64 {
    let n = n_nodes as f64;
    let c0 = lemma1_constants().c0;
    1.0 / (1.0 + (1.0 - 1.0 / n) * c0 / (4.0 * PI) * n / r_tilde)
}

/// Large-N limit of the bound as a function of the node density
/// `N / r_tilde` alone, with `mu = c0 / 4 pi ~ 0.09332`.
pub fn theorem1_bound_density_limit(density: f64) -> f64 {
    let mu = lemma1_constants().c0 / (4.0 * PI);
    1.0 / (1.0 + mu * density)
}

/// Run a full directivity experiment: Monte Carlo samples plus the
/// analytic bounds.
pub fn directivity_report(
    cfg: &ArrayConfig,
    n_trials: usize,
    spec: &QuadratureSpec,
) -> Result<DirectivityReport> {
    if n_trials < 2 {
        return Err(Error::domain("directivity_report", "need at least 2 trials"));
    }
    let d_realizations = directivity_samples(cfg, n_trials);
    let d_av_mc = summarize(&d_realizations);
    let d_tilde_av = directivity_lower(cfg.n_nodes, cfg.r_tilde, spec)?;
    Ok(DirectivityReport {
        d_realizations,
        d_av_mc,
        d_tilde_av,
        theorem1_bound: theorem1_bound(cfg.n_nodes, cfg.r_tilde),
        n_nodes: cfg.n_nodes,
        r_tilde: cfg.r_tilde,
    })
}

/// Check the Jensen-consistency invariant of a report:
/// the analytic bound must not exceed the Monte Carlo mean by more than
/// three standard errors.
pub fn jensen_consistent(report: &DirectivityReport) -> bool {
    report.d_tilde_av <= report.d_av_mc.mean + 3.0 * report.d_av_mc.std_err
}
