//! Distribution of the beampattern at a fixed look angle.
//!
//! The array factor at angle `phi` is a mean of N i.i.d. unit-modulus
//! terms, so the joint law of its scaled components `(X, Y)` follows
//! from the N-th power of the per-node joint characteristic function.
//! `exact_ccdf` samples that characteristic function on a conjugate
//! grid, inverts with a 2-D FFT, and integrates the density outside the
//! threshold circle. The Gaussian-family approximations (precise
//! bivariate, equal-variance Marcum-Q, zero-mean Rayleigh) and a seeded
//! Monte Carlo reference produce comparable curves.

use crate::array::{alpha, array_factor, sample_realization, ArrayConfig};
use crate::average::sidelobe_region;
use crate::error::{Error, Result};
use crate::quad::{self, QuadratureSpec};
use crate::specfun::{erfc, j1_ratio_unchecked, marcum_q1};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Gaussian moments of the scaled in-phase/quadrature components at one
/// look angle: `X` has mean `m_x` and variance `var_x`, `Y` is zero-mean
/// with variance `var_y`, and the two are uncorrelated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub m_x: f64,
    pub var_x: f64,
    pub var_y: f64,
    /// The phase scale alpha(phi) the moments were computed at.
    pub alpha: f64,
    pub n_nodes: usize,
}

/// Which method produced a CCDF curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CcdfMethod {
    ExactCf,
    PreciseGaussian,
    Marcum,
    Rayleigh,
    MonteCarlo,
}

impl CcdfMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CcdfMethod::ExactCf => "exact-cf",
            CcdfMethod::PreciseGaussian => "precise-gaussian",
            CcdfMethod::Marcum => "marcum",
            CcdfMethod::Rayleigh => "rayleigh",
            CcdfMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// Threshold grid with exceedance probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    /// Linear power thresholds (coherent mainbeam = 1).
    pub thresholds: Vec<f64>,
    /// `Pr[P(phi) > P0]` per threshold.
    pub probs: Vec<f64>,
    pub method: CcdfMethod,
    /// Binomial standard errors (Monte Carlo curves only).
    pub std_err: Option<Vec<f64>>,
}

impl CcdfCurve {
    /// Validate the defining invariants: probabilities in [0, 1],
    /// non-increasing in the threshold (up to `tol` numerical slack).
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.thresholds.len() != self.probs.len() {
            return Err(Error::numeric("CcdfCurve::validate", "length mismatch"));
        }
        for w in self.probs.windows(2) {
            if w[1] > w[0] + tol {
                return Err(Error::numeric(
                    "CcdfCurve::validate",
                    format!("probs increase: {} -> {}", w[0], w[1]),
                ));
            }
        }
        if self.probs.iter().any(|&p| !(-tol..=1.0 + tol).contains(&p)) {
            return Err(Error::numeric("CcdfCurve::validate", "prob outside [0,1]"));
        }
        Ok(())
    }
}

/// Per-node joint characteristic function
/// `E_z{ exp(j [omega cos(z alpha) + nu sin(z alpha)]) }` with `z` drawn
/// from the compound density `(2/pi) sqrt(1 - z^2)`.
pub fn joint_cf(omega: f64, nu: f64, alpha: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    // substitute z = cos(theta): the weight becomes sin^2(theta), smooth.
    let rho = (omega * omega + nu * nu).sqrt();
    let seeds = ((alpha.abs() * rho / PI).ceil() as usize + 4).min(spec.max_subdivisions / 2 + 1);
    let phase = |theta: f64| {
        let z = theta.cos();
        omega * (z * alpha).cos() + nu * (z * alpha).sin()
    };
    let re = quad::integrate_oscillatory(
        |t| phase(t).cos() * t.sin() * t.sin(),
        0.0,
        PI,
        seeds,
        spec,
    )?;
    let im = quad::integrate_oscillatory(
        |t| phase(t).sin() * t.sin() * t.sin(),
        0.0,
        PI,
        seeds,
        spec,
    )?;
    Ok(Complex64::new(re, im) * (2.0 / PI))
}

/// Gaussian moments of `(X, Y)` at phase scale `alpha`.
pub fn gaussian_moments(n_nodes: usize, alpha: f64) -> Result<GaussianMoments> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(
            "gaussian_moments",
            format!("alpha must be finite and >= 0, got {alpha}"),
        ));
    }
    let n = n_nodes as f64;
    let r1 = j1_ratio_unchecked(alpha);
    let r2 = j1_ratio_unchecked(2.0 * alpha);
    Ok(GaussianMoments {
        m_x: r1 * n.sqrt(),
        var_x: 0.5 * (1.0 + r2) - r1 * r1,
        var_y: 0.5 * (1.0 - r2),
        alpha,
        n_nodes,
    })
}

// ---------------------------------------------------------------------
// Exact distribution via characteristic-function inversion
// ---------------------------------------------------------------------

/// Exact CCDF of the pattern power at phase scale `alpha`, by 2-D
/// Fourier inversion of the N-th power of the per-node characteristic
/// function.
///
/// `grid_size` must be a power of two, at least 256. The density support
/// is padded to `[-9N/8, 9N/8]^2`; if truncation ringing pushes more
/// than 1e-6 of mass outside the true support box the resolution error
/// asks for a larger grid.
pub fn exact_ccdf(
    n_nodes: usize,
    alpha: f64,
    thresholds: &[f64],
    grid_size: usize,
    spec: &QuadratureSpec,
) -> Result<CcdfCurve> {
    if grid_size < 256 || !grid_size.is_power_of_two() {
        return Err(Error::domain(
            "exact_ccdf",
            format!("grid_size must be a power of two >= 256, got {grid_size}"),
        ));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(
            "exact_ccdf",
            format!("alpha must be finite and >= 0, got {alpha}"),
        ));
    }
    // Deterministic mainbeam point: P = 1 exactly.
    if alpha < 1e-12 {
        let probs = thresholds.iter().map(|&p0| if p0 < 1.0 { 1.0 } else { 0.0 });
        return Ok(CcdfCurve {
            thresholds: thresholds.to_vec(),
            probs: probs.collect(),
            method: CcdfMethod::ExactCf,
            std_err: None,
        });
    }

    let density = invert_density(n_nodes, alpha, grid_size, spec)?;
    let probs: Vec<f64> = thresholds
        .par_iter()
        .map(|&p0| density.tail_probability(p0).clamp(0.0, 1.0))
        .collect();
    Ok(CcdfCurve {
        thresholds: thresholds.to_vec(),
        probs,
        method: CcdfMethod::ExactCf,
        std_err: None,
    })
}

/// Joint density of the component sums on a regular grid.
pub(crate) struct ComponentDensity {
    values: Vec<f64>, // row-major M x M
    m: usize,
    half_extent: f64, // grid covers [-L, L)
    dx: f64,
    n_nodes: usize,
    pub total_mass: f64,
}

pub(crate) fn invert_density(
    n_nodes: usize,
    alpha: f64,
    m: usize,
    spec: &QuadratureSpec,
) -> Result<ComponentDensity> {
    let nf = n_nodes as f64;
    let l = nf * (1.0 + 0.125);
    let dx = 2.0 * l / m as f64;
    let dw = PI / l;
    let omega = |p: usize| (p as f64 - (m / 2) as f64) * dw;
    let w_max = (m / 2) as f64 * dw;
    let rho_max = std::f64::consts::SQRT_2 * w_max;

    // Gauss-Chebyshev (second kind) rule for the compound density; the
    // node count follows the largest phase sweep alpha * rho on the grid.
    let n_rule = ((0.85 * alpha * rho_max).ceil() as usize + 80).max(96);
    let mut z_cos = Vec::with_capacity(n_rule);
    let mut z_sin = Vec::with_capacity(n_rule);
    let mut weight = Vec::with_capacity(n_rule);
    for i in 1..=n_rule {
        let t = i as f64 * PI / (n_rule + 1) as f64;
        let z = t.cos();
        let (s, c) = (z * alpha).sin_cos();
        z_cos.push(c);
        z_sin.push(s);
        weight.push(2.0 / (n_rule + 1) as f64 * t.sin() * t.sin());
    }

    // Cross-check the fixed rule against the adaptive evaluation at two
    // moderate-frequency probes before trusting it across the grid.
    let rule_cf = |om: f64, nu: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n_rule {
            acc += Complex64::from_polar(weight[i], om * z_cos[i] + nu * z_sin[i]);
        }
        acc
    };
    let rho_probe = w_max.min(6.0 / alpha.max(0.25));
    for &gamma in &[0.3f64, 1.2] {
        let (om, nu) = (rho_probe * gamma.cos(), rho_probe * gamma.sin());
        let adaptive = joint_cf(om, nu, alpha, spec)?;
        let err = (rule_cf(om, nu) - adaptive).norm();
        if err > 1e-8 {
            return Err(Error::numeric(
                "invert_density",
                format!("characteristic-function rule disagrees with adaptive quadrature by {err:.3e}"),
            ));
        }
    }

    // Radial cutoff: beyond rho_cut the powered CF is numerically zero.
    let rho_cut = find_radial_cutoff(n_nodes, rho_max, &z_cos, &z_sin, &weight);

    // CF rows: Phi[p][q] = sum_i w_i e^{j w_p c_i} e^{j w_q s_i}, built
    // per row with geometric recurrences in q. Conjugate symmetry fills
    // the lower half from the upper half.
    let steps: Vec<Complex64> = z_sin
        .iter()
        .map(|&s| Complex64::from_polar(1.0, dw * s))
        .collect();
    let compute_row = |p: usize| -> Vec<Complex64> {
        let wp = omega(p);
        let mut row = vec![Complex64::new(0.0, 0.0); m];
        if wp.abs() <= rho_cut {
            let nu_lim = (rho_cut * rho_cut - wp * wp).max(0.0).sqrt();
            let q_lo = (((m / 2) as f64 - nu_lim / dw).floor().max(0.0)) as usize;
            let q_hi = (((m / 2) as f64 + nu_lim / dw).ceil()).min((m - 1) as f64) as usize;
            let coef: Vec<Complex64> = z_cos
                .iter()
                .zip(&weight)
                .map(|(&c, &w)| Complex64::from_polar(w, wp * c))
                .collect();
            let mut pow: Vec<Complex64> = z_sin
                .iter()
                .map(|&s| Complex64::from_polar(1.0, omega(q_lo) * s))
                .collect();
            for cell in row.iter_mut().take(q_hi + 1).skip(q_lo) {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..coef.len() {
                    acc += coef[i] * pow[i];
                    pow[i] *= steps[i];
                }
                *cell = acc;
            }
        }
        row
    };

    let mut grid: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); m * m];
    let upper: Vec<(usize, Vec<Complex64>)> = (m / 2..m)
        .chain(std::iter::once(0))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| (p, compute_row(p)))
        .collect();
    for (p, row) in upper {
        grid[p * m..(p + 1) * m].copy_from_slice(&row);
    }
    // conjugate symmetry Phi(-w, -v) = conj Phi(w, v): row p < m/2 mirrors
    // row m - p with columns reversed (column 0 pairs with itself).
    for p in 1..m / 2 {
        for q in 0..m {
            let qs = if q == 0 { 0 } else { m - q };
            grid[p * m + q] = grid[(m - p) * m + qs].conj();
        }
    }

    // Raise to the N-th power and apply the checkerboard twiddle.
    grid.par_chunks_mut(m).enumerate().for_each(|(p, row)| {
        for (q, v) in row.iter_mut().enumerate() {
            let mut x = v.powu(n_nodes as u32);
            if (p + q) % 2 == 1 {
                x = -x;
            }
            *v = x;
        }
    });

    // 2-D FFT (rows, transpose, rows, transpose back), forward sign.
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in grid.chunks_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(&mut grid, m);
    for row in grid.chunks_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(&mut grid, m);

    let scale = (dw / (2.0 * PI)) * (dw / (2.0 * PI));
    let mut values = vec![0.0f64; m * m];
    values
        .par_chunks_mut(m)
        .zip(grid.par_chunks(m))
        .enumerate()
        .for_each(|(p, (out, row))| {
            for q in 0..m {
                let sign = if (p + q) % 2 == 1 { -1.0 } else { 1.0 };
                out[q] = sign * scale * row[q].re;
            }
        });

    let cell = dx * dx;
    let mut total_mass = 0.0;
    let mut outside_mass = 0.0;
    for p in 0..m {
        let x = -l + p as f64 * dx;
        for q in 0..m {
            let y = -l + q as f64 * dx;
            let v = values[p * m + q] * cell;
            total_mass += v;
            if x.abs() > nf || y.abs() > nf {
                outside_mass += v.abs();
            }
        }
    }
    if outside_mass > 1e-6 {
        return Err(Error::Resolution {
            mass: outside_mass,
            grid_size: m,
        });
    }
    Ok(ComponentDensity {
        values,
        m,
        half_extent: l,
        dx,
        n_nodes,
        total_mass,
    })
}

/// Scan outward along a few directions until the powered CF falls below
/// numerical significance; returns rho_max if it never does.
fn find_radial_cutoff(
    n_nodes: usize,
    rho_max: f64,
    z_cos: &[f64],
    z_sin: &[f64],
    weight: &[f64],
) -> f64 {
    let gammas = [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0];
    let steps = 256;
    let log_floor = -18.0 * std::f64::consts::LN_10 / n_nodes as f64; // |Phi|^N < 1e-18
    let mut consecutive = 0;
    for s in 1..=steps {
        let rho = rho_max * s as f64 / steps as f64;
        let mut biggest: f64 = 0.0;
        for &g in &gammas {
            let (om, nu) = (rho * g.cos(), rho * g.sin());
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..z_cos.len() {
                let ph = om * z_cos[i] + nu * z_sin[i];
                acc += Complex64::from_polar(weight[i], ph);
            }
            biggest = biggest.max(acc.norm());
        }
        if biggest.max(1e-300).ln() < log_floor {
            consecutive += 1;
            if consecutive >= 8 {
                return rho;
            }
        } else {
            consecutive = 0;
        }
    }
    rho_max
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for p in 0..m {
        for q in (p + 1)..m {
            data.swap(p * m + q, q * m + p);
        }
    }
}

impl ComponentDensity {
    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let fx = (x + self.half_extent) / self.dx;
        let fy = (y + self.half_extent) / self.dx;
        if fx < 0.0 || fy < 0.0 {
            return 0.0;
        }
        let ix = fx.floor() as usize;
        let iy = fy.floor() as usize;
        if ix + 1 >= self.m || iy + 1 >= self.m {
            return 0.0;
        }
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.values[ix * self.m + iy];
        let v10 = self.values[(ix + 1) * self.m + iy];
        let v01 = self.values[ix * self.m + iy + 1];
        let v11 = self.values[(ix + 1) * self.m + iy + 1];
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    /// Line integral of the density around one circle, times the radius.
    fn ring_integral(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n_ang = ((2.0 * PI * r / (0.5 * self.dx)).ceil() as usize).clamp(64, 1 << 16);
        let mut acc = 0.0;
        for i in 0..n_ang {
            let th = 2.0 * PI * i as f64 / n_ang as f64;
            acc += self.bilinear(r * th.cos(), r * th.sin());
        }
        acc / n_ang as f64 * 2.0 * PI * r
    }

    /// `Pr[X^2 + Y^2 > N^2 P0]` by polar resampling.
    pub fn tail_probability(&self, p0: f64) -> f64 {
        let n = self.n_nodes as f64;
        if p0 <= 0.0 {
            return self.total_mass;
        }
        let r0 = n * p0.sqrt();
        // hard support bound |F| <= 1 plus ringing pad
        let r_edge = (n * 1.06).min(self.half_extent);
        if r0 >= r_edge {
            return 0.0;
        }
        let radial = |a: f64, b: f64| -> f64 {
            let nr = (((b - a) / (0.5 * self.dx)).ceil() as usize).max(16);
            let mut acc = 0.5 * (self.ring_integral(a) + self.ring_integral(b));
            for i in 1..nr {
                acc += self.ring_integral(a + (b - a) * i as f64 / nr as f64);
            }
            acc * (b - a) / nr as f64
        };
        if r0 < 0.5 * n {
            // small threshold: subtract the inner disk
            self.total_mass - radial(0.0, r0)
        } else {
            radial(r0, r_edge)
        }
    }
}

// ---------------------------------------------------------------------
// Gaussian-family approximations
// ---------------------------------------------------------------------

/// CCDF from the full bivariate Gaussian approximation (angular integral
/// with erfc), one adaptive quadrature per threshold.
pub fn ccdf_precise_gaussian(
    mom: &GaussianMoments,
    thresholds: &[f64],
    spec: &QuadratureSpec,
) -> Result<CcdfCurve> {
    if !(mom.var_x > 0.0) || !(mom.var_y > 0.0) {
        return Err(Error::domain(
            "ccdf_precise_gaussian",
            format!("degenerate variances ({}, {})", mom.var_x, mom.var_y),
        ));
    }
    let (vx, vy, m_x) = (mom.var_x, mom.var_y, mom.m_x);
    let (sx, sy) = (vx.sqrt(), vy.sqrt());
    let n = mom.n_nodes as f64;
    let mut probs = Vec::with_capacity(thresholds.len());
    for &p0 in thresholds {
        let root = (n * p0.max(0.0)).sqrt();
        let integrand = move |w: f64| {
            let (s, c) = w.sin_cos();
            let u = (c * c / (2.0 * vx) + s * s / (2.0 * vy)).sqrt();
            let v = m_x * c / (2.0 * vx * u);
            let big_w = root * u;
            // exponents combined so nothing overflows: v^2 <= m^2/(2 vx)
            let e1 = v * v - m_x * m_x / (2.0 * vx);
            let t = big_w - v;
            let term = PI.sqrt() * v * erfc(t) * e1.exp() + (e1 - t * t).exp();
            term / (4.0 * PI * sx * sy * u * u)
        };
        let v = quad::integrate_oscillatory(integrand, -PI, PI, 16, spec)?;
        probs.push(v.clamp(0.0, 1.0));
    }
    Ok(CcdfCurve {
        thresholds: thresholds.to_vec(),
        probs,
        method: CcdfMethod::PreciseGaussian,
        std_err: None,
    })
}

/// Equal-variance (Rice) approximation: `Q1(sqrt(2) m_x, sqrt(2 N P0))`.
pub fn ccdf_marcum(mom: &GaussianMoments, thresholds: &[f64]) -> Result<CcdfCurve> {
    let n = mom.n_nodes as f64;
    let a = std::f64::consts::SQRT_2 * mom.m_x.abs();
    let probs = thresholds
        .iter()
        .map(|&p0| marcum_q1(a, (2.0 * n * p0.max(0.0)).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CcdfCurve {
        thresholds: thresholds.to_vec(),
        probs,
        method: CcdfMethod::Marcum,
        std_err: None,
    })
}

/// Zero-mean (Rayleigh) approximation: `exp(-N P0)`.
pub fn ccdf_rayleigh(n_nodes: usize, thresholds: &[f64]) -> CcdfCurve {
    let n = n_nodes as f64;
    CcdfCurve {
        thresholds: thresholds.to_vec(),
        probs: thresholds
            .iter()
            .map(|&p0| (-n * p0.max(0.0)).exp())
            .collect(),
        method: CcdfMethod::Rayleigh,
        std_err: None,
    }
}

/// Empirical CCDF over seeded Monte Carlo realizations, with binomial
/// standard errors.
pub fn mc_ccdf(
    cfg: &ArrayConfig,
    phi: f64,
    thresholds: &[f64],
    n_trials: usize,
) -> Result<CcdfCurve> {
    if n_trials < 100 {
        return Err(Error::domain("mc_ccdf", "need at least 100 trials"));
    }
    let powers: Vec<f64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = sample_realization(cfg, t);
            array_factor(&real, phi, cfg.r_tilde).norm_sqr()
        })
        .collect();
    let n = n_trials as f64;
    let mut probs = Vec::with_capacity(thresholds.len());
    let mut se = Vec::with_capacity(thresholds.len());
    for &p0 in thresholds {
        let count = powers.iter().filter(|&&p| p > p0).count();
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

/// Squared mean of the in-phase sum inside the 3 dB sidelobe region,
/// `|E X|^2 = N j1_ratio(alpha)^2`, checked against its unity-order
/// bound `1 / (1 - 1/N)`.
pub fn zero_mean_bound(n_nodes: usize, r_tilde: f64, phi: f64) -> Result<f64> {
    let region = sidelobe_region(n_nodes, r_tilde)?;
    if !region.contains(phi) {
        return Err(Error::OutsideRegion {
            phi,
            phi_zero: region.phi_zero,
        });
    }
    let n = n_nodes as f64;
    let r = j1_ratio_unchecked(alpha(phi, r_tilde));
    let value = n * r * r;
    let bound = 1.0 / (1.0 - 1.0 / n);
    if value > bound {
        return Err(Error::numeric(
            "zero_mean_bound",
            format!("|E X|^2 = {value} exceeds {bound}"),
        ));
    }
    Ok(value)
}
