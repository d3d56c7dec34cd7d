//! Average-pattern degradation under imperfect phase.
//!
//! Closed loop: each node self-phases against a beacon and carries
//! residual Tikhonov (von Mises) phase jitter with loop SNR
//! `rho = 1/sigma^2`; the mainlobe term is scaled by `|I1(rho)/I0(rho)|^2`.
//!
//! Open loop: each node presets its phase from estimated coordinates;
//! radial errors uniform on `[-r_max, r_max]` and angular errors uniform
//! on `[-psi_max, psi_max]` contribute the attenuation factors `A_r` and
//! `A_psi(phi)`. Monte Carlo counterparts apply the exact per-node phase
//! expressions with no independence shortcut.

use crate::array::{alpha, sample_realization, ArrayConfig, McPatternStats};
use crate::error::{Error, Result};
use crate::quad::{self, QuadratureSpec};
use crate::specfun::{bessel_i_ratio, hyp1f2_angle, hyp1f2_radial, i0_scaled, j1_ratio_unchecked};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Closed-loop phase-noise parameters: loop SNR `rho = 1/sigma_phi^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopParams {
    pub loop_snr: f64,
}

impl ClosedLoopParams {
    pub fn new(loop_snr: f64) -> Result<Self> {
        if !(loop_snr > 0.0) || !loop_snr.is_finite() {
            return Err(Error::domain(
                "ClosedLoopParams::new",
                format!("loop_snr must be finite and > 0, got {loop_snr}"),
            ));
        }
        Ok(ClosedLoopParams { loop_snr })
    }

    pub fn sigma2_phi(&self) -> f64 {
        1.0 / self.loop_snr
    }
}

/// Open-loop location-error bounds, both normalized: radial error bound
/// `r_max / lambda` and angular error bound `psi_max` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenLoopParams {
    pub rmax_over_lambda: f64,
    pub psi_max: f64,
}

impl OpenLoopParams {
    pub fn new(rmax_over_lambda: f64, psi_max: f64) -> Result<Self> {
        if !(rmax_over_lambda >= 0.0) || !(0.0..=PI).contains(&psi_max) {
            return Err(Error::domain(
                "OpenLoopParams::new",
                format!("need r_max/lambda >= 0 and psi_max in [0, pi], got ({rmax_over_lambda}, {psi_max})"),
            ));
        }
        Ok(OpenLoopParams {
            rmax_over_lambda,
            psi_max,
        })
    }
}

/// Impairment scenario selector for the Monte Carlo pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "scenario")]
pub enum Impairment {
    ClosedLoop(ClosedLoopParams),
    OpenLoop(OpenLoopParams),
}

/// Tikhonov (von Mises) phase-noise density on [-pi, pi]:
/// `exp(cos(x)/sigma^2) / (2 pi I0(1/sigma^2))`, evaluated in scaled
/// form so large loop SNRs do not overflow.
pub fn tikhonov_pdf(x: f64, p: &ClosedLoopParams) -> Result<f64> {
    if !(x.abs() <= PI) {
        return Err(Error::domain(
            "tikhonov_pdf",
            format!("|x| must be <= pi, got {x}"),
        ));
    }
    let rho = p.loop_snr;
    Ok((rho * (x.cos() - 1.0)).exp() / (2.0 * PI * i0_scaled(rho)))
}

/// Draw one Tikhonov phase via the Best-Fisher wrapped-Cauchy rejection
/// sampler (exact for every concentration).
pub fn sample_tikhonov<R: Rng + ?Sized>(p: &ClosedLoopParams, rng: &mut R) -> f64 {
    let kappa = p.loop_snr;
    if kappa < 1e-6 {
        // indistinguishable from uniform at double precision
        return rng.gen::<f64>() * 2.0 * PI - PI;
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.gen();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.gen();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.gen();
            return if u3 > 0.5 { f.acos() } else { -f.acos() };
        }
    }
}

/// Phase-coherence attenuation `A_phi = I1(rho) / I0(rho)`.
pub fn attenuation_phase(p: &ClosedLoopParams) -> f64 {
    bessel_i_ratio(p.loop_snr).expect("loop_snr validated at construction")
}

/// Closed-loop average pattern
/// `1/N + (1 - 1/N) j1_ratio(alpha)^2 |A_phi|^2`.
pub fn avg_pattern_closed_loop(
    n_nodes: usize,
    r_tilde: f64,
    phi: f64,
    p: &ClosedLoopParams,
) -> f64 {
    let n = n_nodes as f64;
    let r = j1_ratio_unchecked(alpha(phi, r_tilde));
    let a = attenuation_phase(p);
    1.0 / n + (1.0 - 1.0 / n) * r * r * a * a
}

/// Density of the effective radial phase perturbation `v` (same
/// normalization as `r_max`): a logarithmic law with an integrable
/// singularity at v = 0 and value 0 at the endpoints.
pub fn radial_error_pdf(v: f64, p: &OpenLoopParams) -> Result<f64> {
    let rmax = p.rmax_over_lambda;
    if rmax == 0.0 {
        return Err(Error::DegeneratePointMass {
            op: "radial_error_pdf",
        });
    }
    let t = v.abs() / rmax;
    if t > 1.0 {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = (1.0 - t * t).max(0.0).sqrt();
    Ok(((1.0 + s).ln() - t.ln()) / (PI * rmax))
}

/// Radial-error attenuation `A_r` via the radial hypergeometric at
/// `x = pi r_max / lambda`; equals 1 for r_max = 0.
pub fn attenuation_radial(p: &OpenLoopParams, spec: &QuadratureSpec) -> Result<f64> {
    hyp1f2_radial(PI * p.rmax_over_lambda, spec)
}

/// Angular-error attenuation
/// `A_psi(phi) = E_{d}[ j1_ratio(4 pi r_tilde sin((phi - d)/2)) ]`
/// with `d` uniform on `[-psi_max, psi_max]`; reduces to the plain
/// mainlobe ratio at psi_max = 0.
pub fn attenuation_angle(
    phi: f64,
    p: &OpenLoopParams,
    r_tilde: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if p.psi_max == 0.0 {
        return Ok(j1_ratio_unchecked(alpha(phi, r_tilde)));
    }
    let w = p.psi_max;
    // the integrand oscillates on the alpha scale: lobe count ~ 2 r_tilde w
    let seeds = ((4.0 * r_tilde * w).ceil() as usize + 4).min(spec.max_subdivisions / 2 + 1);
    let f = |d: f64| j1_ratio_unchecked(4.0 * PI * r_tilde * (0.5 * (phi - d)).sin());
    let v = quad::integrate_oscillatory(f, -w, w, seeds, spec)?;
    Ok(v / (2.0 * w))
}

/// Two-term small-angle expansion of `A_psi(phi)` around the mainbeam,
/// written with the angular hypergeometric exactly as published:
/// `1/2 (1 - phi/psi_max) F(pi r_tilde (phi + psi_max))
///  + 1/2 (1 + phi/psi_max) F(pi r_tilde (phi - psi_max))`.
///
/// Trust it only for |phi| well inside the mainbeam: away from phi = 0
/// the published weights disagree with the exact average
/// [`attenuation_angle`] (which Monte Carlo confirms); at phi = 0 the
/// two coincide. Documented range: |phi| <= 4 psi_max.
pub fn apsi_mainbeam_approx(phi: f64, p: &OpenLoopParams, r_tilde: f64) -> Result<f64> {
    if p.psi_max == 0.0 {
        return Ok(j1_ratio_unchecked(alpha(phi, r_tilde)));
    }
    let spec = QuadratureSpec::default();
    let w = p.psi_max;
    let fp = hyp1f2_angle((PI * r_tilde * (phi + w)).abs(), &spec)?;
    let fm = hyp1f2_angle((PI * r_tilde * (phi - w)).abs(), &spec)?;
    Ok(0.5 * (1.0 - phi / w) * fp + 0.5 * (1.0 + phi / w) * fm)
}

/// Open-loop average pattern
/// `1/N + (1 - 1/N) |A_psi(phi)|^2 |A_r|^2`.
pub fn avg_pattern_open_loop(
    n_nodes: usize,
    r_tilde: f64,
    phi: f64,
    p: &OpenLoopParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = n_nodes as f64;
    let a_psi = attenuation_angle(phi, p, r_tilde, spec)?;
    let a_r = attenuation_radial(p, spec)?;
    Ok(1.0 / n + (1.0 - 1.0 / n) * a_psi * a_psi * a_r * a_r)
}

/// Monte Carlo mean pattern under an impairment scenario; exact per-node
/// phases, deterministic in (seed, stream), standard errors per angle.
pub fn mc_impaired_pattern(
    cfg: &ArrayConfig,
    grid: &[f64],
    scenario: &Impairment,
    n_trials: usize,
) -> Result<McPatternStats> {
    if n_trials < 100 {
        return Err(Error::domain(
            "mc_impaired_pattern",
            "need at least 100 trials",
        ));
    }
    let rows: Vec<Vec<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| one_impaired_pattern(cfg, grid, scenario, t))
        .collect();
    let (mean, std_err) = crate::array::mean_and_se_columns(&rows);
    Ok(McPatternStats {
        angles: grid.to_vec(),
        mean,
        std_err,
        n_trials,
        label: match scenario {
            Impairment::ClosedLoop(_) => "monte-carlo-closed-loop".to_string(),
            Impairment::OpenLoop(_) => "monte-carlo-open-loop".to_string(),
        },
    })
}

fn one_impaired_pattern(
    cfg: &ArrayConfig,
    grid: &[f64],
    scenario: &Impairment,
    stream: u64,
) -> Vec<f64> {
    let real = sample_realization(cfg, stream);
    let n = cfg.n_nodes;
    let nf = n as f64;
    // Draw the per-node error variables from the same stream, after the
    // positions, so a scenario change does not perturb the geometry draw.
    let mut rng = cfg.stream_rng(stream);
    for _ in 0..(2 * n) {
        let _: f64 = rng.gen();
    }
    match scenario {
        Impairment::ClosedLoop(p) => {
            let offsets: Vec<f64> = (0..n).map(|_| sample_tikhonov(p, &mut rng)).collect();
            grid.iter()
                .map(|&phi| {
                    let a = alpha(phi, cfg.r_tilde);
                    let (mut re, mut im) = (0.0, 0.0);
                    for ((&r, &psi), &off) in
                        real.radii.iter().zip(&real.angles).zip(&offsets)
                    {
                        let z = r * (psi - 0.5 * phi).sin();
                        let (s, c) = (-a * z + off).sin_cos();
                        re += c;
                        im += s;
                    }
                    (re * re + im * im) / (nf * nf)
                })
                .collect()
        }
        Impairment::OpenLoop(p) => {
            let dr: Vec<f64> = (0..n)
                .map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * p.rmax_over_lambda)
                .collect();
            let dpsi: Vec<f64> = (0..n)
                .map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * p.psi_max)
                .collect();
            grid.iter()
                .map(|&phi| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (((&r, &psi), &dr_k), &dpsi_k) in real
                        .radii
                        .iter()
                        .zip(&real.angles)
                        .zip(&dr)
                        .zip(&dpsi)
                    {
                        // exact preset-phase geometry: the phase preset
                        // from the erroneous coordinates minus the true
                        // far-field path, with no small-angle step
                        let preset = (psi + dpsi_k).cos();
                        let phase = 2.0 * PI * cfg.r_tilde * r * (preset - (phi - psi).cos())
                            + 2.0 * PI * dr_k * preset;
                        let (s, c) = phase.sin_cos();
                        re += c;
                        im += s;
                    }
                    (re * re + im * im) / (nf * nf)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::mc_average_pattern;
    use crate::average::average_pattern;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tikhonov_pdf_normalizes() {
        let spec = QuadratureSpec::default();
        for &rho in &[0.05, 1.0, 10.0, 300.0] {
            let p = ClosedLoopParams::new(rho).unwrap();
            let v = quad::integrate(|x| tikhonov_pdf(x, &p).unwrap(), -PI, PI, &spec).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn tikhonov_pdf_flattens_as_snr_vanishes() {
        let p = ClosedLoopParams::new(1e-9).unwrap();
        for &x in &[-3.0, -1.0, 0.0, 2.0] {
            assert_abs_diff_eq!(
                tikhonov_pdf(x, &p).unwrap(),
                1.0 / (2.0 * PI),
                epsilon = 1e-9
            );
        }
        assert!(tikhonov_pdf(3.3, &p).is_err());
    }

    #[test]
    fn tikhonov_sampler_matches_pdf() {
        // chi-square GOF at 1%, rho = 10, 1e6 samples, 40 bins
        let p = ClosedLoopParams::new(10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let bins = 40;
        let mut counts = vec![0usize; bins];
        let n = 1_000_000;
        for _ in 0..n {
            let x = sample_tikhonov(&p, &mut rng);
            let idx = (((x + PI) / (2.0 * PI) * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let spec = QuadratureSpec::default();
        let mut chi2 = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let a = -PI + 2.0 * PI * i as f64 / bins as f64;
            let b = -PI + 2.0 * PI * (i as f64 + 1.0) / bins as f64;
            let e = quad::integrate(|x| tikhonov_pdf(x, &p).unwrap(), a, b, &spec).unwrap()
                * n as f64;
            if e > 1.0 {
                chi2 += (c as f64 - e) * (c as f64 - e) / e;
            }
        }
        // 1% critical value for 39 degrees of freedom
        assert!(chi2 < 62.43, "chi2 = {chi2}");
    }

    #[test]
    fn tikhonov_sampler_extreme_concentrations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hi = ClosedLoopParams::new(2000.0).unwrap();
        for _ in 0..1000 {
            assert!(sample_tikhonov(&hi, &mut rng).abs() < 0.2);
        }
        let lo = ClosedLoopParams::new(1e-9).unwrap();
        let mean: f64 =
            (0..4000).map(|_| sample_tikhonov(&lo, &mut rng)).sum::<f64>() / 4000.0;
        assert!(mean.abs() < 0.15);
    }

    #[test]
    fn attenuation_phase_limits() {
        assert!(attenuation_phase(&ClosedLoopParams::new(1e4).unwrap()) > 0.999);
        assert!(attenuation_phase(&ClosedLoopParams::new(1e-6).unwrap()) < 1e-3);
        // half-power crossing within 0.5 dB of 3 dB loop SNR
        let crossing = crate::quad::bisect(
            |rho| {
                let a = attenuation_phase(&ClosedLoopParams::new(rho).unwrap());
                a * a - 0.5
            },
            0.5,
            10.0,
            1e-10,
        )
        .unwrap();
        let db = 10.0 * crossing.log10();
        assert!((db - 3.0).abs() < 0.5, "crossing at {db} dB");
    }

    #[test]
    fn closed_loop_pattern_reductions() {
        // infinite SNR reduces to the unimpaired average pattern
        let p = ClosedLoopParams::new(1e9).unwrap();
        for &phi in &[0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(
                avg_pattern_closed_loop(16, 2.0, phi, &p),
                average_pattern(16, 2.0, phi),
                epsilon = 1e-6
            );
        }
        // mainbeam scaling at large N approaches |A_phi|^2
        let p = ClosedLoopParams::new(4.0).unwrap();
        let a = attenuation_phase(&p);
        let v = avg_pattern_closed_loop(1_000_000, 2.0, 0.0, &p);
        assert_abs_diff_eq!(v, a * a, epsilon = 1e-5);
    }

    #[test]
    fn radial_pdf_properties() {
        let p = OpenLoopParams::new(0.25, 0.0).unwrap();
        // endpoint value is exactly zero
        assert_abs_diff_eq!(radial_error_pdf(0.25, &p).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(radial_error_pdf(-0.25, &p).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(radial_error_pdf(0.3, &p).unwrap(), 0.0);
        assert!(radial_error_pdf(0.0, &p).unwrap().is_infinite());
        // normalization, honoring the log singularity by splitting
        let spec = QuadratureSpec {
            max_subdivisions: 400,
            ..QuadratureSpec::default()
        };
        let inner = quad::integrate(
            |v| radial_error_pdf(v, &p).unwrap(),
            1e-12,
            0.25 / 100.0,
            &spec,
        )
        .unwrap();
        let outer = quad::integrate(
            |v| radial_error_pdf(v, &p).unwrap(),
            0.25 / 100.0,
            0.25,
            &spec,
        )
        .unwrap();
        assert_abs_diff_eq!(2.0 * (inner + outer), 1.0, epsilon = 1e-8);
        // degenerate bound
        let z = OpenLoopParams::new(0.0, 0.0).unwrap();
        assert!(matches!(
            radial_error_pdf(0.0, &z),
            Err(Error::DegeneratePointMass { .. })
        ));
    }

    #[test]
    fn radial_pdf_matches_compound_sampling() {
        // v = dr cos(theta) with dr uniform, theta uniform: chi-square GOF
        let p = OpenLoopParams::new(1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        let n = 1_000_000;
        let bins = 40;
        let mut counts = vec![0usize; bins];
        for _ in 0..n {
            let dr = rng.gen::<f64>() * 2.0 - 1.0;
            let th = rng.gen::<f64>() * 2.0 * PI;
            let v = dr * th.cos();
            let idx = (((v + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let spec = QuadratureSpec {
            max_subdivisions: 400,
            ..QuadratureSpec::default()
        };
        let mut chi2 = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let a = -1.0 + 2.0 * i as f64 / bins as f64;
            let b = a + 2.0 / bins as f64;
            // handle the singular central bin by splitting at zero
            let e = if a < 0.0 && b > 0.0 {
                quad::integrate(|v| radial_error_pdf(v, &p).unwrap(), a, -1e-12, &spec).unwrap()
                    + quad::integrate(|v| radial_error_pdf(v, &p).unwrap(), 1e-12, b, &spec)
                        .unwrap()
            } else {
                quad::integrate(|v| radial_error_pdf(v, &p).unwrap(), a, b, &spec).unwrap()
            } * n as f64;
            chi2 += (c as f64 - e) * (c as f64 - e) / e;
        }
        // 1% critical value for 39 degrees of freedom
        assert!(chi2 < 62.43, "chi2 = {chi2}");
    }

    #[test]
    fn attenuation_radial_limits() {
        let spec = QuadratureSpec::default();
        let z = OpenLoopParams::new(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(attenuation_radial(&z, &spec).unwrap(), 1.0, epsilon = 1e-9);
        // Monte Carlo double expectation E{cos(2 pi v / lambda)}
        let p = OpenLoopParams::new(0.3, 0.0).unwrap();
        let analytic = attenuation_radial(&p, &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let dr = (rng.gen::<f64>() * 2.0 - 1.0) * 0.3;
            let th = rng.gen::<f64>() * 2.0 * PI;
            let c = (2.0 * PI * dr * th.cos()).cos();
            s += c;
            s2 += c * c;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(
            (analytic - mean).abs() < 3.0 * se,
            "analytic {analytic} vs mc {mean} (se {se})"
        );
    }

    #[test]
    fn radial_half_power_crossing() {
        // |A_r|^2 = 1/2 at r_max/lambda ~ 0.322 (frozen oracle, 2% gate)
        let spec = QuadratureSpec::default();
        let crossing = crate::quad::bisect(
            |rm| {
                let p = OpenLoopParams::new(rm, 0.0).unwrap();
                let a = attenuation_radial(&p, &spec).unwrap();
                a * a - 0.5
            },
            0.1,
            0.6,
            1e-10,
        )
        .unwrap();
        assert!(
            ((crossing - 0.32206) / 0.32206).abs() < 0.02,
            "crossing {crossing}"
        );
    }

    #[test]
    fn attenuation_angle_reductions() {
        let spec = QuadratureSpec::default();
        let z = OpenLoopParams::new(0.0, 0.0).unwrap();
        assert_eq!(attenuation_angle(0.0, &z, 4.0, &spec).unwrap(), 1.0);
        // at phi = 0 the closed form applies once psi_max itself is small
        // (the sin(d/2) ~ d/2 step carries a psi_max^2/24 relative error)
        for &(rt, w) in &[(10.0f64, 0.02f64), (20.0, 0.025), (5.0, 0.04)] {
            let p = OpenLoopParams::new(0.0, w).unwrap();
            let exact = attenuation_angle(0.0, &p, rt, &spec).unwrap();
            let approx = hyp1f2_angle(PI * rt * w, &spec).unwrap();
            assert!(
                (exact - approx).abs() < 1e-4,
                "rt={rt} w={w}: {exact} vs {approx}"
            );
        }
        // wider error cones agree to the looser mainbeam tolerance
        for &(rt, w) in &[(2.0f64, 0.25f64), (4.0, 0.125)] {
            let p = OpenLoopParams::new(0.0, w).unwrap();
            let exact = attenuation_angle(0.0, &p, rt, &spec).unwrap();
            let approx = hyp1f2_angle(PI * rt * w, &spec).unwrap();
            assert!(
                (exact - approx).abs() < 1e-3,
                "rt={rt} w={w}: {exact} vs {approx}"
            );
        }
    }

    #[test]
    fn angle_half_power_at_recommended_error_bound() {
        // psi_max = 1/(2 r_tilde): |A_psi(0)|^2 within 0.5 dB of -3 dB
        let spec = QuadratureSpec::default();
        for &rt in &[2.0, 8.0] {
            let p = OpenLoopParams::new(0.0, 1.0 / (2.0 * rt)).unwrap();
            let a = attenuation_angle(0.0, &p, rt, &spec).unwrap();
            let db = 10.0 * (a * a).log10();
            assert!((db + 3.0).abs() < 0.5, "rt={rt}: {db} dB");
        }
    }

    #[test]
    fn approx_weights_match_published_form() {
        let p = OpenLoopParams::new(0.0, 0.1).unwrap();
        let spec = QuadratureSpec::default();
        // at phi = psi_max one factor reaches its maximum of 1
        let v = apsi_mainbeam_approx(0.1, &p, 4.0).unwrap();
        let expected = hyp1f2_angle(0.0, &spec).unwrap(); // = 1, with weight 1
        assert_abs_diff_eq!(v, expected, epsilon = 1e-9);
        // at phi = 0 it matches the exact quadrature
        let exact = attenuation_angle(0.0, &p, 4.0, &spec).unwrap();
        let approx = apsi_mainbeam_approx(0.0, &p, 4.0).unwrap();
        assert!((exact - approx).abs() < 1e-3);
        // psi_max -> 0 degenerates to the mainlobe ratio
        let z = OpenLoopParams::new(0.0, 0.0).unwrap();
        assert_eq!(apsi_mainbeam_approx(0.0, &z, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn open_loop_pattern_reductions() {
        let spec = QuadratureSpec::default();
        let z = OpenLoopParams::new(0.0, 0.0).unwrap();
        for &phi in &[0.0, 0.4, 1.3] {
            assert_abs_diff_eq!(
                avg_pattern_open_loop(16, 2.0, phi, &z, &spec).unwrap(),
                average_pattern(16, 2.0, phi),
                epsilon = 1e-9
            );
        }
        // the floor term is untouched by errors
        let p = OpenLoopParams::new(0.3, 0.2).unwrap();
        let v = avg_pattern_open_loop(16, 2.0, 3.0, &p, &spec).unwrap();
        assert!(v >= 1.0 / 16.0);
    }

    #[test]
    fn mc_zero_error_reduces_to_average_pattern() {
        let cfg = ArrayConfig::new(16, 2.0, 2222).unwrap();
        let grid: Vec<f64> = (0..9).map(|i| -1.2 + 0.3 * i as f64).collect();
        let scen = Impairment::OpenLoop(OpenLoopParams::new(0.0, 0.0).unwrap());
        let mc = mc_impaired_pattern(&cfg, &grid, &scen, 4000).unwrap();
        for (i, &phi) in grid.iter().enumerate() {
            let dev = (mc.mean[i] - average_pattern(16, 2.0, phi)).abs()
                / mc.std_err[i].max(1e-12);
            assert!(dev < 3.5, "phi={phi}: {dev} SE");
        }
    }

    #[test]
    fn mc_closed_loop_matches_analytic() {
        let cfg = ArrayConfig::new(16, 2.0, 512).unwrap();
        let p = ClosedLoopParams::new(4.0).unwrap();
        let grid = [0.0, PI / 8.0, 0.9];
        let mc =
            mc_impaired_pattern(&cfg, &grid, &Impairment::ClosedLoop(p), 30_000).unwrap();
        for (i, &phi) in grid.iter().enumerate() {
            let analytic = avg_pattern_closed_loop(16, 2.0, phi, &p);
            let dev = (mc.mean[i] - analytic).abs() / mc.std_err[i];
            assert!(dev < 3.5, "phi={phi}: {dev} SE");
        }
    }

    #[test]
    fn mc_open_loop_matches_analytic_product() {
        // The analytic product form assumes the compound variable and the
        // radial perturbation are independent; the measured bias of that
        // assumption is ~0.7% here, so the 5-SE agreement gate is
        // meaningful at 2.5e3 trials (bias stays under ~2.5 SE) and the
        // absolute gap is checked separately below.
        let cfg = ArrayConfig::new(16, 2.0, 71).unwrap();
        let p = OpenLoopParams::new(0.1, 0.05).unwrap();
        let spec = QuadratureSpec::default();
        let grid = [0.0, 0.1, 0.35];
        let mc = mc_impaired_pattern(&cfg, &grid, &Impairment::OpenLoop(p), 2_500).unwrap();
        for (i, &phi) in grid.iter().enumerate() {
            let analytic = avg_pattern_open_loop(16, 2.0, phi, &p, &spec).unwrap();
            let dev = (mc.mean[i] - analytic).abs() / mc.std_err[i];
            assert!(dev < 5.0, "phi={phi}: {dev} SE");
        }
    }

    #[test]
    fn open_loop_independence_gap_is_small_and_reported() {
        // Surface the z/v-dependence bias as data: at these parameters
        // the relative gap between the exact-phase Monte Carlo mean and
        // the independence-based product form stays below 2%.
        let cfg = ArrayConfig::new(16, 2.0, 314).unwrap();
        let p = OpenLoopParams::new(0.1, 0.05).unwrap();
        let spec = QuadratureSpec::default();
        let grid = [0.0, 0.1, 0.35];
        let mc = mc_impaired_pattern(&cfg, &grid, &Impairment::OpenLoop(p), 200_000).unwrap();
        for (i, &phi) in grid.iter().enumerate() {
            let analytic = avg_pattern_open_loop(16, 2.0, phi, &p, &spec).unwrap();
            let rel = (mc.mean[i] - analytic) / analytic;
            println!(
                "open-loop independence gap at phi={phi}: {:+.4}% ({} vs {})",
                100.0 * rel,
                mc.mean[i],
                analytic
            );
            assert!(rel.abs() < 0.03, "phi={phi}: relative gap {rel}");
        }
    }

    #[test]
    fn mc_trials_floor_enforced() {
        let cfg = ArrayConfig::new(8, 2.0, 1).unwrap();
        let scen = Impairment::ClosedLoop(ClosedLoopParams::new(2.0).unwrap());
        assert!(mc_impaired_pattern(&cfg, &[0.0], &scen, 99).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ClosedLoopParams::new(0.0).is_err());
        assert!(ClosedLoopParams::new(-1.0).is_err());
        assert!(OpenLoopParams::new(-0.1, 0.0).is_err());
        assert!(OpenLoopParams::new(0.1, 4.0).is_err());
    }
}
