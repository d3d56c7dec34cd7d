//! Closed-form ensemble statistics of the beampattern: average pattern,
//! asymptotic peak/zero positions, 3 dB beamwidth, 3 dB sidelobe region.

use crate::array::alpha;
use crate::error::{Error, Result};
use crate::quad::bisect;
use crate::specfun::j1_ratio_unchecked;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Angles beyond `phi_zero` where average sidelobe peaks stay within
/// 3 dB of the floor `1/N`: the region `{ phi : phi_zero <= |phi| <= pi }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidelobeRegion {
    /// Index of the first compliant sidelobe peak.
    pub n0: usize,
    /// Zero angle bounding the region from below (radians, > 0).
    pub phi_zero: f64,
    pub r_tilde: f64,
    pub n_nodes: usize,
}

impl SidelobeRegion {
    pub fn contains(&self, phi: f64) -> bool {
        let a = phi.abs();
        self.phi_zero <= a && a <= PI
    }
}

/// Ensemble-average beampattern `1/N + (1 - 1/N) |2 J1(alpha)/alpha|^2`.
pub fn average_pattern(n_nodes: usize, r_tilde: f64, phi: f64) -> f64 {
    let n = n_nodes as f64;
    let r = j1_ratio_unchecked(alpha(phi, r_tilde));
    1.0 / n + (1.0 - 1.0 / n) * r * r
}

/// Asymptotic value of the n-th average sidelobe peak (independent of
/// the normalized radius).
pub fn peak_value(n: usize, n_nodes: usize) -> f64 {
    let nn = n_nodes as f64;
    let lobe = 2.0 / (PI * (n as f64 - 0.25));
    1.0 / nn + (1.0 - 1.0 / nn) * lobe.powi(3) / PI
}

/// Asymptotic angle of the n-th average sidelobe peak.
pub fn peak_angle(n: usize, r_tilde: f64) -> Result<f64> {
    lobe_angle(n, -0.25, r_tilde)
}

/// Asymptotic angle of the n-th zero of the mainlobe factor.
pub fn zero_angle(n: usize, r_tilde: f64) -> Result<f64> {
    lobe_angle(n, 0.25, r_tilde)
}

fn lobe_angle(n: usize, offset: f64, r_tilde: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("lobe_angle", "lobe index must be >= 1"));
    }
    let arg = (n as f64 + offset) / (4.0 * r_tilde);
    if arg > 1.0 {
        return Err(Error::OutOfVisibleRegion { lobe: n, r_tilde });
    }
    Ok(2.0 * arg.asin())
}

/// The half-power constant of the limiting average pattern, re-derived
/// by bisection on `|2 J1(x)/x|^2 = 1/2` and cached. Matches 0.1286.
pub fn beamwidth_constant() -> f64 {
    static CONST: OnceLock<f64> = OnceLock::new();
    *CONST.get_or_init(|| {
        // j1_ratio^2 falls monotonically from 1 to 0 on [0, first J1 zero).
        let f = |x: f64| {
            let r = j1_ratio_unchecked(x);
            r * r - 0.5
        };
        let x = bisect(f, 0.5, 3.8, 1e-12).expect("half-power bracket");
        let c = x / (4.0 * PI);
        assert!(
            (c - 0.1286).abs() < 1e-3,
            "derived beamwidth constant {c} disagrees with 0.1286"
        );
        c
    })
}

/// 3 dB beamwidth of the limiting (large-N) average pattern:
/// `2 arcsin(0.1286 / r_tilde)`.
pub fn beamwidth_3db(r_tilde: f64) -> Result<f64> {
    let c = beamwidth_constant();
    if !(r_tilde > 0.0) || !r_tilde.is_finite() {
        return Err(Error::domain(
            "beamwidth_3db",
            format!("r_tilde must be finite and > 0, got {r_tilde}"),
        ));
    }
    let arg = c / r_tilde;
    if arg > 1.0 {
        return Err(Error::regime(
            "beamwidth_3db",
            format!("no 3 dB crossing: r_tilde = {r_tilde} < {c:.4}"),
        ));
    }
    Ok(2.0 * arg.asin())
}

/// Smallest peak index whose asymptotic value stays within 3 dB of the
/// sidelobe floor, and the zero angle next to it.
pub fn sidelobe_region(n_nodes: usize, r_tilde: f64) -> Result<SidelobeRegion> {
    if n_nodes < 2 {
        return Err(Error::EmptyRegion { n_nodes, r_tilde });
    }
    let nn = n_nodes as f64;
    // analytic lower bound on n0, then scan upward
    let lower = 0.25 + (2.0 / PI) * ((nn - 1.0) / PI).cbrt();
    let mut n0 = (lower.ceil() as usize).max(1);
    while (nn - 1.0) * (2.0 / (PI * (n0 as f64 - 0.25))).powi(3) / PI > 1.0 {
        n0 += 1;
    }
    let phi_zero = zero_angle(n0, r_tilde).map_err(|e| match e {
        Error::OutOfVisibleRegion { .. } => Error::EmptyRegion { n_nodes, r_tilde },
        other => other,
    })?;
    Ok(SidelobeRegion {
        n0,
        phi_zero,
        r_tilde,
        n_nodes,
    })
}
