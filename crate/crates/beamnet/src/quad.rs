//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7/15-point Gauss–Kronrod rule is applied per panel; the panel with
//! the largest error estimate is bisected until the summed error meets
//! the tolerance or the subdivision budget is spent. Evaluation order is
//! fixed, so repeated calls with identical inputs are bit-identical.

use crate::error::{Error, Result};

/// Tolerances and budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral.
    pub abs_tol: f64,
    /// Relative tolerance on the integral.
    pub rel_tol: f64,
    /// Maximum number of panels (initial seeds included).
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 {
            return Err(Error::domain(
                "QuadratureSpec::new",
                format!("invalid spec: abs_tol={abs_tol}, rel_tol={rel_tol}, max_subdivisions={max_subdivisions}"),
            ));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// A spec with enough panel budget for integrands whose oscillation
    /// count scales with the normalized radius (average-pattern and
    /// hypergeometric integrals at large `r_tilde`).
    pub fn for_oscillatory(r_tilde: f64) -> Self {
        let base = QuadratureSpec::default();
        QuadratureSpec {
            max_subdivisions: base.max_subdivisions.max(64 * (r_tilde.ceil() as usize + 1)),
            ..base
        }
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights,
// with the embedded 7-point Gauss weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod pass over [a, b]: returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let integral = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    resasc *= half.abs();
    // QUADPACK error rescaling.
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    let min_err = 50.0 * f64::EPSILON * resabs * half.abs();
    if min_err > err {
        err = min_err;
    }
    (integral, err)
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over [a, b] with panels seeded at `breaks` (must start
/// at `a`, end at `b`, and be increasing). Plain adaptive use seeds a
/// single panel.
pub fn integrate_seeded<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    assert!(breaks.len() >= 2, "need at least one panel");
    if breaks.len() - 1 > spec.max_subdivisions {
        return Err(Error::Quadrature {
            op: "integrate_seeded",
            residual: f64::INFINITY,
            tolerance: spec.abs_tol,
        });
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(spec.max_subdivisions);
    for w in breaks.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            return Ok((total, err));
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                op: "integrate_seeded",
                residual: err,
                tolerance: tol,
            });
        }
        // Split the worst panel (first of equals, for determinism).
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            // Interval collapsed to machine precision; accept what we have.
            return Ok((total, err));
        }
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            error: e2,
        });
    }
}

/// Adaptive integral of `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_seeded(f, &[a, b], spec).map(|(v, _)| v)
}

/// Adaptive integral with `n_seed` uniform initial panels, for integrands
/// with a known oscillation count.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n_seed: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = n_seed.max(1);
    let breaks: Vec<f64> = (0..=n)
        .map(|i| a + (b - a) * (i as f64) / (n as f64))
        .collect();
    integrate_seeded(f, &breaks, spec).map(|(v, _)| v)
}

/// Bisection root finder on [a, b]; `f(a)` and `f(b)` must bracket a root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numeric(
            "bisect",
            format!("no sign change on [{a}, {b}]: f(a)={fa:.3e}, f(b)={fb:.3e}"),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) < tol {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
