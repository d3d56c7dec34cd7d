//! Special functions and quadrature shared by every analytic formula:
//! Bessel `J0`/`J1`, the mainlobe ratio `2J1(x)/x`, the modified-Bessel
//! ratio `I1/I0`, the first-order Marcum-Q function, and the three
//! generalized hypergeometric values evaluated through their integral
//! representations.
//!
//! All operations are pure and reentrant.

mod bessel;
mod hyper;
mod marcum;

pub use bessel::{bessel_i_ratio, bessel_j0, bessel_j1, j1_ratio};
pub use hyper::{hyp1f2_angle, hyp1f2_radial, hyp2f3_sidelobe};
pub use marcum::marcum_q1;

pub(crate) use bessel::{i0_scaled, j1_ratio_unchecked};

/// Complementary error function (FDLIBM implementation).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
