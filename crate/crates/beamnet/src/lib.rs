//! Beampattern statistics of randomly deployed disk arrays.
//!
//! `beamnet` analyzes what happens when N nodes scattered uniformly over
//! a disk of normalized radius `r_tilde = R / lambda` transmit with
//! phases preset so the target direction adds coherently. It provides:
//!
//! * the far-field array factor and beampattern of sampled realizations
//!   ([`array`]), with reproducible, stream-indexed Monte Carlo;
//! * closed-form ensemble statistics: average pattern, peak/zero
//!   positions, 3 dB beamwidth, 3 dB sidelobe region ([`average`]);
//! * per-realization directivity, its Monte Carlo mean, the analytic
//!   lower bound, and the node-density bound ([`directivity`]);
//! * the distribution of the pattern at a fixed angle: exact
//!   characteristic-function inversion plus the Gaussian-family
//!   approximations ([`ccdf`]);
//! * an upper bound on the peak-sidelobe outage from level-crossing
//!   theory, with Monte Carlo measurement ([`peak`]);
//! * average-pattern degradation under phase jitter (closed loop) and
//!   location-estimation errors (open loop) ([`impairments`]);
//! * the supporting special functions and adaptive quadrature
//!   ([`specfun`], [`quad`]).
//!
//! Everything stochastic is keyed by an explicit seed and stream index,
//! so batch results are identical regardless of how work is scheduled.

pub mod array;
pub mod average;
pub mod ccdf;
pub mod directivity;
mod error;
pub mod impairments;
pub mod peak;
pub mod quad;
pub mod specfun;

pub use array::{ArrayConfig, McPatternStats, NodeRealization, PatternCurve};
pub use average::SidelobeRegion;
pub use ccdf::{CcdfCurve, CcdfMethod, GaussianMoments};
pub use directivity::{DirectivityReport, Lemma1Constants, MeanWithSe};
pub use error::{Error, Result};
pub use impairments::{ClosedLoopParams, Impairment, OpenLoopParams};
pub use peak::OutageQuery;
pub use quad::QuadratureSpec;
