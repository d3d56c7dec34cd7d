use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Adaptive quadrature exhausted its subdivision budget before
    /// reaching the requested tolerance. Carries the residual estimate.
    #[error("quadrature did not converge in {op}: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    Quadrature {
        op: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// The requested lobe index does not exist inside the visible region
    /// for this normalized radius (arcsine argument exceeds 1).
    #[error("lobe {lobe} is outside the visible region for r_tilde = {r_tilde}")]
    OutOfVisibleRegion { lobe: usize, r_tilde: f64 },

    /// The 3 dB sidelobe region is empty for this configuration.
    #[error("empty sidelobe region for n_nodes = {n_nodes}, r_tilde = {r_tilde}")]
    EmptyRegion { n_nodes: usize, r_tilde: f64 },

    /// The query angle lies outside the 3 dB sidelobe region.
    #[error("angle {phi} rad is outside the sidelobe region [{phi_zero}, pi]")]
    OutsideRegion { phi: f64, phi_zero: f64 },

    /// A level or threshold falls outside the regime where the formula
    /// is meaningful (e.g. normalized power below 1/2 in the crossing bound).
    #[error("regime error in {op}: {message}")]
    Regime { op: &'static str, message: String },

    /// The inversion grid cannot represent the density at the requested
    /// accuracy; the caller should retry with a larger grid.
    #[error("resolution error: density mass {mass:.3e} escapes the support box; increase grid_size above {grid_size}")]
    Resolution { mass: f64, grid_size: usize },

    /// A root bracket or internal consistency check failed.
    #[error("numeric error in {op}: {message}")]
    Numeric { op: &'static str, message: String },

    /// The distribution degenerates to a point mass (e.g. r_max = 0);
    /// callers handle this case analytically.
    #[error("degenerate point mass in {op}")]
    DegeneratePointMass { op: &'static str },
}

impl Error {
    pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }

    pub(crate) fn numeric(op: &'static str, message: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            message: message.into(),
        }
    }

    pub(crate) fn regime(op: &'static str, message: impl Into<String>) -> Self {
        Error::Regime {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
