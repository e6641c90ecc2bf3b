use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("tau = {tau} is inside the short-time singular region (tau_min = {tau_min})")]
    ShortTimeSingularity { tau: f64, tau_min: f64 },

    #[error("{what}: quadrature did not converge (partial value {value}, err {err})")]
    Convergence { what: String, value: f64, err: f64 },

    #[error("kernel evaluation failed at tau = {tau}: {source}")]
    KernelPoint {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("contour resolution: phase increment {increment} rad not resolved after refinement")]
    ContourResolution { increment: f64 },

    #[error("contour degenerate: |F| = {modulus} at z = {re}{im:+}i")]
    ContourDegenerate { modulus: f64, re: f64, im: f64 },

    #[error("winding number {value} is not within 1e-3 of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("near-resonance: |denominator| = {modulus} at omega = {omega}")]
    NearResonance { omega: f64, modulus: f64 },

    #[error("bandwidth: {fraction:e} of the spectral energy sits in the top decade; increase n_samples")]
    Bandwidth { fraction: f64 },

    #[error("runaway overflow: exp(T/tau_r) overflows for T = {t}, runaway timescale tau_r = {timescale}")]
    Overflow { t: f64, timescale: f64 },

    #[error("grid error: {0}")]
    Grid(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// Partial value carried by a convergence failure, if any.
    pub fn partial_value(&self) -> Option<f64> {
        match self {
            Error::Convergence { value, .. } => Some(*value),
            Error::KernelPoint { source, .. } => source.partial_value(),
            _ => None,
        }
    }

    pub fn is_convergence(&self) -> bool {
        match self {
            Error::Convergence { .. } => true,
            Error::KernelPoint { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}
