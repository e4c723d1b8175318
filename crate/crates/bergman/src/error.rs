use crate::numerics::QuadResult;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a domain restriction (point outside the domain,
    /// non-positive gamma argument, radius out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A moment integral diverges for the requested parameters.
    #[error("divergent moment: alpha = {alpha}, weight (t = {t}, c = {c})")]
    DivergentMoment { alpha: f64, t: f64, c: f64 },

    /// An integral probed by quadrature grows without settling.
    #[error("divergent integral: {detail}")]
    DivergentIntegral { detail: String },

    /// A quadrature failed to reach the requested tolerance within its
    /// evaluation budget. Carries the best estimate obtained.
    #[error("quadrature failed to converge: {detail} (best value {value:.6e}, error estimate {err:.3e}, {evaluations} evaluations)", value = best.value, err = best.abs_error_estimate, evaluations = best.evaluations)]
    Convergence { best: QuadResult, detail: String },

    /// A truncation tail could not be certified for the requested arguments.
    #[error("uncertifiable truncation: {0}")]
    Truncation(String),

    /// A scan or sweep was configured with invalid geometry.
    #[error("invalid scan geometry: {0}")]
    Geometry(String),

    /// Invalid CLI / sweep configuration.
    #[error("usage error: field `{field}`: {message}")]
    Usage { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
