use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// Hypergeometric argument at or beyond the branch point z = 1.
    #[error("hypergeometric argument z = {z} is at or beyond the singular point")]
    Singularity { z: f64 },

    /// The requested evaluation route does not cover this argument.
    #[error("out of regime: {0}")]
    OutOfRegime(&'static str),

    /// Evaluation point lies outside the closed cone where the kernel lives.
    #[error("point lies outside the support of the kernel")]
    Support,

    /// Pointwise K0 requested on the locus z = e^t - 1.
    #[error("K0 has no pointwise value at z = e^t - 1 (z = {z}, t = {t})")]
    SingularLocus { z: f64, t: f64 },

    /// Quadrature did not reach the requested tolerance.
    #[error("tolerance not reached: best estimate {estimate} with error {est_err}")]
    Accuracy { estimate: f64, est_err: f64 },

    #[error("dimension {0} is not supported")]
    UnsupportedDimension(usize),

    /// Invalid solver or grid setup.
    #[error("invalid setup: {0}")]
    Setup(&'static str),

    /// Sampled field does not cover the support it declares.
    #[error("field window [{lo}, {hi}] does not cover the declared support radius {support}")]
    Coverage { lo: f64, hi: f64, support: f64 },

    /// Finite-difference domain too small for the region of influence.
    #[error("domain too small: the data can reach within {cells} cells of the boundary")]
    DomainTooSmall { cells: f64 },
}
