use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at k = {k} is inside the exclusion radius of the singular point {nearest} (distance {dist:.3e})")]
    NearSingularity {
        k: Complex64,
        nearest: Complex64,
        dist: f64,
    },

    #[error("Volterra iteration did not converge after {iterations} iterations (last residual {residual:.3e}) at k = {k}")]
    NonConvergence {
        k: Complex64,
        iterations: usize,
        residual: f64,
    },

    #[error("|s11| = {s11_abs:.3e} below tolerance at k = {k}: near-zero denominator (possible soliton)")]
    NearZeroDenominator { k: Complex64, s11_abs: f64 },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("solver did not converge: {0}")]
    SolverFailure(String),

    #[error("input file {path}: {msg}")]
    Input { path: String, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
