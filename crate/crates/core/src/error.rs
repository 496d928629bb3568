use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the region where the requested quantity exists.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// The elliptic modulus is so close to 1 that the cnoidal wave has
    /// degenerated into a solitary wave.
    #[error("degenerate modulus k = {k:.17} (must not exceed 1 - 1e-10)")]
    DegenerateModulus { k: f64 },

    #[error("insufficient resolution: differentiation noise {noise:.3e} exceeds {limit:.3e}")]
    Resolution { noise: f64, limit: f64 },

    #[error("Richardson derivative unstable: estimates {coarse:.12e} and {fine:.12e} differ by {rel:.3e} (relative)")]
    StepSize { coarse: f64, fine: f64, rel: f64 },

    #[error("root bracket not found for {what}")]
    NoBracket { what: &'static str },

    #[error("solution blew up at t = {time:.6}: max|u| = {max_abs:.6e}")]
    BlowUp { time: f64, max_abs: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("sequence is not strictly positive at n = {index}")]
    NotPositive { index: i64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
