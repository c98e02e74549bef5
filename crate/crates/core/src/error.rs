use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("not a Descartes quadruple {entries:?}: Q = {residual}")]
    NotDescartes { entries: [i128; 4], residual: i128 },

    #[error("{0}")]
    Domain(String),

    #[error("root reduction of {start:?} did not terminate within {steps} swaps")]
    ReductionDiverged { start: [i128; 4], steps: usize },

    #[error("point coincides with the mirror center")]
    PoleAtCenter,

    #[error("circles are not tangent (residual {0:e})")]
    NotTangent(f64),

    #[error("two distinct circles share a dedup key at curvature {curvature}")]
    ToleranceCollision { curvature: f64 },

    #[error("size cap exceeded: more than {cap} {what}")]
    SizeCap { what: &'static str, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("ratio undefined: denominator region contains no circles")]
    UndefinedRatio,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for invalid input or configuration, 3 for
    /// numeric failures and exceeded caps.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow(_)
            | Error::ReductionDiverged { .. }
            | Error::ToleranceCollision { .. }
            | Error::SizeCap { .. }
            | Error::NoConvergence { .. }
            | Error::UndefinedRatio => 3,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
