use thiserror::Error;

/// Errors raised while evaluating, integrating or transforming identities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("attempt to invert zero")]
    ZeroValue,
    #[error("value is not a single pi-monomial")]
    NotMonomial,
    #[error("Gamma has a pole at {0}")]
    GammaPole(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("argument {0} is off the half-integer grid")]
    OffGrid(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("unbound parameter `{0}`")]
    UnboundParam(String),
    #[error("expected an integer, got {0}")]
    NonInteger(String),
    #[error("numeric pole near {0}")]
    NumericPole(String),
    #[error("quadrature did not converge after {levels} levels (error estimate {estimate})")]
    NoConvergence { levels: u32, estimate: String },
    #[error("unknown identity `{0}`")]
    UnknownId(String),
    #[error("input is not in standard form: {0}")]
    ShapeMismatch(String),
    #[error("parity structure of the exponent map is unsupported: {0}")]
    ParityStructureUnsupported(String),
    #[error("emitted identity failed verification: {0}")]
    TransformVerification(String),
    #[error("{0}")]
    Dsl(#[from] crate::dsl::DslError),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
