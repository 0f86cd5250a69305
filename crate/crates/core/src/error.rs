use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("enumeration bound exceeded: {what} (limit {limit})")]
    BoundExceeded { what: String, limit: usize },

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("poset is not good (no least element)")]
    NotGood,

    #[error("poset is not directed")]
    NotDirected,

    #[error("not an initial segment: {0}")]
    NotInitialSegment(String),

    #[error("diagram is not functorial along {lower} <= {upper}")]
    NotFunctorial { lower: String, upper: String },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("diagram is not smooth at limit element `{0}`")]
    NotSmooth(String),

    #[error("link at `{0}` admits no Po(X) certificate")]
    LinkNotCertified(String),

    #[error("morphism is not idempotent")]
    NotIdempotent,

    #[error("idempotent does not fix the base: {0}")]
    NotUnderBase(String),

    #[error("duplicate cell: {0}")]
    DuplicateCell(String),

    #[error("no factorization found: {0}")]
    NoFactorization(String),

    #[error("verification failed at {witness}: {reason}")]
    Verification { witness: String, reason: String },

    #[error("unsupported certificate version {0}")]
    CertVersion(u32),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn verification(witness: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Verification { witness: witness.into(), reason: reason.into() }
    }

    pub(crate) fn bound(what: impl Into<String>, limit: usize) -> Self {
        Error::BoundExceeded { what: what.into(), limit }
    }

    /// Prefixes the witness path of a verification error with `ctx`.
    pub fn within(self, ctx: &str) -> Self {
        match self {
            Error::Verification { witness, reason } => {
                Error::Verification { witness: format!("{ctx}/{witness}"), reason }
            }
            other => Error::Verification { witness: ctx.to_string(), reason: other.to_string() },
        }
    }
}
