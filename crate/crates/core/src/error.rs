use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tolerance)")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not a projection (idempotence defect {defect:.3e})")]
    NotAProjection { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid spectral family: {0}")]
    InvalidFamily(String),

    #[error("operator is a multiple of the identity and generates the trivial algebra")]
    ScalarOperator,

    #[error("atoms do not form a partition of the identity: {0}")]
    NotAPartition(String),

    #[error("context {sub} is not included in context {sup}")]
    NotIncluded { sub: String, sup: String },

    #[error("element does not belong to context {context}")]
    NotInContext { context: String },

    #[error("contexts of different dimensions cannot share a poset")]
    MixedDimensions,

    #[error("operands were built over different context posets")]
    PosetMismatch,

    #[error("family of subsets is not closed under restriction at {sup} -> {sub}")]
    NotRestrictionClosed { sup: String, sub: String },

    #[error("a filter cannot be generated by the zero projection")]
    ImproperFilter,

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}
