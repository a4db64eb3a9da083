//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by fallible operations.
///
/// Shape errors (mismatched matrix dimensions in low-level arithmetic) are
/// programming errors and panic instead; the variants here are the
/// recoverable conditions a caller can act on.
#[derive(Debug, Error)]
pub enum Error {
    /// `quotient_data` was asked to quotient by vectors outside the subspace.
    #[error("subspace is not contained in the ambient space: column {column} fails")]
    NotContained { column: usize },

    /// A solve had no solution.
    #[error("linear system is inconsistent")]
    Inconsistent,

    /// Input data failed structural validation.
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    /// A chain map does not commute with the differentials.
    #[error("not a chain map: d∘f ≠ f∘d in degree {degree}")]
    NotChainMap { degree: i64 },

    /// d² ≠ 0 for a would-be complex.
    #[error("differential does not square to zero in degree {degree}")]
    NotComplex { degree: i64 },

    /// Alexander-Whitney or a Thom-Sullivan product left the truncation.
    #[error("truncation exceeded: level {level} is beyond the truncation {limit}")]
    TruncationExceeded { level: usize, limit: usize },

    /// Form arithmetic got operands over different simplex dimensions.
    #[error("dimension mismatch: forms live over simplex dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Integration was asked for on a form of the wrong degree.
    #[error("degree mismatch: integration over the {n}-simplex needs a degree-{n} form, got degree {got}")]
    DegreeMismatch { n: usize, got: usize },

    /// The requested filtration step is missing from a package.
    #[error("missing filtration step {step}")]
    MissingFiltration { step: i64 },

    /// A zigzag homotopy limit was requested without the intermediate nodes.
    #[error("package does not carry zigzag nodes")]
    MissingNodes,

    /// A hypercover referenced a block library entry that does not exist.
    #[error("unknown block {name:?}")]
    BlockUnknown { name: String },

    /// Hypercover face data violates the simplicial identities.
    #[error("simplicial identity violated: {detail}")]
    SimplicialIdentityViolation { detail: String },

    /// `builtin_example` got a name it does not know.
    #[error("unknown example {name:?}")]
    UnknownExample { name: String },

    /// A ring-axiom check is missing required structure.
    #[error("missing structure: {detail}")]
    MissingStructure { detail: String },

    /// A form string failed to parse.
    #[error("form parse error at byte {at}: {detail}")]
    FormParse { at: usize, detail: String },

    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// File IO failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid { what, detail: detail.into() }
    }
}
