use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("metric mismatch between operands")]
    MetricMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix does not represent a cycle (grade residual {0:e})")]
    GradeResidual(f64),
    #[error("value has a non-negligible imaginary part")]
    NotReal,
    #[error("singular denominator in a Möbius map")]
    SingularDenominator,
    #[error("sl2 maps act only in two dimensions, got {0}")]
    Sl2Dimension(usize),
    #[error("flat cycle (k = 0) has no {0}")]
    FlatCycle(&'static str),
    #[error("isotropic cycle cannot be normalised")]
    IsotropicCycle,
    #[error("the zero vector is not a cycle")]
    ZeroCycle,
    #[error("relation {kind} needs a {expected} parameter")]
    ParameterShape { kind: String, expected: &'static str },
    #[error("relation {0} cannot refer to the node itself")]
    UnsupportedSelfRelation(String),
    #[error("unknown node key `{0}`")]
    UnknownKey(String),
    #[error("node key `{0}` already exists")]
    DuplicateKey(String),
    #[error("node `{0}` is predefined and cannot be changed")]
    Reserved(String),
    #[error("cannot modify data of node `{0}` in non-zero generation {1}")]
    NonZeroGeneration(String, i32),
    #[error("node `{0}` has a parent structure that a zero-generation node cannot have")]
    UnexpectedParents(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("subfigure: {0}")]
    Subfigure(String),
    #[error("document: {0}")]
    Document(String),
    #[error("render: {0}")]
    Render(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
