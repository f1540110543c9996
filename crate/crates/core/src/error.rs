use thiserror::Error;

/// Errors raised by the algebra, construction and search layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension 0 is not supported")]
    ZeroDimension,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("assignment space {base}^{dim} is too large")]
    SpaceTooLarge { base: usize, dim: usize },
    #[error("regions disagree on shape: expected dim {expected_dim} over {expected_base} points, got dim {dim} over {base} points")]
    ShapeMismatch {
        expected_dim: usize,
        expected_base: usize,
        dim: usize,
        base: usize,
    },
    #[error("element is not in the carrier")]
    NotInCarrier,
    #[error("carrier would have 2^{atoms} elements, above the cap of {cap}")]
    CarrierCap { atoms: usize, cap: usize },
    #[error("{atoms} atoms exceed the cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("construction exhausted on demand {demand}")]
    Exhausted { demand: String },
    #[error("index set V has {size} members, above the cap of {cap}")]
    IndexSetCap { size: usize, cap: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("c_{index} is not total: t_S for S = {subset:?} is missing from the universe")]
    ClosureFailure { index: usize, subset: Vec<usize> },
    #[error("resource budget of {budget} exceeded in {stage}")]
    Budget { stage: String, budget: u64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
