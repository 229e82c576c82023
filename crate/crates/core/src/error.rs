use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {n}: orthogonal patterns need a power of two")]
    UnsupportedDimension { n: usize },
    #[error("cannot plant {k} orthogonal patterns in dimension {n}")]
    Capacity { n: usize, k: usize },
    #[error("unknown catalogue id `{0}`")]
    UnknownCatalogueId(String),
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry {index} is {value}, expected -1 or +1")]
    NonBinarySpin { index: usize, value: i8 },
    #[error("coupling matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("coupling matrix has nonzero diagonal at {i}")]
    NonZeroDiagonal { i: usize },
    #[error("coupling matrix contains a non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("trajectory diverged at step {step}")]
    Diverged { step: usize },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("planted spectrum is degenerate (e_min == e_max)")]
    DegenerateSpectrum,
    #[error("pattern overlap matrix is singular")]
    SingularOverlap,
}
