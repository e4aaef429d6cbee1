use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atom `{0}` has zero or near-zero norm")]
    ZeroAtom(String),
    #[error("every atom was dropped as linearly dependent")]
    EmptyResult,
    #[error("dictionary has no atoms")]
    EmptyDictionary,
    #[error("duplicate atom name `{0}`")]
    DuplicateName(String),
    #[error("atom `{0}` is not unit-norm; normalize the dictionary first")]
    NotNormalized(String),
    #[error("augmented dictionary would hold {requested} atoms, cap is {cap}")]
    CombinatorialLimit { requested: usize, cap: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("active-set loop exceeded {0} iterations")]
    MaxIterations(usize),
    #[error("SVD did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("kernel width must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("sparsity k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("requested {c} compression vectors, at most {max} available")]
    CTooLarge { c: usize, max: usize },
    #[error("residual cube is identically zero")]
    ZeroResidual,
    #[error("spectrum file has no data lines")]
    EmptyFile,
    #[error("line {line}: cannot parse `{content}` as a number")]
    UnparseableLine { line: usize, content: String },
    #[error("every channel is a missing-value sentinel")]
    AllMissing,
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("file truncated at byte offset {offset}")]
    TruncatedFile { offset: u64 },
    #[error("unexpected trailing data at byte offset {offset}")]
    TrailingData { offset: u64 },
    #[error("unsupported format version {0}")]
    VersionUnsupported(u16),
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("support size {support} exceeds dictionary size {atoms}")]
    SupportTooLarge { support: usize, atoms: usize },
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn mismatch(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    /// True for errors caused by bad parameters rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::KOutOfRange { .. }
                | Error::CTooLarge { .. }
                | Error::NonPositiveGamma(_)
                | Error::InvalidProbability(_)
                | Error::SupportTooLarge { .. }
                | Error::CombinatorialLimit { .. }
        )
    }
}
