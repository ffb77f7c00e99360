use thiserror::Error;

/// Errors raised by ring, Witt-vector and form operations.
///
/// Each variant carries a stable code (see [`Error::code`]) so that the CLI
/// can map mathematical rejections to machine-readable output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live at different tower levels ({0} vs {1})")]
    LevelMismatch(u8, u8),
    #[error("result support lies entirely above the precision bound")]
    PrecisionUnderflow,
    #[error("operation requires precision mode")]
    PrecisionRequired,
    #[error("configured cap exceeded: {0}")]
    CapExceeded(String),
    #[error("Witt vectors have different lengths ({0} vs {1})")]
    LengthMismatch(u8, u8),
    #[error("operands belong to different towers")]
    TowerMismatch,
    #[error("restriction below length 1")]
    LengthUnderflow,
    #[error("degree {q} out of range at tower level {level}")]
    DegreeOutOfRange { q: u8, level: u8 },
    #[error("form shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not in the kernel of R")]
    NotInKernel,
    #[error("form is not in Z_1 (not killed by F^{{m-1}} d)")]
    NotInZ1,
    #[error("character is tame (Swan conductor 0); no refined Swan conductor")]
    TameInput,
    #[error("unsupported (depth, m, q) combination: {0}")]
    UnsupportedShape(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("unknown law: {0}")]
    UnknownLaw(String),
    #[error("unsupported tower configuration: {0}")]
    BadTowerSpec(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::PrecisionUnderflow => "PrecisionUnderflow",
            Error::PrecisionRequired => "PrecisionRequired",
            Error::CapExceeded(_) => "CapExceeded",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::TowerMismatch => "TowerMismatch",
            Error::LengthUnderflow => "LengthUnderflow",
            Error::DegreeOutOfRange { .. } => "DegreeOutOfRange",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotAUnit => "NotAUnit",
            Error::NotInKernel => "NotInKernel",
            Error::NotInZ1 => "NotInZ1",
            Error::TameInput => "TameInput",
            Error::UnsupportedShape(_) => "UnsupportedShape",
            Error::UnknownSuite(_) => "UnknownSuite",
            Error::UnknownLaw(_) => "UnknownLaw",
            Error::BadTowerSpec(_) => "BadTowerSpec",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
