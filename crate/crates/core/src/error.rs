use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("isometry is not hyperbolic (trace {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("degenerate right-angled hexagon: cosh argument {arg} <= 1")]
    DegenerateHexagon { arg: f64 },

    #[error("degenerate right-angled pentagon: cosh argument {arg} < 1")]
    DegeneratePentagon { arg: f64 },

    #[error("cuff {cuff}: length {length} outside (0, {max}]")]
    LengthOutOfRange { cuff: i64, length: f64, max: f64 },

    #[error("invalid pants graph: {0}")]
    BadGraph(String),

    #[error("invalid curve path: {0}")]
    BadPath(String),

    #[error("cuff {cuff} is a boundary cuff")]
    BoundaryCuff { cuff: i64 },

    #[error("curve does not cross cuff {cuff}")]
    NoCrossing { cuff: i64 },

    #[error("curve crossing of cuff {cuff} (occurrence {occurrence}) is not transverse")]
    NonTransverse { cuff: i64, occurrence: usize },

    #[error("surfaces do not share the same pants graph")]
    GraphMismatch,

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Io(String),

    /// `cause` raised while evaluating the named record (curve, sample, trial).
    #[error("{record}: {cause}")]
    InRecord { record: String, cause: Box<Error> },
}

impl Error {
    /// Errors caused by numerical degeneration rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        if let Error::InRecord { cause, .. } = self {
            return cause.is_numerical();
        }
        matches!(
            self,
            Error::NotHyperbolic { .. }
                | Error::DegenerateHexagon { .. }
                | Error::DegeneratePentagon { .. }
                | Error::NonTransverse { .. }
        )
    }
}

impl Error {
    pub fn in_record(self, record: impl Into<String>) -> Self {
        Error::InRecord {
            record: record.into(),
            cause: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(format!("json: {e}"))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(format!("csv: {e}"))
    }
}
