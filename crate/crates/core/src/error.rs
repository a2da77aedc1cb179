use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("not a finite-type Cartan matrix: {0}")]
    NotFiniteType(String),
    #[error("coweight {0} is not dominant")]
    NotDominant(String),
    #[error("the zero coweight has no minimal gallery")]
    ZeroCoweight,
    #[error("point lies on the hyperplane {0}")]
    OnHyperplane(String),
    #[error("invalid gallery: {0}")]
    InvalidGallery(String),
    #[error("step {j} out of range 1..={p}")]
    StepOutOfRange { j: usize, p: usize },
    #[error("invalid chart point: {0}")]
    InvalidChart(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precision exhausted at truncation order {0}")]
    PrecisionExhausted(i64),
    #[error("no generic sample found after {0} attempts")]
    ResampleCap(usize),
    #[error("operation needs a type A root system, got {0}")]
    NotTypeA(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::NotFiniteType(_)
            | Error::NotDominant(_)
            | Error::ZeroCoweight
            | Error::NotTypeA(_)
            | Error::InvalidChart(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::PrecisionExhausted(_) => 4,
            _ => 3,
        }
    }
}
