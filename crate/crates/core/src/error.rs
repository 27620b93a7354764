use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid setting index {0}, expected 0 or 1")]
    InvalidSetting(usize),

    #[error("state not normalized: squared norm {0} deviates from 1 beyond tolerance")]
    NotNormalized(f64),

    #[error("basis not orthonormal: max deviation {0} beyond tolerance")]
    NotOrthonormal(f64),

    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),

    #[error("probability table entry {value} at index {index} is invalid")]
    InvalidProbability { index: usize, value: f64 },

    #[error("linear program infeasible: {0}")]
    LpInfeasible(String),

    #[error("degenerate statistic: {0}")]
    DegenerateStatistic(String),

    #[error("p-value {0} outside (0, 1]")]
    PValueOutOfRange(f64),

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
