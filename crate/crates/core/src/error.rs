use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column}: {message}")]
    Data {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset is invalid: {0}")]
    InvalidDataset(String),

    #[error("malformed program: {0}")]
    Program(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("branch-and-bound node limit ({0}) exceeded")]
    NodeLimit(u64),

    #[error("unknown DMU id {0:?}")]
    UnknownDmu(String),

    #[error("model {model} requires {required} returns to scale, dataset is {actual}")]
    RtsMismatch {
        model: String,
        required: String,
        actual: String,
    },

    #[error("solver failure for DMU {dmu} (alpha {alpha}): {source}")]
    Solve {
        dmu: String,
        alpha: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
