use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency grid rejected: {0}")]
    InvalidGrid(String),

    #[error(
        "envelope not decayed at grid edges (edge/peak = {edge_ratio:.3e}); \
         time span must be at least {required_span:.3} ps"
    )]
    EnvelopeNotDecayed {
        edge_ratio: f64,
        required_span: f64,
    },

    #[error(
        "step size too large: worst local error estimate {local_error:.3e} at t = {time:.4} ps \
         exceeds tolerance {tolerance:.1e}"
    )]
    StepSize {
        time: f64,
        local_error: f64,
        tolerance: f64,
    },

    #[error("cell (theta_rad = {theta}, {axis} = {value}, emitter = {emitter}) failed: {source}")]
    Cell {
        theta: f64,
        axis: &'static str,
        value: f64,
        emitter: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
