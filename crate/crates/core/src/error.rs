use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("negative density {value:e} passed to {op}")]
    NegativeDensity { value: f64, op: &'static str },

    #[error("chemical potential is undefined at density {0:e}")]
    NonPositiveDensity(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("hard-rod state overpacked at cell {cell} (packing fraction {packing})")]
    Overpacked { cell: usize, packing: f64 },

    #[error("steady-state iteration stalled after {iterations} sweeps (residual {residual:e})")]
    SteadyStateNotConverged { iterations: usize, residual: f64 },

    #[error("flux/vacuum mismatch: Lax-Friedrichs flux got density {density:e} with a vacuum-forming pressure law")]
    FluxVacuumMismatch { density: f64 },

    #[error("positivity violation: density {value:e} at cell {cell}")]
    PositivityViolation { cell: usize, value: f64 },

    #[error("run failed at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invariant monitor tripped: {0}")]
    Monitor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at_time(self, time: f64) -> Self {
        match self {
            e @ Error::AtTime { .. } => e,
            e => Error::AtTime {
                time,
                source: Box::new(e),
            },
        }
    }
}
