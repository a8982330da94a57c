use thiserror::Error;

/// Errors raised across the coboson pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("failed to parse spectrum: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("numeric instability in symmetric-function recurrence at n = {n}: {detail}")]
    NumericInstability { n: usize, detail: String },

    #[error("inconsistent chi table at n = {n}: chi_n vanishes but chi_(n+1) does not")]
    InconsistentTable { n: usize },

    #[error(
        "commutator diagonal at n = {n} deviates from 1 by {deviation:e}, against the sign of the exchange statistics"
    )]
    SignLaw { n: usize, deviation: f64 },

    #[error("number state |{n}> does not exist (chi_{n} = 0)")]
    EmptyNumberState { n: usize },

    #[error("squared norm of correction vector at n = {n} is {value:e}, below the rounding tolerance")]
    NegativeNorm { n: usize, value: f64 },

    #[error("|gamma| = {gamma_abs} is not below the convergence radius {radius}")]
    DivergentEigenvalue { gamma_abs: f64, radius: f64 },

    #[error("ladder exhausted at n = {exhausted_at}: {detail}")]
    ExhaustedLadder { exhausted_at: usize, detail: String },

    #[error("tail of the coherent state could not be bounded within {max_n} ladder rows")]
    TailNotBounded { max_n: usize },

    #[error("{0} is undefined for this state")]
    UndefinedStatistic(&'static str),

    #[error("bosonic occupation cap {cap} exceeded in mode {mode}")]
    Truncation { mode: usize, cap: u8 },

    #[error("oracle instance too large: {states} basis states exceed the limit of {limit}")]
    InstanceTooLarge { states: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
