use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{field}` out of range: {reason}")]
    OutOfRange { field: &'static str, reason: String },

    #[error("theorem precondition violated: {0}")]
    TheoremPreconditionViolated(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid checkpoints: {0}")]
    InvalidCheckpoints(String),

    #[error("exact distribution requested at n = {requested}, above the cap of {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("recursion diverged at n = {n}: |h_n| = {value:e} exceeds guard {guard:e}")]
    DivergenceDetected { n: u64, value: f64, guard: f64 },

    #[error("evaluation grid is empty")]
    EmptyGrid,

    #[error("CLT condition 3bp + cp > ap + c fails (2*Gamma - 1 = {two_gamma_minus_one})")]
    CltConditionViolated { two_gamma_minus_one: f64 },

    #[error("LIL condition -bp/lambda < -1/2 fails (-bp/lambda = {ratio})")]
    LilConditionViolated { ratio: f64 },

    #[error("no grid point has at least {min} exceedances")]
    InsufficientExceedances { min: u64 },

    #[error("invalid sample set: {0}")]
    InvalidSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;
