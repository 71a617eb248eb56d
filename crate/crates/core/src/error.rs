use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    Pole(f64),
    #[error("denominator parameter {param} hits a pole at term {term}")]
    DenominatorPole { param: f64, term: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("negative radicand {value} in {context}")]
    Radicand { context: &'static str, value: f64 },
    #[error("index {index} out of range (max {max})")]
    Index { index: usize, max: usize },
    #[error("x = {x} outside the basis domain")]
    Domain { x: f64 },
    #[error("discrete weight for k = {k} is not positive ({value})")]
    Positivity { k: usize, value: f64 },
    #[error("truncation margin too small: entry ({n}, {m}) of power {k} needs order > {needed}, got {order}")]
    Margin {
        n: usize,
        m: usize,
        k: usize,
        needed: usize,
        order: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("basis function {column} nearly vanishes at x = {x}")]
    NodeProximity { column: usize, x: f64 },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("orbital flag mismatch: {0}")]
    FlagMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
