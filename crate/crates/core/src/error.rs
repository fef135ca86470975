use thiserror::Error;

/// Which coordinate of a bivariate sample an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
}

impl std::fmt::Display for Coordinate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coordinate::X => f.write_str("x"),
            Coordinate::Y => f.write_str("y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("sample needs at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("non-finite {coordinate} value at index {index}")]
    NonFinite { coordinate: Coordinate, index: usize },
    #[error("tied {coordinate} values at indices {first} and {second}")]
    Tie {
        coordinate: Coordinate,
        first: usize,
        second: usize,
    },
    #[error("{0} column has zero variance")]
    Degenerate(Coordinate),
    #[error("x and y have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("parameter t = {t} is outside the {family} domain {domain}")]
    OutOfDomain {
        family: &'static str,
        t: f64,
        domain: &'static str,
    },
    #[error("unknown family `{0}` (expected normal, pareto, exp-pareto, exp-pareto-transformed or fgm)")]
    UnknownFamily(String),
    #[error("sample size must be positive")]
    EmptySample,
    #[error("numerical evaluation failed: {0}")]
    Quadrature(QuadratureError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature config: {0}")]
    Config(String),
    #[error("no convergence: successive refinements differ by {diff:e} (tolerance {tolerance:e}) at {panels} panels")]
    NotConverged {
        diff: f64,
        tolerance: f64,
        panels: usize,
    },
    #[error("direct r = {direct} disagrees with (3 tau - rho_S)/2 = {identity}")]
    Inconsistent { direct: f64, identity: f64 },
    #[error("integrand produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
