//! Pearson, Spearman, Kendall and the mixed rank coefficient
//! `r = (3 tau - rho_S) / 2`, with exact samplers for four bivariate
//! families, numerical evaluation of the population coefficients, and a
//! reproducible parallel Monte Carlo harness.

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod io;
pub mod quadrature;
pub mod theory;

pub use error::{Coordinate, EstimatorError, ExperimentError, QuadratureError, SpecError};
pub use estimators::{BivariateSample, CoefficientKind, CoefficientSet, TiePolicy};
