//! Quadrature: Gauss–Legendre and adaptive rules, the shared node vector,
//! regular weighted rules (one per basis function) and log-singular weighted
//! rules built from modified moments.

pub mod adaptive;
mod gauss;
mod metric;
mod minnorm;
pub mod moments;
mod nodes;
mod regular;
mod singular;

pub use adaptive::{integrate_adaptive, integrate_log_singular, log_integral};
pub use gauss::{gauss_legendre, GaussRule};
pub use metric::{quad_error_err, quad_error_rel};
pub use minnorm::MinNorm;
pub use moments::{kernel_moments, log_moments, monomial_log_moment, periodic_log_moments};
pub use nodes::{build_nodes, expected_node_count, NodeVector};
pub use regular::{build_regular_rules, RegularRules, WeightedRule};
pub use singular::{build_singular_rules, SingularRules};

use thiserror::Error;

use crate::splines::SplineError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("adaptive integration on [{a}, {b}] did not converge (error estimate {estimate:e})")]
    NotConverged { a: f64, b: f64, estimate: f64 },
    #[error("{nodes} quadrature nodes cannot be exact on {functions} functions")]
    TooFewNodes { nodes: usize, functions: usize },
    #[error("collocation matrix ({rows}x{cols}) is rank deficient (pivot ratio {ratio:e})")]
    RankDeficient { rows: usize, cols: usize, ratio: f64 },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("error metric undefined: quadrature values are all zero")]
    UndefinedMetric,
    #[error(transparent)]
    Spline(#[from] SplineError),
}
