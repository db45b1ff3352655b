//! Isogeometric symmetric Galerkin boundary elements for the 2D Laplace
//! equation, assembled with B-spline weighted quadrature.

pub mod assembly;
pub mod bench;
pub mod geometry;
pub mod pipeline;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod splines;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Spline(#[from] splines::SplineError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error(transparent)]
    Assembly(#[from] assembly::AssemblyError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Problem(#[from] problems::ProblemError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Spline(_) => "spline",
            Error::Geometry(_) => "geometry",
            Error::Quadrature(_) => "quadrature",
            Error::Assembly(_) => "assembly",
            Error::Solver(_) => "solver",
            Error::Problem(_) => "problem",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
