//! Dense solve, error metrics, condition numbers and the representation
//! formula off the boundary.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::gauss_points_on_elements;
use crate::assembly::AssemblyError;
use crate::geometry::{BoundaryCurve, GeometryError};
use crate::quadrature::gauss_legendre;
use crate::splines::{BasisSpec, SplineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is {rows}x{cols}, right-hand side has length {rhs}")]
    Shape { rows: usize, cols: usize, rhs: usize },
    #[error("matrix is singular or contains non-finite entries")]
    Singular,
    #[error("solve residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("point ({x}, {y}) is {distance:e} from the boundary, closer than {threshold:e}")]
    TooClose { x: f64, y: f64, distance: f64, threshold: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

/// Boundary density `α̂(s) = Σ α_j B_j(s)`.
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub coeffs: DVector<f64>,
    pub basis: BasisSpec,
}

impl BoundarySolution {
    pub fn eval(&self, s: f64) -> Result<f64, SolverError> {
        Ok(self.basis.combine(self.coeffs.as_slice(), s, 0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Maximum absolute error on 500 uniform parametric points.
    pub e_max: f64,
    /// Relative `L²` error on the parameter interval.
    pub e_rel: f64,
}

fn is_symmetric(matrix: &DMatrix<f64>) -> bool {
    matrix.is_square() && crate::assembly::symmetry_defect(matrix) <= 1e-14
}

/// Cholesky solve for symmetric matrices, falling back to LU when the matrix
/// is not numerically SPD. Unsymmetric matrices go straight to LU.
pub fn solve(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>, SolverError> {
    let (r, c) = matrix.shape();
    if r != c || rhs.len() != r {
        return Err(SolverError::Shape { rows: r, cols: c, rhs: rhs.len() });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::Singular);
    }
    let cholesky = if is_symmetric(matrix) { matrix.clone().cholesky() } else { None };
    let x = match cholesky {
        Some(ch) => ch.solve(rhs),
        None if !is_symmetric(matrix) => matrix.clone().lu().solve(rhs).ok_or(SolverError::Singular)?,
        None => {
            log::warn!("matrix is not positive definite; using LU");
            matrix.clone().lu().solve(rhs).ok_or(SolverError::Singular)?
        }
    };
    let scale = rhs.norm();
    let residual = (matrix * &x - rhs).norm();
    if scale > 0.0 && !(residual <= 1e-10 * scale) {
        return Err(SolverError::Residual(residual / scale));
    }
    Ok(x)
}

/// Spectral condition number: `|λ|max / |λ|min` for a symmetric matrix, the
/// ratio of extreme singular values otherwise; infinite when singular.
pub fn condition_number(matrix: &DMatrix<f64>) -> f64 {
    let values = if is_symmetric(matrix) {
        SymmetricEigen::new(matrix.clone()).eigenvalues
    } else {
        matrix.clone().singular_values()
    };
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Errors of `solution` against `exact` on the parameter interval: maximum on
/// 500 uniform points and relative `L²` by 10-point Gauss per element.
pub fn error_metrics<F>(solution: &BoundarySolution, exact: F) -> Result<ErrorReport, SolverError>
where
    F: Fn(f64) -> f64,
{
    let basis = &solution.basis;
    let (a, b) = basis.domain();
    let mut e_max = 0.0f64;
    for k in 0..500 {
        let s = if k == 499 { b } else { a + (b - a) * k as f64 / 499.0 };
        e_max = e_max.max((solution.eval(s)? - exact(s)).abs());
    }
    let rule = gauss_legendre(10);
    let (mut num, mut den) = (0.0, 0.0);
    for e in 0..basis.num_elements() {
        let (lo, hi) = basis.element(e);
        for (s, w) in rule.mapped(lo, hi) {
            let q = exact(s);
            num += w * (solution.eval(s)? - q).powi(2);
            den += w * q * q;
        }
    }
    let e_rel = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(ErrorReport { e_max, e_rel })
}

/// Quadrature of the boundary used by the representation formula.
pub struct BoundaryQuadrature {
    points: Vec<(crate::geometry::CurvePoint, f64)>,
    threshold: f64,
}

impl BoundaryQuadrature {
    /// `order` Gauss points on every element of `basis`; evaluation points must
    /// stay at least one element length away from the curve.
    pub fn new(curve: &BoundaryCurve, basis: &BasisSpec, order: usize) -> Result<Self, SolverError> {
        let points = gauss_points_on_elements(curve, basis, order)?;
        let mut threshold = 0.0f64;
        for e in 0..basis.num_elements() {
            let (lo, hi) = basis.element(e);
            let (p, q) = (curve.eval(lo, 0)?, curve.eval(hi, 0)?);
            threshold = threshold.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
        Ok(Self { points, threshold })
    }

    fn check(&self, x: [f64; 2]) -> Result<(), SolverError> {
        let distance =
            self.points.iter().map(|(p, _)| (p.x[0] - x[0]).hypot(p.x[1] - x[1])).fold(f64::INFINITY, f64::min);
        if distance < self.threshold {
            return Err(SolverError::TooClose { x: x[0], y: x[1], distance, threshold: self.threshold });
        }
        Ok(())
    }

    /// Single-layer potential `-(1/2π) ∫ ln|x - f(t)| q(t) J(t) dt`.
    pub fn single_layer(&self, x: [f64; 2], solution: &BoundarySolution) -> Result<f64, SolverError> {
        self.check(x)?;
        let mut total = 0.0;
        for (p, w) in &self.points {
            let r = (p.x[0] - x[0]).hypot(p.x[1] - x[1]);
            total += w * p.speed * r.ln() * solution.eval(p.s)?;
        }
        Ok(-total / (2.0 * std::f64::consts::PI))
    }

    /// Double-layer term `(1/2π) ∫ (f(t) - x)·n(t) / |x - f(t)|² u(t) J(t) dt`
    /// with `n` the unit normal `orientation * (f2', -f1') / J`.
    pub fn double_layer<F>(&self, x: [f64; 2], orientation: f64, u: F) -> Result<f64, SolverError>
    where
        F: Fn(&crate::geometry::CurvePoint) -> f64,
    {
        self.check(x)?;
        let mut total = 0.0;
        for (p, w) in &self.points {
            let (dx, dy) = (p.x[0] - x[0], p.x[1] - x[1]);
            // (f - x)·(f2', -f1') already carries the factor J
            let flux = orientation * (dx * p.d1[1] - dy * p.d1[0]) / (dx * dx + dy * dy);
            total += w * flux * u(p);
        }
        Ok(total / (2.0 * std::f64::consts::PI))
    }
}
