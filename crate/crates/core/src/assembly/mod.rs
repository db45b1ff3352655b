//! Galerkin matrix and right-hand side assembly.
//!
//! The weighted strategy evaluates `K1` once per pair of quadrature nodes and
//! contracts row by row against the regular rules (sum factorization); `K2`
//! uses the singular rules. The element-by-element strategy loops over pairs
//! of mesh elements with tensor Gauss rules and serves as the baseline.

mod baseline;
mod naive;
mod rhs;
mod sumfac;

pub use baseline::{assemble_baseline, baseline_b1, BaselineMatrix};
pub use naive::{naive_ik1, naive_ik2};
pub use rhs::{assemble_b1, assemble_b2, gauss_points_on_elements, kbar_layer};
pub use sumfac::{assemble_ik1, assemble_ik2, KernelCounter};

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryCurve, CurvePoint, GeometryError};
use crate::quadrature::{
    build_nodes, build_regular_rules, build_singular_rules, NodeVector, QuadratureError, RegularRules, SingularRules,
};
use crate::splines::{BasisSpec, RefinedBasis, SplineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("discretization domain [{0}, {1}] differs from the curve domain")]
    DomainMismatch(f64, f64),
    #[error("quadrature rules were built for {rules} functions, basis has {basis}")]
    RuleMismatch { rules: usize, basis: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Weighted quadrature with sum factorization.
    Weighted,
    /// Element-by-element tensor Gauss baseline.
    Element,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Weighted => "weighted-sumfac",
            Strategy::Element => "element-by-element",
        }
    }
}

/// All quadrature data for one discretization basis and refinement level.
#[derive(Debug, Clone)]
pub struct QuadratureSetup {
    pub refined: RefinedBasis,
    pub nodes: NodeVector,
    pub regular: RegularRules,
    pub singular: SingularRules,
    pub rules_seconds: f64,
}

impl QuadratureSetup {
    pub fn build(basis: &BasisSpec, nref: usize) -> Result<Self, AssemblyError> {
        let start = Instant::now();
        let refined = RefinedBasis::new(basis, nref)?;
        let nodes = build_nodes(&refined)?;
        let regular = build_regular_rules(&refined, &nodes)?;
        let singular = build_singular_rules(&refined, &nodes, &nodes.nodes)?;
        Ok(Self { refined, nodes, regular, singular, rules_seconds: start.elapsed().as_secs_f64() })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.refined.parent
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Curve data at every quadrature node.
pub fn node_points(curve: &BoundaryCurve, nodes: &NodeVector) -> Result<Vec<CurvePoint>, AssemblyError> {
    nodes.nodes.iter().map(|&s| curve.point(s).map_err(AssemblyError::from)).collect()
}

pub(crate) fn check_compatible(curve: &BoundaryCurve, basis: &BasisSpec) -> Result<(), AssemblyError> {
    let (a, b) = curve.domain();
    let (c, d) = basis.domain();
    let tol = 1e-12 * (b - a);
    if (a - c).abs() > tol || (b - d).abs() > tol || curve.is_closed() != basis.is_closed() {
        return Err(AssemblyError::DomainMismatch(c, d));
    }
    Ok(())
}

/// Assembled linear system with cost bookkeeping.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub strategy: Strategy,
    /// Kernel evaluations on the regular part (`K1` table, or far element pairs).
    pub kernel_evals: u64,
    /// Additional kernel evaluations on near element pairs (baseline only).
    pub near_kernel_evals: u64,
    pub rules_seconds: f64,
    pub assembly_seconds: f64,
    pub rhs_seconds: f64,
    /// `max |A - Aᵀ| / max |A|` of the assembled matrix before any averaging.
    pub symmetry_defect: f64,
    /// Whether `matrix` was averaged with its transpose.
    pub symmetrized: bool,
}

/// Relative symmetry defect `max |A - Aᵀ| / max |A|`.
pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    let size = a.amax();
    if size > 0.0 {
        (a - a.transpose()).amax() / size
    } else {
        0.0
    }
}

/// `A = -(I_K1 + I_K2) / 2π` as assembled, with its relative symmetry defect.
pub fn scale_system(ik1: &DMatrix<f64>, ik2: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let a = (ik1 + ik2) * (-1.0 / (2.0 * std::f64::consts::PI));
    let defect = symmetry_defect(&a);
    (a, defect)
}

/// `A = -(I_K1 + I_K2) / 2π`, averaged with its transpose. Returns the matrix
/// and the relative symmetry defect before averaging.
pub fn scale_and_symmetrize(ik1: &DMatrix<f64>, ik2: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let (a, rel) = scale_system(ik1, ik2);
    let sym = (&a + a.transpose()) * 0.5;
    (sym, rel)
}

/// Weighted-quadrature matrix `A` with its symmetry defect and the
/// kernel-evaluation count. With `symmetrize = false` the matrix is returned
/// as assembled: row `i` then tests the discrete single layer with the rule of
/// `B_i`, exactly as the right-hand side does.
pub fn assemble_weighted_matrix(
    curve: &BoundaryCurve,
    setup: &QuadratureSetup,
    symmetrize: bool,
) -> Result<(DMatrix<f64>, f64, u64), AssemblyError> {
    check_compatible(curve, setup.basis())?;
    let points = node_points(curve, &setup.nodes)?;
    let counter = KernelCounter::default();
    let ik1 = assemble_ik1(curve, setup, &points, &counter)?;
    let ik2 = assemble_ik2(setup, &points)?;
    let (a, defect) = if symmetrize { scale_and_symmetrize(&ik1, &ik2) } else { scale_system(&ik1, &ik2) };
    Ok((a, defect, counter.get()))
}
