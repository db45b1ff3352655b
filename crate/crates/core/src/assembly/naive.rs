//! Reference quadruple loops for the weighted-quadrature matrices. They form
//! the same quadrature sums as the sum-factorized routines without any reuse.

use nalgebra::DMatrix;

use super::{node_points, AssemblyError, QuadratureSetup};
use crate::geometry::{k1_points, BoundaryCurve};

pub fn naive_ik1(curve: &BoundaryCurve, setup: &QuadratureSetup) -> Result<DMatrix<f64>, AssemblyError> {
    let points = node_points(curve, &setup.nodes)?;
    let rules = &setup.regular.rules;
    let dim = rules.len();
    let (period, eps) = (curve.period(), curve.diag_eps());
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut total = 0.0;
            for (&n1, &w1) in rules[i].nodes.iter().zip(&rules[i].weights) {
                for (&n2, &w2) in rules[j].nodes.iter().zip(&rules[j].weights) {
                    let k = k1_points(&points[n1], &points[n2], period, eps)?;
                    total += w1 * points[n1].speed * w2 * points[n2].speed * k;
                }
            }
            m[(i, j)] = total;
        }
    }
    Ok(m)
}

pub fn naive_ik2(curve: &BoundaryCurve, setup: &QuadratureSetup) -> Result<DMatrix<f64>, AssemblyError> {
    let points = node_points(curve, &setup.nodes)?;
    let rules = &setup.regular.rules;
    let basis = setup.basis();
    let dim = rules.len();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut total = 0.0;
            for (&n1, &w1) in rules[i].nodes.iter().zip(&rules[i].weights) {
                for (n2, &ws) in setup.singular.weights[n1].iter().enumerate() {
                    let bj = basis.eval_function(j, setup.nodes.nodes[n2])?;
                    total += w1 * points[n1].speed * ws * points[n2].speed * bj;
                }
            }
            m[(i, j)] = total;
        }
    }
    Ok(m)
}
