use nalgebra::DMatrix;
use rayon::prelude::*;

use super::regular::collocation;
use super::{kernel_moments, MinNorm, NodeVector, QuadratureError};
use crate::splines::RefinedBasis;

/// Log-singular rules: `Σ_n weights[ν][n] g(η_n) ≈ ∫ g(t) ln|t - σ_ν| dt`,
/// exact for every `g` in the refined spline space. Closed bases use the
/// periodized logarithm (see [`kernel_moments`]).
#[derive(Debug, Clone)]
pub struct SingularRules {
    pub sigma: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub max_residual: f64,
}

impl SingularRules {
    pub fn apply(&self, nu: usize, values: &[f64]) -> f64 {
        self.weights[nu].iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// One factorization of the full collocation matrix, reused for every `σ`.
pub fn build_singular_rules(
    refined: &RefinedBasis,
    nodes: &NodeVector,
    sigma: &[f64],
) -> Result<SingularRules, QuadratureError> {
    let fine = &refined.fine;
    let ne = fine.dim();
    let nq = nodes.len();
    let colloc = collocation(fine, nodes)?;
    let mut b = DMatrix::zeros(ne, nq);
    for (n, vals) in colloc.iter().enumerate() {
        for &(j, v) in vals {
            b[(j, n)] += v;
        }
    }
    let solver = MinNorm::new(&b)?;
    let columns: Vec<Vec<f64>> = sigma.par_iter().map(|&s| kernel_moments(fine, s)).collect();
    let moments = DMatrix::from_fn(ne, sigma.len(), |j, k| columns[k][j]);
    let w = solver.solve_many(&moments);
    let residual = (&b * &w - &moments).amax();
    let weights = (0..sigma.len()).map(|k| w.column(k).iter().copied().collect()).collect();
    Ok(SingularRules { sigma: sigma.to_vec(), weights, max_residual: residual })
}
