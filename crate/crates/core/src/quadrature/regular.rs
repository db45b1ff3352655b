use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{MinNorm, NodeVector, QuadratureError};
use crate::splines::{BasisSpec, RefinedBasis};

/// Quadrature rule `Σ_k weights[k] g(η[nodes[k]])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRule {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
}

impl WeightedRule {
    /// Applies the rule to values given at every node of the node vector.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&n, &w)| w * values[n]).sum()
    }
}

/// One weighted rule per parent basis function `B_i`, exact for
/// `∫ g(s) B_i(s) ds` whenever `g` lies in the refined spline space.
#[derive(Debug, Clone)]
pub struct RegularRules {
    pub rules: Vec<WeightedRule>,
    /// Refined functions whose support meets the support of `B_i`.
    pub active: Vec<Vec<usize>>,
    /// Largest absolute exactness residual over all rules and refined functions.
    pub max_residual: f64,
}

/// Nonzero refined basis values at every node.
pub(crate) fn collocation(fine: &BasisSpec, nodes: &NodeVector) -> Result<Vec<Vec<(usize, f64)>>, QuadratureError> {
    nodes
        .nodes
        .iter()
        .map(|&x| {
            let mut v = fine.eval(x, 0)?;
            v.retain(|p| p.1 != 0.0);
            Ok(v)
        })
        .collect()
}

pub fn build_regular_rules(refined: &RefinedBasis, nodes: &NodeVector) -> Result<RegularRules, QuadratureError> {
    let fine = &refined.fine;
    let parent = &refined.parent;
    let colloc = collocation(fine, nodes)?;
    let tol = 1e-12 * parent.length();
    let built: Vec<(WeightedRule, Vec<usize>, f64)> = (0..parent.dim())
        .into_par_iter()
        .map(|i| {
            let support = parent.support(i)?;
            let mut local: Vec<usize> = Vec::new();
            let mut active: Vec<usize> = Vec::new();
            for &(lo, hi) in &support.pieces {
                local.extend(nodes.indices_in(lo, hi, tol));
                active.extend(fine.active_functions(lo, hi));
            }
            local.sort_unstable();
            local.dedup();
            active.sort_unstable();
            active.dedup();
            let moments = refined.parent_moments(i)?;
            let rhs: Vec<f64> =
                active.iter().map(|j| moments.iter().find(|p| p.0 == *j).map_or(0.0, |p| p.1)).collect();
            let a = DMatrix::from_fn(active.len(), local.len(), |r, c| {
                colloc[local[c]].iter().find(|p| p.0 == active[r]).map_or(0.0, |p| p.1)
            });
            let weights = MinNorm::new(&a)?.solve(&rhs);
            // residual over every refined function seen by the local nodes
            let mut sums = vec![0.0; fine.dim()];
            for (c, &n) in local.iter().enumerate() {
                for &(j, v) in &colloc[n] {
                    sums[j] += weights[c] * v;
                }
            }
            for (r, &j) in active.iter().enumerate() {
                sums[j] -= rhs[r];
            }
            let residual = sums.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            Ok((WeightedRule { nodes: local, weights }, active, residual))
        })
        .collect::<Result<_, QuadratureError>>()?;
    let max_residual = built.iter().fold(0.0f64, |m, b| m.max(b.2));
    let (rules, active) = built.into_iter().map(|(r, a, _)| (r, a)).unzip();
    Ok(RegularRules { rules, active, max_residual })
}
