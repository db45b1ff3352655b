use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{AssemblyError, QuadratureSetup};
use crate::geometry::{k1_points, BoundaryCurve, CurvePoint};

/// Thread-safe count of kernel evaluations.
#[derive(Debug, Default)]
pub struct KernelCounter(AtomicU64);

impl KernelCounter {
    pub fn add(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Regular-rule weights multiplied by the parametric speed at their nodes.
pub(crate) fn speed_weights(setup: &QuadratureSetup, points: &[CurvePoint]) -> Vec<Vec<f64>> {
    setup
        .regular
        .rules
        .iter()
        .map(|r| r.nodes.iter().zip(&r.weights).map(|(&n, &w)| w * points[n].speed).collect())
        .collect()
}

/// Outer contraction `C²[i][j] = Σ_{n1} w^{(i)}_{n1} J(η_{n1}) C¹[n1][j]`.
fn outer_contraction(setup: &QuadratureSetup, wj: &[Vec<f64>], c1: &[Vec<f64>]) -> DMatrix<f64> {
    let dim = wj.len();
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; dim];
            for (&n1, &w) in setup.regular.rules[i].nodes.iter().zip(&wj[i]) {
                for (r, c) in row.iter_mut().zip(&c1[n1]) {
                    *r += w * c;
                }
            }
            row
        })
        .collect();
    DMatrix::from_fn(dim, dim, |i, j| rows[i][j])
}

/// `I_K1` by sum factorization. `K1` is evaluated exactly once per ordered
/// node pair; each kernel row is contracted against all regular rules before
/// the next row is formed.
pub fn assemble_ik1(
    curve: &BoundaryCurve,
    setup: &QuadratureSetup,
    points: &[CurvePoint],
    counter: &KernelCounter,
) -> Result<DMatrix<f64>, AssemblyError> {
    let nq = points.len();
    if nq != setup.num_nodes() {
        return Err(AssemblyError::RuleMismatch { rules: setup.num_nodes(), basis: nq });
    }
    let period = curve.period();
    let eps = curve.diag_eps();
    let wj = speed_weights(setup, points);
    let rules = &setup.regular.rules;
    let c1: Vec<Vec<f64>> = (0..nq)
        .into_par_iter()
        .map(|n1| {
            let p = &points[n1];
            let row = points.iter().map(|q| k1_points(p, q, period, eps)).collect::<Result<Vec<f64>, _>>()?;
            counter.add(nq as u64);
            Ok(rules
                .iter()
                .zip(&wj)
                .map(|(rule, w)| rule.nodes.iter().zip(w).map(|(&n2, &w)| w * row[n2]).sum())
                .collect())
        })
        .collect::<Result<_, AssemblyError>>()?;
    Ok(outer_contraction(setup, &wj, &c1))
}

/// `I_K2` with the singular rule at every outer node applied to
/// `J(t) B_j(t)`.
pub fn assemble_ik2(setup: &QuadratureSetup, points: &[CurvePoint]) -> Result<DMatrix<f64>, AssemblyError> {
    let nq = points.len();
    if nq != setup.num_nodes() {
        return Err(AssemblyError::RuleMismatch { rules: setup.num_nodes(), basis: nq });
    }
    let basis = setup.basis();
    let dim = basis.dim();
    let bcol: Vec<Vec<(usize, f64)>> = setup
        .nodes
        .nodes
        .iter()
        .zip(points)
        .map(|(&s, p)| Ok(basis.eval(s, 0)?.into_iter().map(|(j, v)| (j, v * p.speed)).collect()))
        .collect::<Result<_, AssemblyError>>()?;
    let wj = speed_weights(setup, points);
    let c1: Vec<Vec<f64>> = (0..nq)
        .into_par_iter()
        .map(|n1| {
            let mut row = vec![0.0; dim];
            for (w, col) in setup.singular.weights[n1].iter().zip(&bcol) {
                for &(j, v) in col {
                    row[j] += w * v;
                }
            }
            row
        })
        .collect();
    Ok(outer_contraction(setup, &wj, &c1))
}
