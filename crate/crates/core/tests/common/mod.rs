#![allow(dead_code)]

use nalgebra::DMatrix;
use splinebem::assembly::{assemble_ik1, assemble_ik2, node_points, KernelCounter, QuadratureSetup};
use splinebem::geometry::BoundaryCurve;
use splinebem::quadrature::integrate_log_singular;
use splinebem::splines::BasisSpec;

/// `∫ B_j(t) ln|t - s| dt` by adaptive quadrature, element by element so the
/// integrand is smooth on every piece.
pub fn moment_oracle(basis: &BasisSpec, j: usize, s: f64) -> f64 {
    let f = |t: f64| basis.eval_function(j, t).unwrap();
    (0..basis.num_elements())
        .map(|e| {
            let (lo, hi) = basis.element(e);
            integrate_log_singular(f, lo, hi, s, 1e-14).unwrap()
        })
        .sum()
}

/// Sum-factorized `I_K1`, `I_K2` and the kernel-evaluation count.
pub fn sumfac(curve: &BoundaryCurve, setup: &QuadratureSetup) -> (DMatrix<f64>, DMatrix<f64>, u64) {
    let points = node_points(curve, &setup.nodes).unwrap();
    let counter = KernelCounter::default();
    let ik1 = assemble_ik1(curve, setup, &points, &counter).unwrap();
    let ik2 = assemble_ik2(setup, &points).unwrap();
    (ik1, ik2, counter.get())
}

/// Observed order between successive halvings, `log2(e_k / e_{k+1})`.
pub fn halving_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
