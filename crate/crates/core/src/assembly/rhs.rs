use nalgebra::DVector;
use rayon::prelude::*;

use super::sumfac::speed_weights;
use super::{AssemblyError, QuadratureSetup};
use crate::geometry::{kbar_diagonal, kbar_points, wrap_diff, BoundaryCurve, CurvePoint};
use crate::quadrature::gauss_legendre;
use crate::splines::BasisSpec;

/// `b1_i ≈ ∫ B_i(s) u_D(s) J(s) ds` with the regular rules; `u_nodes` holds
/// `u_D` at every quadrature node.
pub fn assemble_b1(
    setup: &QuadratureSetup,
    points: &[CurvePoint],
    u_nodes: &[f64],
) -> Result<DVector<f64>, AssemblyError> {
    if u_nodes.len() != setup.num_nodes() || points.len() != setup.num_nodes() {
        return Err(AssemblyError::RuleMismatch { rules: setup.num_nodes(), basis: u_nodes.len() });
    }
    let wj = speed_weights(setup, points);
    let b = setup
        .regular
        .rules
        .iter()
        .zip(&wj)
        .map(|(rule, w)| rule.nodes.iter().zip(w).map(|(&n, &w)| w * u_nodes[n]).sum())
        .collect::<Vec<f64>>();
    Ok(DVector::from_vec(b))
}

/// Gauss points (with weights) of the given order on every element of `basis`.
pub fn gauss_points_on_elements(
    curve: &BoundaryCurve,
    basis: &BasisSpec,
    order: usize,
) -> Result<Vec<(CurvePoint, f64)>, AssemblyError> {
    if order == 0 {
        return Err(AssemblyError::InvalidParameter("Gauss order must be positive".into()));
    }
    let rule = gauss_legendre(order);
    let mut out = Vec::with_capacity(basis.num_elements() * order);
    for e in 0..basis.num_elements() {
        let (lo, hi) = basis.element(e);
        for (s, w) in rule.mapped(lo, hi) {
            out.push((curve.point(s)?, w));
        }
    }
    Ok(out)
}

/// `b2_i ≈ ∫ B_i(s) J(s) ∫ K̄(s,t) u_D(t) dt ds`: regular rules outside,
/// `gauss_order` Gauss points per refined element inside. `K̄` is the kernel
/// along the left normal; callers orient it.
pub fn assemble_b2<F>(
    curve: &BoundaryCurve,
    setup: &QuadratureSetup,
    points: &[CurvePoint],
    gauss_order: usize,
    u_d: F,
) -> Result<DVector<f64>, AssemblyError>
where
    F: Fn(&CurvePoint) -> f64 + Sync,
{
    curve.check_c2()?;
    let inner_pts = gauss_points_on_elements(curve, &setup.refined.fine, gauss_order)?;
    let values: Vec<f64> = inner_pts.iter().map(|(p, w)| w * u_d(p)).collect();
    let inner: Vec<f64> =
        points.par_iter().map(|p| kbar_layer(curve, &inner_pts, &values, p)).collect::<Result<_, AssemblyError>>()?;
    assemble_b1(setup, points, &inner)
}

/// `Σ_g K̄(s, t_g) v_g` over precomputed inner points, where `v_g` already
/// carries the quadrature weight.
pub fn kbar_layer(
    curve: &BoundaryCurve,
    inner: &[(CurvePoint, f64)],
    values: &[f64],
    p: &CurvePoint,
) -> Result<f64, AssemblyError> {
    let period = curve.period();
    let eps = curve.diag_eps();
    let mut total = 0.0;
    for ((q, _), v) in inner.iter().zip(values) {
        let k = if wrap_diff(q.s - p.s, period).abs() <= eps { kbar_diagonal(p) } else { kbar_points(p, q)? };
        total += k * v;
    }
    Ok(total)
}
