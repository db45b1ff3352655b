//! Element-by-element assembly: a double loop over pairs of mesh elements.
//! Far pairs use an `N_G x N_G` tensor Gauss rule on the full kernel. On
//! coincident and neighbouring pairs the kernel is split into its smooth part
//! (tensor Gauss) and `ln|t - s|`, which is integrated by a local log-weighted
//! rule on the inner element: Bernstein exactness space of degree
//! `min(N_G - 1, 15)`, the Gauss points as nodes, minimum-norm weights.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{check_compatible, scale_and_symmetrize, AssemblyError};
use crate::geometry::{k1_points, periodic_correction, BoundaryCurve, CurvePoint};
use crate::quadrature::{gauss_legendre, log_moments, MinNorm};
use crate::splines::BasisSpec;

#[derive(Debug, Clone)]
pub struct BaselineMatrix {
    pub matrix: DMatrix<f64>,
    pub symmetry_defect: f64,
    /// Ordered pairs of non-neighbouring elements.
    pub far_pairs: u64,
    pub far_kernel_evals: u64,
    pub near_kernel_evals: u64,
}

struct ElementData {
    lo: f64,
    hi: f64,
    points: Vec<CurvePoint>,
    /// Gauss weight times speed.
    wj: Vec<f64>,
    /// Logical indices of the `d + 1` functions living on the element.
    funcs: Vec<usize>,
    /// `values[g][a]`: value of `funcs[a]` at Gauss point `g`.
    values: Vec<Vec<f64>>,
}

fn element_data(curve: &BoundaryCurve, basis: &BasisSpec, ng: usize) -> Result<Vec<ElementData>, AssemblyError> {
    let rule = gauss_legendre(ng);
    (0..basis.num_elements())
        .map(|e| {
            let (lo, hi) = basis.element(e);
            let mid = 0.5 * (lo + hi);
            let span = basis.span(mid);
            let d = basis.degree();
            let funcs: Vec<usize> = (0..=d).map(|r| basis.logical_index(span - d + r)).collect();
            let mut points = Vec::with_capacity(ng);
            let mut wj = Vec::with_capacity(ng);
            let mut values = Vec::with_capacity(ng);
            for (s, w) in rule.mapped(lo, hi) {
                let p = curve.point(s)?;
                wj.push(w * p.speed);
                values.push(basis.raw_derivatives(span, s, 0).swap_remove(0));
                points.push(p);
            }
            Ok(ElementData { lo, hi, points, wj, funcs, values })
        })
        .collect()
}

/// Log-weighted rule on `[-1, 1]` with the Gauss points as nodes.
struct ReferenceLogRule {
    bernstein: BasisSpec,
    solver: MinNorm,
    gauss_w: Vec<f64>,
}

impl ReferenceLogRule {
    fn new(ng: usize) -> Result<Self, AssemblyError> {
        let p = (ng - 1).min(15);
        let bernstein = BasisSpec::clamped(p, &[-1.0, 1.0])?;
        let rule = gauss_legendre(ng);
        let mut a = DMatrix::zeros(p + 1, ng);
        for (g, &x) in rule.nodes.iter().enumerate() {
            for (j, v) in bernstein.eval(x, 0)? {
                a[(j, g)] = v;
            }
        }
        let solver = MinNorm::new(&a)?;
        Ok(Self { bernstein, solver, gauss_w: rule.weights.clone() })
    }

    /// Weights for `∫_lo^hi g(t) ln|t - s| dt` at the Gauss points of `[lo, hi]`.
    fn weights(&self, lo: f64, hi: f64, s: f64) -> Vec<f64> {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let moments = log_moments(&self.bernstein, (s - c) / r);
        let w = self.solver.solve(&moments);
        let lr = r.ln();
        w.iter().zip(&self.gauss_w).map(|(w, g)| r * (w + lr * g)).collect()
    }
}

fn neighbours(e: usize, f: usize, m: usize, closed: bool) -> bool {
    let d = e.abs_diff(f);
    d <= 1 || (closed && d == m - 1)
}

/// Element-by-element matrix `A = -(I_K1 + I_K2) / 2π` (symmetrized).
pub fn assemble_baseline(curve: &BoundaryCurve, basis: &BasisSpec, ng: usize) -> Result<BaselineMatrix, AssemblyError> {
    if ng == 0 {
        return Err(AssemblyError::InvalidParameter("N_G must be at least 1".into()));
    }
    check_compatible(curve, basis)?;
    let elems = element_data(curve, basis, ng)?;
    let log_rule = ReferenceLogRule::new(ng)?;
    let m = elems.len();
    let dim = basis.dim();
    let closed = curve.is_closed();
    let period = curve.period();
    let eps = curve.diag_eps();

    struct RowBlock {
        funcs: Vec<usize>,
        rows: Vec<Vec<f64>>,
        far_pairs: u64,
        far_evals: u64,
        near_evals: u64,
    }

    let blocks: Vec<RowBlock> = (0..m)
        .into_par_iter()
        .map(|e| {
            let ee = &elems[e];
            let mut rows = vec![vec![0.0; dim]; ee.funcs.len()];
            let (mut far_pairs, mut far_evals, mut near_evals) = (0u64, 0u64, 0u64);
            for (f, ef) in elems.iter().enumerate() {
                let nb = ef.funcs.len();
                let near = neighbours(e, f, m, closed);
                if near {
                    near_evals += (ng * ng) as u64;
                } else {
                    far_pairs += 1;
                    far_evals += (ng * ng) as u64;
                }
                for (g, p) in ee.points.iter().enumerate() {
                    // inner[b] = ∫_f B_b(t) J(t) K(s_g, t) dt
                    let mut inner = vec![0.0; nb];
                    if near {
                        for (h, q) in ef.points.iter().enumerate() {
                            let smooth = k1_points(p, q, period, eps)?
                                + period.map_or(0.0, |l| periodic_correction(q.s - p.s, l));
                            for (b, v) in ef.values[h].iter().enumerate() {
                                inner[b] += ef.wj[h] * v * smooth;
                            }
                        }
                        let mut image = p.s;
                        if let Some(l) = period {
                            let centre = 0.5 * (ef.lo + ef.hi);
                            image += l * ((centre - p.s) / l).round();
                        }
                        let lw = log_rule.weights(ef.lo, ef.hi, image);
                        for (h, q) in ef.points.iter().enumerate() {
                            for (b, v) in ef.values[h].iter().enumerate() {
                                inner[b] += lw[h] * q.speed * v;
                            }
                        }
                    } else {
                        for (h, q) in ef.points.iter().enumerate() {
                            let k = 0.5 * ((p.x[0] - q.x[0]).powi(2) + (p.x[1] - q.x[1]).powi(2)).ln();
                            for (b, v) in ef.values[h].iter().enumerate() {
                                inner[b] += ef.wj[h] * v * k;
                            }
                        }
                    }
                    for (a, va) in ee.values[g].iter().enumerate() {
                        let wa = ee.wj[g] * va;
                        for (b, ib) in inner.iter().enumerate() {
                            rows[a][ef.funcs[b]] += wa * ib;
                        }
                    }
                }
            }
            Ok(RowBlock { funcs: ee.funcs.clone(), rows, far_pairs, far_evals, near_evals })
        })
        .collect::<Result<_, AssemblyError>>()?;

    let mut total = DMatrix::zeros(dim, dim);
    let (mut far_pairs, mut far_evals, mut near_evals) = (0, 0, 0);
    for block in blocks {
        for (a, row) in block.funcs.iter().zip(&block.rows) {
            for (j, v) in row.iter().enumerate() {
                total[(*a, j)] += v;
            }
        }
        far_pairs += block.far_pairs;
        far_evals += block.far_evals;
        near_evals += block.near_evals;
    }
    let (matrix, symmetry_defect) = scale_and_symmetrize(&total, &DMatrix::zeros(dim, dim));
    Ok(BaselineMatrix {
        matrix,
        symmetry_defect,
        far_pairs,
        far_kernel_evals: far_evals,
        near_kernel_evals: near_evals,
    })
}

/// `b1_i ≈ ∫ B_i(s) u_D(s) J(s) ds` by Gauss rules on every element.
pub fn baseline_b1<F>(
    curve: &BoundaryCurve,
    basis: &BasisSpec,
    ng: usize,
    u_d: F,
) -> Result<DVector<f64>, AssemblyError>
where
    F: Fn(&CurvePoint) -> f64,
{
    let elems = element_data(curve, basis, ng)?;
    let mut b = DVector::zeros(basis.dim());
    for ee in &elems {
        for (g, p) in ee.points.iter().enumerate() {
            let u = u_d(p);
            for (a, v) in ee.values[g].iter().enumerate() {
                b[ee.funcs[a]] += ee.wj[g] * v * u;
            }
        }
    }
    Ok(b)
}
