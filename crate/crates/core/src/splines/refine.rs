use super::{BasisSpec, SplineError};
use crate::quadrature::gauss_legendre;

/// A basis together with its uniformly refined counterpart. Every element of
/// the parent is split into `nref` equal pieces; new knots are simple and the
/// parent knots keep their multiplicities.
#[derive(Debug, Clone)]
pub struct RefinedBasis {
    pub parent: BasisSpec,
    pub fine: BasisSpec,
    pub nref: usize,
}

impl RefinedBasis {
    pub fn new(parent: &BasisSpec, nref: usize) -> Result<Self, SplineError> {
        if nref == 0 {
            return Err(SplineError::InvalidRefinement);
        }
        let d = parent.degree();
        let bps = parent.breakpoints();
        let mults = parent.multiplicities();
        let mut breakpoints = Vec::with_capacity((bps.len() - 1) * nref + 1);
        let mut multiplicities = Vec::with_capacity(breakpoints.capacity());
        for e in 0..bps.len() - 1 {
            breakpoints.push(bps[e]);
            multiplicities.push(mults[e]);
            let (lo, hi) = (bps[e], bps[e + 1]);
            for k in 1..nref {
                breakpoints.push(lo + (hi - lo) * k as f64 / nref as f64);
                multiplicities.push(1);
            }
        }
        breakpoints.push(*bps.last().unwrap());
        multiplicities.push(*mults.last().unwrap());
        let fine = if parent.is_closed() {
            BasisSpec::cyclic_with_multiplicities(d, &breakpoints, &multiplicities)?
        } else if mults[0] == d + 1 && *mults.last().unwrap() == d + 1 {
            BasisSpec::open(d, &breakpoints, &multiplicities)?
        } else {
            refine_general_knots(parent, nref)?
        };
        Ok(Self { parent: parent.clone(), fine, nref })
    }

    /// `∫ B^fine_j B^parent_i` for every fine function `j` overlapping the
    /// support of parent function `i`, as `(j, value)` pairs sorted by `j`.
    pub fn parent_moments(&self, i: usize) -> Result<Vec<(usize, f64)>, SplineError> {
        let npts = self.fine.degree() + self.parent.degree() / 2 + 2;
        let rule = gauss_legendre(npts);
        let support = self.parent.support(i)?;
        let mut acc = vec![0.0; self.fine.dim()];
        let mut touched = vec![false; self.fine.dim()];
        for e in 0..self.fine.num_elements() {
            let (lo, hi) = self.fine.element(e);
            if !support.contains(0.5 * (lo + hi)) {
                continue;
            }
            for (x, w) in rule.mapped(lo, hi) {
                let bi = self.parent.eval_function(i, x)?;
                for (j, v) in self.fine.eval(x, 0)? {
                    acc[j] += w * bi * v;
                    touched[j] = true;
                }
            }
        }
        Ok((0..acc.len()).filter(|&j| touched[j]).map(|j| (j, acc[j])).collect())
    }
}

fn refine_general_knots(parent: &BasisSpec, nref: usize) -> Result<BasisSpec, SplineError> {
    let d = parent.degree();
    let knots = parent.knots();
    let n = parent.raw_dim();
    let mut out: Vec<f64> = knots[..=d].to_vec();
    for k in d..n {
        let (lo, hi) = (knots[k], knots[k + 1]);
        if hi > lo {
            for r in 1..nref {
                out.push(lo + (hi - lo) * r as f64 / nref as f64);
            }
        }
        out.push(hi);
    }
    out.extend_from_slice(&knots[n + 1..]);
    BasisSpec::from_knots(d, &out)
}

/// `∫ B^a_j(s) B^b_i(s) ds` for two bases on the same interval whose
/// breakpoint partitions are nested (either way round).
pub fn product_integral(a: &BasisSpec, j: usize, b: &BasisSpec, i: usize) -> Result<f64, SplineError> {
    let fine = if a.num_elements() >= b.num_elements() { a } else { b };
    let rule = gauss_legendre((a.degree() + b.degree()) / 2 + 2);
    let sa = a.support(j)?;
    let sb = b.support(i)?;
    let mut total = 0.0;
    for e in 0..fine.num_elements() {
        let (lo, hi) = fine.element(e);
        let mid = 0.5 * (lo + hi);
        if !(sa.contains(mid) && sb.contains(mid)) {
            continue;
        }
        for (x, w) in rule.mapped(lo, hi) {
            total += w * a.eval_function(j, x)? * b.eval_function(i, x)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn refine_single_element() {
        let parent = BasisSpec::clamped(2, &[-1.0, 1.0]).unwrap();
        let r = RefinedBasis::new(&parent, 2).unwrap();
        assert_eq!(r.fine.knots(), &[-1.0, -1.0, -1.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(r.fine.dim(), 4);
    }

    #[test]
    fn refine_keeps_multiplicities() {
        let parent = BasisSpec::open(2, &[0.0, 0.5, 1.0], &[3, 2, 3]).unwrap();
        let r = RefinedBasis::new(&parent, 3).unwrap();
        assert_eq!(r.fine.num_elements(), 6);
        assert_eq!(r.fine.multiplicities(), &[3, 1, 1, 2, 1, 1, 3]);
        assert!(matches!(RefinedBasis::new(&parent, 0), Err(SplineError::InvalidRefinement)));
    }

    #[test]
    fn refine_cyclic() {
        let parent = BasisSpec::cyclic_uniform(3, -1.0, 1.0, 12).unwrap();
        let r = RefinedBasis::new(&parent, 2).unwrap();
        assert!(r.fine.is_closed());
        assert_eq!(r.fine.dim(), 24);
    }

    #[test]
    fn product_integral_single_element() {
        // ∫_{-1}^{1} B^fine_0 B^parent_0 with B^parent_0 = (1-s)^2/4, B^fine_0 = s^2 on [-1, 0]
        let parent = BasisSpec::clamped(2, &[-1.0, 1.0]).unwrap();
        let r = RefinedBasis::new(&parent, 2).unwrap();
        // exact: ∫_{-1}^{0} s^2 (1-s)^2 / 4 ds = (1/4)(1/3 + 1/2 + 1/5)
        let want = 0.25 * (1.0 / 3.0 + 0.5 + 0.2);
        assert_abs_diff_eq!(product_integral(&r.fine, 0, &parent, 0).unwrap(), want, epsilon = 1e-15);
        let moments = r.parent_moments(0).unwrap();
        assert_eq!(moments[0].0, 0);
        assert_abs_diff_eq!(moments[0].1, want, epsilon = 1e-15);
    }

    #[test]
    fn parent_moments_sum_to_integral() {
        let parent = BasisSpec::clamped_uniform(3, -1.0, 1.0, 5).unwrap();
        let r = RefinedBasis::new(&parent, 2).unwrap();
        for i in 0..parent.dim() {
            let total: f64 = r.parent_moments(i).unwrap().iter().map(|p| p.1).sum();
            assert_abs_diff_eq!(total, parent.integral(i).unwrap(), epsilon = 1e-14);
        }
    }
}
