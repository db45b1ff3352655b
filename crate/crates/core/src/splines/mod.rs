//! B-spline bases on open (clamped) and closed (periodic) parameter intervals.
//!
//! A [`BasisSpec`] stores the full extended knot vector together with the
//! distinct breakpoints of the parameter interval `[a, b]`. Open bases use
//! clamped end knots (multiplicity `d + 1`). Closed bases use a periodic
//! knot layout; the first `d` raw B-splines and the last `d` raw B-splines
//! describe the same periodic functions, so they are exposed as single
//! logical functions whose support wraps around the seam. The logical
//! dimension of a closed basis is therefore `N - d`.

mod refine;

pub use refine::{product_integral, RefinedBasis};

use thiserror::Error;

use crate::quadrature::gauss_legendre;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("at least two breakpoints are required, got {0}")]
    TooFewBreakpoints(usize),
    #[error("breakpoints must be finite and strictly increasing")]
    UnsortedBreakpoints,
    #[error("expected {expected} multiplicities, got {got}")]
    MultiplicityCount { expected: usize, got: usize },
    #[error("multiplicity {mult} at breakpoint {index} is outside the allowed range 1..={max}")]
    Multiplicity { index: usize, mult: usize, max: usize },
    #[error("periodic knot layout has {got} knots per period; degree {degree} needs at least {need}")]
    PeriodTooShort { degree: usize, got: usize, need: usize },
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("parameter {s} lies outside the domain [{a}, {b}]")]
    OutOfDomain { s: f64, a: f64, b: f64 },
    #[error("basis function index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("refinement factor must be at least 1")]
    InvalidRefinement,
}

/// Extended knot vector plus degree; see the module docs for the open/closed
/// conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    degree: usize,
    knots: Vec<f64>,
    closed: bool,
    breakpoints: Vec<f64>,
    multiplicities: Vec<usize>,
    dim: usize,
}

/// Support of a basis function: one interval, or two for periodic functions
/// that wrap around the seam.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub pieces: Vec<(f64, f64)>,
}

impl Support {
    pub fn contains(&self, s: f64) -> bool {
        self.pieces.iter().any(|&(lo, hi)| s > lo && s < hi)
    }

    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.pieces.iter().any(|&(p, q)| p.max(lo) < q.min(hi))
    }

    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(|&(lo, hi)| hi - lo).sum()
    }
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<(), SplineError> {
    if breakpoints.len() < 2 {
        return Err(SplineError::TooFewBreakpoints(breakpoints.len()));
    }
    let ok = breakpoints.iter().all(|x| x.is_finite()) && breakpoints.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(SplineError::UnsortedBreakpoints)
    }
}

fn max_inner_multiplicity(degree: usize) -> usize {
    degree.max(1)
}

impl BasisSpec {
    /// Clamped basis with the given breakpoint multiplicities. `multiplicities`
    /// has one entry per breakpoint; the two end entries must equal `d + 1`.
    pub fn open(degree: usize, breakpoints: &[f64], multiplicities: &[usize]) -> Result<Self, SplineError> {
        check_breakpoints(breakpoints)?;
        let m = breakpoints.len();
        if multiplicities.len() != m {
            return Err(SplineError::MultiplicityCount { expected: m, got: multiplicities.len() });
        }
        for (index, &mult) in multiplicities.iter().enumerate() {
            let max = if index == 0 || index == m - 1 { degree + 1 } else { max_inner_multiplicity(degree) };
            let bad = if index == 0 || index == m - 1 { mult != degree + 1 } else { mult == 0 || mult > max };
            if bad {
                return Err(SplineError::Multiplicity { index, mult, max });
            }
        }
        let knots: Vec<f64> =
            breakpoints.iter().zip(multiplicities).flat_map(|(&x, &k)| std::iter::repeat(x).take(k)).collect();
        let dim = knots.len() - degree - 1;
        Ok(Self {
            degree,
            knots,
            closed: false,
            breakpoints: breakpoints.to_vec(),
            multiplicities: multiplicities.to_vec(),
            dim,
        })
    }

    /// Clamped basis with simple inner knots (maximal smoothness).
    pub fn clamped(degree: usize, breakpoints: &[f64]) -> Result<Self, SplineError> {
        let m = breakpoints.len();
        let mut mult = vec![1; m];
        if m >= 1 {
            mult[0] = degree + 1;
            mult[m - 1] = degree + 1;
        }
        Self::open(degree, breakpoints, &mult)
    }

    pub fn clamped_uniform(degree: usize, a: f64, b: f64, elements: usize) -> Result<Self, SplineError> {
        Self::clamped(degree, &uniform_breakpoints(a, b, elements))
    }

    /// Open basis from an explicit extended knot vector `t_1 .. t_{N+d+1}`; the
    /// domain is `[t_{d+1}, t_{N+1}]`.
    pub fn from_knots(degree: usize, knots: &[f64]) -> Result<Self, SplineError> {
        if knots.len() < 2 * degree + 2 {
            return Err(SplineError::InvalidKnots(format!(
                "{} knots cannot carry a degree {degree} basis",
                knots.len()
            )));
        }
        if knots.iter().any(|x| !x.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(SplineError::InvalidKnots("knots must be finite and non-decreasing".into()));
        }
        let n = knots.len() - degree - 1;
        let (a, b) = (knots[degree], knots[n]);
        if b <= a {
            return Err(SplineError::InvalidKnots("empty parameter domain".into()));
        }
        let mut breakpoints = Vec::new();
        let mut multiplicities = Vec::new();
        for &x in &knots[degree..=n] {
            if breakpoints.last() == Some(&x) {
                *multiplicities.last_mut().unwrap() += 1;
            } else {
                breakpoints.push(x);
                multiplicities.push(1);
            }
        }
        let last = multiplicities.len() - 1;
        for (index, &mult) in multiplicities.iter().enumerate().skip(1).take(last.saturating_sub(1)) {
            if mult > degree + 1 {
                return Err(SplineError::Multiplicity { index, mult, max: degree + 1 });
            }
        }
        // end multiplicities count the auxiliary knots when they coincide
        multiplicities[0] = knots.iter().filter(|&&x| x == a).count();
        multiplicities[last] = knots.iter().filter(|&&x| x == b).count();
        Ok(Self { degree, knots: knots.to_vec(), closed: false, breakpoints, multiplicities, dim: n })
    }

    /// Periodic basis on `[breakpoints[0], breakpoints[M]]` with simple knots.
    pub fn cyclic(degree: usize, breakpoints: &[f64]) -> Result<Self, SplineError> {
        let mult = vec![1; breakpoints.len()];
        Self::cyclic_with_multiplicities(degree, breakpoints, &mult)
    }

    pub fn cyclic_uniform(degree: usize, a: f64, b: f64, elements: usize) -> Result<Self, SplineError> {
        Self::cyclic(degree, &uniform_breakpoints(a, b, elements))
    }

    /// Periodic basis; `multiplicities` has one entry per breakpoint and the
    /// first and last entries (the same point of the closed curve) must agree.
    pub fn cyclic_with_multiplicities(
        degree: usize,
        breakpoints: &[f64],
        multiplicities: &[usize],
    ) -> Result<Self, SplineError> {
        check_breakpoints(breakpoints)?;
        let m = breakpoints.len();
        if multiplicities.len() != m {
            return Err(SplineError::MultiplicityCount { expected: m, got: multiplicities.len() });
        }
        let max = max_inner_multiplicity(degree);
        for (index, &mult) in multiplicities.iter().enumerate() {
            if mult == 0 || mult > max {
                return Err(SplineError::Multiplicity { index, mult, max });
            }
        }
        if multiplicities[0] != multiplicities[m - 1] {
            return Err(SplineError::Multiplicity {
                index: m - 1,
                mult: multiplicities[m - 1],
                max: multiplicities[0],
            });
        }
        let a = breakpoints[0];
        let period = breakpoints[m - 1] - a;
        let one_period: Vec<f64> =
            breakpoints[..m - 1].iter().zip(multiplicities).flat_map(|(&x, &k)| std::iter::repeat(x).take(k)).collect();
        let p = one_period.len();
        if p < degree + 1 {
            return Err(SplineError::PeriodTooShort { degree, got: p, need: degree + 1 });
        }
        let mut knots = Vec::with_capacity(p + 2 * degree + 1);
        knots.extend(one_period[p - degree..].iter().map(|x| x - period));
        knots.extend_from_slice(&one_period);
        knots.extend(one_period[..=degree].iter().map(|x| x + period));
        Ok(Self {
            degree,
            knots,
            closed: true,
            breakpoints: breakpoints.to_vec(),
            multiplicities: multiplicities.to_vec(),
            dim: p,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of logical basis functions (`N`, or `N - d` when closed).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of raw B-splines `N` carried by the knot vector.
    pub fn raw_dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.breakpoints[e], self.breakpoints[e + 1])
    }

    /// Element containing `s`; `s = b` belongs to the last element.
    pub fn element_of(&self, s: f64) -> usize {
        let m = self.num_elements();
        let k = self.breakpoints.partition_point(|&x| x <= s);
        k.saturating_sub(1).min(m - 1)
    }

    /// Logical index of raw B-spline `k`.
    pub fn logical_index(&self, raw: usize) -> usize {
        if self.closed {
            raw % self.dim
        } else {
            raw
        }
    }

    fn clamp_to_domain(&self, s: f64) -> Result<f64, SplineError> {
        let (a, b) = self.domain();
        let tol = 1e-12 * (b - a);
        if !(s >= a - tol && s <= b + tol) {
            return Err(SplineError::OutOfDomain { s, a, b });
        }
        Ok(s.clamp(a, b))
    }

    /// Knot span `i` with `t_i <= s < t_{i+1}`, restricted to the domain;
    /// `s = b` maps to the last non-empty span.
    pub fn span(&self, s: f64) -> usize {
        let d = self.degree;
        let n = self.raw_dim();
        let count = self.knots.partition_point(|&x| x <= s);
        let i = count.saturating_sub(1).clamp(d, n - 1);
        if self.knots[i] < self.knots[i + 1] {
            return i;
        }
        // only reachable at s = b for knot layouts with repeated end knots
        (d..n).rev().find(|&k| self.knots[k] < self.knots[k + 1]).unwrap_or(d)
    }

    /// Values and derivatives of the `d + 1` raw B-splines that are nonzero
    /// on `span`: `out[k][r]` is the k-th derivative of raw function
    /// `span - d + r`.
    pub fn raw_derivatives(&self, span: usize, s: f64, nder: usize) -> Vec<Vec<f64>> {
        ders_basis_funs(&self.knots, self.degree, span, s, nder)
    }

    /// Nonzero basis values (or derivatives of order `deriv_order`) at `s` as
    /// `(logical index, value)` pairs.
    pub fn eval(&self, s: f64, deriv_order: usize) -> Result<Vec<(usize, f64)>, SplineError> {
        let s = self.clamp_to_domain(s)?;
        let span = self.span(s);
        let ders = self.raw_derivatives(span, s, deriv_order);
        let first = span - self.degree;
        Ok(ders[deriv_order].iter().enumerate().map(|(r, &v)| (self.logical_index(first + r), v)).collect())
    }

    /// All derivatives up to `nder` at `s`: `(first logical indices, ders)`.
    pub fn eval_derivatives(&self, s: f64, nder: usize) -> Result<(Vec<usize>, Vec<Vec<f64>>), SplineError> {
        let s = self.clamp_to_domain(s)?;
        let span = self.span(s);
        let ders = self.raw_derivatives(span, s, nder);
        let first = span - self.degree;
        let idx = (0..=self.degree).map(|r| self.logical_index(first + r)).collect();
        Ok((idx, ders))
    }

    /// Value of the single logical function `i` at `s`.
    pub fn eval_function(&self, i: usize, s: f64) -> Result<f64, SplineError> {
        self.check_index(i)?;
        Ok(self.eval(s, 0)?.into_iter().filter(|&(j, _)| j == i).map(|(_, v)| v).sum())
    }

    fn check_index(&self, i: usize) -> Result<(), SplineError> {
        if i >= self.dim {
            Err(SplineError::IndexOutOfRange { index: i, dim: self.dim })
        } else {
            Ok(())
        }
    }

    fn raw_indices(&self, i: usize) -> Vec<usize> {
        if self.closed && i < self.degree {
            vec![i, i + self.dim]
        } else {
            vec![i]
        }
    }

    /// Open support of logical function `i`, clipped to the domain.
    pub fn support(&self, i: usize) -> Result<Support, SplineError> {
        self.check_index(i)?;
        let (a, b) = self.domain();
        let d = self.degree;
        let pieces = self
            .raw_indices(i)
            .into_iter()
            .map(|k| (self.knots[k].max(a), self.knots[k + d + 1].min(b)))
            .filter(|(lo, hi)| hi > lo)
            .collect();
        Ok(Support { pieces })
    }

    /// Elements of the breakpoint partition contained in the support of `i`.
    pub fn support_elements(&self, i: usize) -> Result<Vec<usize>, SplineError> {
        let support = self.support(i)?;
        Ok((0..self.num_elements())
            .filter(|&e| {
                let (lo, hi) = self.element(e);
                support.contains(0.5 * (lo + hi))
            })
            .collect())
    }

    /// Logical functions whose support overlaps the open interval `(lo, hi)`.
    pub fn active_functions(&self, lo: f64, hi: f64) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.dim).filter(|&j| self.support(j).map(|s| s.overlaps(lo, hi)).unwrap_or(false)).collect();
        out.dedup();
        out
    }

    /// `∫_I B_i(s) ds`.
    pub fn integral(&self, i: usize) -> Result<f64, SplineError> {
        let rule = gauss_legendre(self.degree + 1);
        let mut total = 0.0;
        for e in self.support_elements(i)? {
            let (lo, hi) = self.element(e);
            for (x, w) in rule.mapped(lo, hi) {
                total += w * self.eval_function(i, x)?;
            }
        }
        Ok(total)
    }

    /// Spline `Σ c_i B_i` (derivative `deriv_order`) at `s`.
    pub fn combine(&self, coeffs: &[f64], s: f64, deriv_order: usize) -> Result<f64, SplineError> {
        Ok(self.eval(s, deriv_order)?.iter().map(|&(j, v)| coeffs[j] * v).sum())
    }
}

pub fn uniform_breakpoints(a: f64, b: f64, elements: usize) -> Vec<f64> {
    let n = elements.max(1);
    (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect()
}

/// Cox–de Boor values and derivatives of the nonzero B-splines on `span`.
fn ders_basis_funs(knots: &[f64], p: usize, span: usize, u: f64, n: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let top = n.min(p);
    let mut a = vec![vec![0.0; p + 1]; 2];
    let pi = p as isize;
    for r in 0..=pi {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=top as isize {
            let mut d = 0.0;
            let rk = r - k;
            let pk = pi - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r - 1 <= pk { k - 1 } else { pi - r };
            for j in j1..=j2 {
                let (ju, rkj) = (j as usize, (rk + j) as usize);
                a[s2][ju] = (a[s1][ju] - a[s1][ju - 1]) / ndu[(pk + 1) as usize][rkj];
                d += a[s2][ju] * ndu[rkj][pk as usize];
            }
            if r <= pk {
                let ku = k as usize;
                a[s2][ku] = -a[s1][ku - 1] / ndu[(pk + 1) as usize][r as usize];
                d += a[s2][ku] * ndu[r as usize][pk as usize];
            }
            ders[k as usize][r as usize] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=top {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Truncated-power evaluation: B_{i,d}(s) = (t_{i+d+1} - t_i) [t_i..t_{i+d+1}] (· - s)_+^d,
    /// via the divided-difference table on distinct knots.
    fn truncated_power_bspline(knots: &[f64], i: usize, d: usize, s: f64) -> f64 {
        let t = &knots[i..=i + d + 1];
        let f = |x: f64| if x > s { (x - s).powi(d as i32) } else { 0.0 };
        let mut table: Vec<f64> = t.iter().map(|&x| f(x)).collect();
        for level in 1..=d + 1 {
            for k in 0..=d + 1 - level {
                table[k] = (table[k + 1] - table[k]) / (t[k + level] - t[k]);
            }
        }
        (t[d + 1] - t[0]) * table[0]
    }

    #[test]
    fn single_bezier_element_midpoint() {
        let basis = BasisSpec::from_knots(2, &[-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]).unwrap();
        let vals = basis.eval(0.0, 0).unwrap();
        let got: Vec<f64> = vals.iter().map(|v| v.1).collect();
        assert_abs_diff_eq!(got[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(got[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(got[2], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn open_basis_knot_layouts() {
        let t1 = BasisSpec::clamped(2, &[-1.0, 1.0]).unwrap();
        assert_eq!(t1.knots(), &[-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]);
        let hats = BasisSpec::clamped(1, &[0.0, 1.0]).unwrap();
        assert_eq!(hats.dim(), 2);
        assert!(BasisSpec::open(2, &[0.0, 0.5, 1.0], &[3, 3, 3]).is_err());
        assert!(BasisSpec::open(2, &[0.0, 0.5, 1.0], &[3, 2, 3]).is_ok());
        assert!(matches!(BasisSpec::clamped(2, &[0.0, 0.0, 1.0]), Err(SplineError::UnsortedBreakpoints)));
    }

    #[test]
    fn cyclic_layout_matches_sixth_spacing() {
        let bps: Vec<f64> = (0..=12).map(|k| -1.0 + k as f64 / 6.0).collect();
        let basis = BasisSpec::cyclic(3, &bps).unwrap();
        assert_eq!(basis.knots().len(), 19);
        for (k, &t) in basis.knots().iter().enumerate() {
            assert_abs_diff_eq!(t, -1.5 + k as f64 / 6.0, epsilon = 1e-14);
        }
        assert_eq!(basis.dim(), 12);
        assert_eq!(basis.raw_dim() - basis.degree(), 12);

        let wide: Vec<f64> = (0..=18).map(|k| -1.5 + k as f64 / 6.0).collect();
        assert_eq!(BasisSpec::cyclic(3, &wide).unwrap().dim(), 18);
    }

    #[test]
    fn matches_truncated_power_oracle() {
        let basis = BasisSpec::clamped_uniform(3, 0.0, 1.0, 10).unwrap();
        let knots = basis.knots().to_vec();
        let mut x: u64 = 12345;
        let mut points = vec![0.37];
        for _ in 0..1000 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            points.push((x >> 11) as f64 / (1u64 << 53) as f64);
        }
        for s in points {
            for (i, v) in basis.eval(s, 0).unwrap() {
                // the oracle needs distinct knots: only interior functions qualify
                if i >= 3 && i + 4 < knots.len() - 3 {
                    let want = truncated_power_bspline(&knots, i, 3, s);
                    assert_abs_diff_eq!(v, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let basis = BasisSpec::clamped(3, &[0.0, 0.3, 0.45, 0.7, 1.0]).unwrap();
        let h = 1e-6;
        for &s in &[0.1, 0.33, 0.5, 0.8] {
            let d1 = basis.eval(s, 1).unwrap();
            for (i, v) in d1 {
                let fd = (basis.eval_function(i, s + h).unwrap() - basis.eval_function(i, s - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(v, fd, epsilon = 1e-6);
            }
            let d2 = basis.eval(s, 2).unwrap();
            for (i, v) in d2 {
                let up = basis.eval(s + h, 1).unwrap().into_iter().find(|p| p.0 == i).map_or(0.0, |p| p.1);
                let dn = basis.eval(s - h, 1).unwrap().into_iter().find(|p| p.0 == i).map_or(0.0, |p| p.1);
                assert_abs_diff_eq!(v, (up - dn) / (2.0 * h), epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn cyclic_eval_is_periodic() {
        let basis = BasisSpec::cyclic_uniform(3, -1.0, 1.0, 9).unwrap();
        for k in 0..3 {
            let mut at_a = vec![0.0; basis.dim()];
            let mut at_b = vec![0.0; basis.dim()];
            for (i, v) in basis.eval(-1.0, k).unwrap() {
                at_a[i] += v;
            }
            for (i, v) in basis.eval(1.0, k).unwrap() {
                at_b[i] += v;
            }
            for (x, y) in at_a.iter().zip(&at_b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn supports() {
        let t1 = BasisSpec::clamped(2, &[-1.0, 1.0]).unwrap();
        assert_eq!(t1.support(1).unwrap().pieces, vec![(-1.0, 1.0)]);
        let basis = BasisSpec::clamped_uniform(2, -1.0, 1.0, 10).unwrap();
        assert_eq!(basis.support_elements(5).unwrap().len(), 3);
        assert!(matches!(basis.support(12), Err(SplineError::IndexOutOfRange { .. })));
        let cyc = BasisSpec::cyclic_uniform(2, 0.0, 1.0, 5).unwrap();
        let wrap = cyc.support(0).unwrap();
        assert_eq!(wrap.pieces.len(), 2);
        assert_abs_diff_eq!(wrap.measure(), 0.6, epsilon = 1e-14);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let basis = BasisSpec::clamped_uniform(2, 0.0, 1.0, 4).unwrap();
        assert!(matches!(basis.eval(1.5, 0), Err(SplineError::OutOfDomain { .. })));
        assert!(basis.eval(1.0, 0).is_ok());
    }

    #[test]
    fn integrals_of_basis_functions() {
        let basis = BasisSpec::clamped_uniform(2, -1.0, 1.0, 4).unwrap();
        let total: f64 = (0..basis.dim()).map(|i| basis.integral(i).unwrap()).sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
        // interior uniform quadratic: knot span width 3h over (d + 1)
        assert_abs_diff_eq!(basis.integral(2).unwrap(), 1.5 / 3.0, epsilon = 1e-14);
    }
}
