//! Modified moments `μ_j(s) = ∫_a^b B_j(t) ln|t - s| dt`.
//!
//! The integrals are built bottom-up over the Cox–de Boor recursion. Each
//! level keeps locally shifted power moments
//! `M_q(j, r) = ∫ ln|t - s| (t - t_j)^q B_{j,r}(t) dt`; shifting by the first
//! knot of the support keeps the binomial re-expansions well conditioned on
//! fine meshes. Degree zero moments are single span integrals evaluated in
//! closed form near the singularity and by a convergent log series away from
//! it.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;
use crate::splines::BasisSpec;

/// Switch from the closed form to the log series once `|z0| >= FAR * h`.
const FAR: f64 = 2.5;

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1.0;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + if j < i { c[i - 1][j] } else { 0.0 };
        }
    }
    c
}

/// `F_j(z) = z^{j+1}/(j+1) (ln|z| - 1/(j+1))`, with `F_j(0) = 0`.
fn antiderivative(j: usize, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let p = (j + 1) as f64;
    z.powi(j as i32 + 1) / p * (z.abs().ln() - 1.0 / p)
}

/// `∫_0^h ln|u + z0| u^k du` for `k = 0..=kmax`.
fn span_moments(z0: f64, h: f64, kmax: usize, binom: &[Vec<f64>], out: &mut [f64]) {
    if z0.abs() >= FAR * h {
        let lz = z0.abs().ln();
        let ratio = h / z0;
        for (k, slot) in out.iter_mut().enumerate().take(kmax + 1) {
            let hk = h.powi(k as i32 + 1);
            let mut sum = lz / (k as f64 + 1.0);
            let mut pw = 1.0;
            for m in 1..200 {
                pw *= -ratio;
                // (-1)^{m+1} (h/z0)^m / (m (k+m+1))
                let term = -pw / (m as f64 * (k + m + 1) as f64);
                sum += term;
                if term.abs() <= 1e-18 * sum.abs().max(1e-300) {
                    break;
                }
            }
            *slot = hk * sum;
        }
    } else {
        let z1 = z0 + h;
        let f: Vec<f64> = (0..=kmax).map(|j| antiderivative(j, z1) - antiderivative(j, z0)).collect();
        for (k, slot) in out.iter_mut().enumerate().take(kmax + 1) {
            let mut sum = 0.0;
            for j in 0..=k {
                sum += binom[k][j] * (-z0).powi((k - j) as i32) * f[j];
            }
            *slot = sum;
        }
    }
}

/// Raw modified moments for every raw B-spline of `basis` at `s`, restricted
/// to the parameter domain.
fn raw_moments(basis: &BasisSpec, s: f64) -> Vec<f64> {
    let d = basis.degree();
    let t = basis.knots();
    let nk = t.len();
    let (a, b) = basis.domain();
    let binom = binomials(d + 1);

    // level 0: one row per knot span, q = 0..=d
    let mut cur = vec![0.0; (nk - 1) * (d + 1)];
    for i in 0..nk - 1 {
        let (lo, hi) = (t[i], t[i + 1]);
        if hi > lo && lo >= a && hi <= b {
            span_moments(lo - s, hi - lo, d, &binom, &mut cur[i * (d + 1)..(i + 1) * (d + 1)]);
        }
    }
    let stride = d + 1;
    for r in 1..=d {
        let rows = nk - 1 - r;
        let qmax = d - r;
        let mut next = vec![0.0; rows * stride];
        for j in 0..rows {
            let w1 = t[j + r] - t[j];
            let hh = t[j + r + 1] - t[j + 1];
            let delta = t[j + 1] - t[j];
            for q in 0..=qmax {
                let mut v = 0.0;
                if w1 > 0.0 {
                    v += cur[j * stride + q + 1] / w1;
                }
                if hh > 0.0 {
                    let mut acc = 0.0;
                    let mut dpow = 1.0;
                    // Σ_m C(q,m) δ^{q-m} [H M_m - M_{m+1}], summed from m = q down
                    for m in (0..=q).rev() {
                        let row = (j + 1) * stride;
                        acc += binom[q][m] * dpow * (hh * cur[row + m] - cur[row + m + 1]);
                        dpow *= delta;
                    }
                    v += acc / hh;
                }
                next[j * stride + q] = v;
            }
        }
        cur = next;
    }
    (0..basis.raw_dim()).map(|j| cur[j * stride]).collect()
}

/// `μ_j(s) = ∫_a^b B_j(t) ln|t - s| dt` for every logical function `j`.
/// `s` may lie anywhere on the real line.
pub fn log_moments(basis: &BasisSpec, s: f64) -> Vec<f64> {
    let raw = raw_moments(basis, s);
    fold(basis, raw)
}

/// `ln|(L/π) sin(π δ / L)| - ln|δ| - ln|δ - L| - ln|δ + L|` for `|δ| ≤ L`;
/// analytic there, the three logs carry every singularity.
fn periodic_remainder(delta: f64, l: f64) -> f64 {
    let ax = PI * delta.abs() / l;
    let scale = 2.0 * (l / PI).ln();
    let sinc = |y: f64| if y == 0.0 { 1.0 } else { y.sin() / y };
    if ax <= 0.5 * PI {
        sinc(ax).ln() - (PI * PI - ax * ax).ln() - scale
    } else {
        let y = PI * (l - delta.abs()) / l;
        sinc(y).ln() - ax.ln() - (PI + ax).ln() - scale
    }
}

/// Moments against the periodic kernel `ln|(L/π) sin(π (t - s) / L)|` used on
/// closed curves, for `s` in the parameter domain. The three log images are
/// integrated exactly; the analytic remainder by Gauss on every element.
pub fn periodic_log_moments(basis: &BasisSpec, s: f64) -> Vec<f64> {
    let l = basis.length();
    let mut raw = raw_moments(basis, s);
    for shifted in [raw_moments(basis, s + l), raw_moments(basis, s - l)] {
        for (x, y) in raw.iter_mut().zip(shifted) {
            *x += y;
        }
    }
    let mut out = fold(basis, raw);
    let rule = gauss_legendre(basis.degree() + 16);
    for e in 0..basis.num_elements() {
        let (lo, hi) = basis.element(e);
        for (t, w) in rule.mapped(lo, hi) {
            let g = w * periodic_remainder(t - s, l);
            for (j, v) in basis.eval(t, 0).expect("Gauss point inside the domain") {
                out[j] += g * v;
            }
        }
    }
    out
}

/// Moments of the kernel appropriate for `basis`: plain log for open bases,
/// periodized log for closed ones.
pub fn kernel_moments(basis: &BasisSpec, s: f64) -> Vec<f64> {
    if basis.is_closed() {
        periodic_log_moments(basis, s)
    } else {
        log_moments(basis, s)
    }
}

fn fold(basis: &BasisSpec, raw: Vec<f64>) -> Vec<f64> {
    if !basis.is_closed() {
        return raw;
    }
    let mut out = vec![0.0; basis.dim()];
    for (k, v) in raw.into_iter().enumerate() {
        out[basis.logical_index(k)] += v;
    }
    out
}

/// `∫_a^b t^p ln|t - s| dt` in closed form.
pub fn monomial_log_moment(p: usize, a: f64, b: f64, s: f64) -> f64 {
    let binom = binomials(p);
    // t^p = Σ_j C(p,j) s^{p-j} (t - s)^j
    (0..=p).map(|j| binom[p][j] * s.powi((p - j) as i32) * (antiderivative(j, b - s) - antiderivative(j, a - s))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive::{integrate_adaptive, integrate_log_singular, log_integral};
    use approx::assert_relative_eq;

    fn oracle(basis: &BasisSpec, j: usize, s: f64) -> f64 {
        let support = basis.support(j).unwrap();
        let mut total = 0.0;
        for e in 0..basis.num_elements() {
            let (lo, hi) = basis.element(e);
            if !support.contains(0.5 * (lo + hi)) {
                continue;
            }
            total += integrate_log_singular(|t| basis.eval_function(j, t).unwrap(), lo, hi, s, 1e-15).unwrap();
        }
        total
    }

    #[test]
    fn degree_zero_far_point() {
        let basis = BasisSpec::clamped(0, &[0.0, 1.0]).unwrap();
        let mu = log_moments(&basis, 3.0);
        assert_relative_eq!(mu[0], 3.0 * 3f64.ln() - 2.0 * 2f64.ln() - 1.0, max_relative = 1e-14);
        assert_relative_eq!(mu[0], 0.909543, max_relative = 1e-6);
    }

    #[test]
    fn partition_of_unity_sum() {
        for d in 0..=5 {
            let basis = BasisSpec::clamped_uniform(d, -1.0, 1.0, 13).unwrap();
            for &s in &[-1.0, -0.77, 0.0, 0.31, 1.0, 1.4] {
                let total: f64 = log_moments(&basis, s).iter().sum();
                let want = log_integral(-1.0, 1.0, s);
                assert!((total - want).abs() <= 1e-12 * want.abs().max(1.0), "d={d} s={s}");
            }
        }
    }

    #[test]
    fn knot_abscissa_matches_oracle() {
        let basis = BasisSpec::clamped_uniform(3, -1.0, 1.0, 8).unwrap();
        let s = 0.25;
        let mu = log_moments(&basis, s);
        for (j, &m) in mu.iter().enumerate() {
            assert_relative_eq!(m, oracle(&basis, j, s), max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn fine_meshes_stay_accurate() {
        let basis = BasisSpec::clamped_uniform(5, -1.0, 1.0, 200).unwrap();
        for &s in &[-0.999, 0.0123, 0.5] {
            let mu = log_moments(&basis, s);
            for j in [0, 3, 50, 101, 204] {
                assert_relative_eq!(mu[j], oracle(&basis, j, s), max_relative = 1e-10, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn periodic_moments_sum_and_oracle() {
        use crate::geometry::periodic_log;
        let basis = BasisSpec::cyclic_uniform(3, -1.0, 1.0, 12).unwrap();
        let l = 2.0;
        // ∫ over one period of ln|(L/π) sin(π δ/L)| = L ln(L / 2π), for every s
        for &s in &[-1.0, -0.95, 0.3, 1.0] {
            let total: f64 = periodic_log_moments(&basis, s).iter().sum();
            assert_relative_eq!(total, l * (l / (2.0 * PI)).ln(), max_relative = 1e-12);
        }
        let s = 0.3;
        let mu = periodic_log_moments(&basis, s);
        for j in 0..basis.dim() {
            let bj = |t: f64| basis.eval_function(j, t).unwrap();
            let want = integrate_log_singular(bj, -1.0, 1.0, s, 1e-15).unwrap()
                + integrate_adaptive(
                    |t| bj(t) * (periodic_log(t - s, l) - (t - s).abs().ln()),
                    -1.0,
                    1.0,
                    1e-15,
                    1e-15,
                )
                .unwrap();
            assert_relative_eq!(mu[j], want, max_relative = 1e-11, epsilon = 1e-14);
        }
    }

    #[test]
    fn periodic_remainder_is_continuous() {
        let l = 2.0;
        let direct =
            |d: f64| crate::geometry::periodic_log(d, l) - d.abs().ln() - (d - l).abs().ln() - (d + l).abs().ln();
        for &d in &[0.3, -0.7, 0.99, 1.2, -1.6] {
            assert_relative_eq!(periodic_remainder(d, l), direct(d), max_relative = 1e-12);
        }
        for &d in &[0.0, l, -l, 0.5 * l] {
            let left = periodic_remainder(d - 1e-9, l);
            let right = periodic_remainder((d + 1e-9).min(l), l);
            assert!((left - right).abs() < 1e-7, "jump at {d}");
        }
    }

    #[test]
    fn monomial_closed_form() {
        let v = monomial_log_moment(2, -1.0, 1.0, 0.0);
        assert_relative_eq!(v, -2.0 / 9.0, max_relative = 1e-14);
        let v = monomial_log_moment(3, -1.0, 1.0, 0.3);
        let o = integrate_log_singular(|t| t.powi(3), -1.0, 1.0, 0.3, 1e-15).unwrap();
        assert_relative_eq!(v, o, max_relative = 1e-12);
    }
}
