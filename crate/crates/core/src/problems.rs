//! Model problems: an exterior Dirichlet problem on an open arc (indirect
//! formulation, manufactured density) and an interior Dirichlet problem on a
//! smooth closed curve (direct formulation, linear harmonic datum).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryCurve, CurvePoint, GeometryError};
use crate::quadrature::{integrate_adaptive, integrate_log_singular, QuadratureError};
use crate::splines::{BasisSpec, SplineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown problem '{0}' (expected 'parabola' or 'closed-smooth')")]
    UnknownProblem(String),
    #[error("curve kind does not match the problem: {0}")]
    CurveKind(String),
    #[error("mesh size {h} does not split the parameter interval of length {length} into whole elements")]
    MeshSize { h: f64, length: f64 },
    #[error("{n_h} elements do not refine the {geometry} geometry elements")]
    NotNested { n_h: usize, geometry: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Exterior problem on an open arc, single-layer density unknown.
    OpenArc,
    /// Interior problem on a closed curve, Neumann trace unknown.
    ClosedDirect,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub kind: ProblemKind,
    pub curve: BoundaryCurve,
}

/// Parabolic arc `x = (t, 1 - t²)`, `t ∈ [-1, 1]`.
pub fn parabola_curve() -> BoundaryCurve {
    let basis = BasisSpec::clamped(2, &[-1.0, 1.0]).expect("valid basis");
    BoundaryCurve::new(basis, parabola_control_points()).expect("regular curve")
}

pub fn parabola_control_points() -> Vec<[f64; 2]> {
    vec![[-1.0, 0.0], [0.0, 2.0], [1.0, 0.0]]
}

/// Closed periodic cubic through 12 control points on the polar curve
/// `r(θ) = 0.55 (1 + 0.25 cos 2θ + 0.1 sin 3θ)`, counterclockwise, parameter
/// interval `[-1, 1]` with breakpoint spacing 1/6.
pub fn closed_smooth_curve() -> BoundaryCurve {
    let breakpoints: Vec<f64> = (0..=12).map(|k| -1.0 + k as f64 / 6.0).collect();
    let basis = BasisSpec::cyclic(3, &breakpoints).expect("valid basis");
    let control = (0..12)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / 12.0;
            let r = 0.55 * (1.0 + 0.25 * (2.0 * th).cos() + 0.1 * (3.0 * th).sin());
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    BoundaryCurve::new(basis, control).expect("regular curve")
}

impl Problem {
    pub fn by_name(name: &str) -> Result<Self, ProblemError> {
        match name {
            "parabola" => Ok(Self { name: name.into(), kind: ProblemKind::OpenArc, curve: parabola_curve() }),
            "closed-smooth" => {
                Ok(Self { name: name.into(), kind: ProblemKind::ClosedDirect, curve: closed_smooth_curve() })
            }
            other => Err(ProblemError::UnknownProblem(other.into())),
        }
    }

    /// Same problem on a user-supplied curve.
    pub fn with_curve(mut self, curve: BoundaryCurve) -> Result<Self, ProblemError> {
        let closed = self.kind == ProblemKind::ClosedDirect;
        if curve.is_closed() != closed {
            return Err(ProblemError::CurveKind(format!(
                "problem '{}' needs a {} curve",
                self.name,
                if closed { "closed" } else { "open" }
            )));
        }
        self.curve = curve;
        Ok(self)
    }

    /// Number of elements for mesh size `h` (parameter units).
    pub fn elements_for_h(&self, h: f64) -> Result<usize, ProblemError> {
        let length = self.curve.basis().length();
        let n = length / h;
        let rounded = n.round();
        if !(h > 0.0) || rounded < 1.0 || (n - rounded).abs() > 1e-9 * n.max(1.0) {
            return Err(ProblemError::MeshSize { h, length });
        }
        Ok(rounded as usize)
    }

    /// Discretization basis of degree `degree` on `n_h` uniform elements. On
    /// closed curves the breakpoints of the geometry keep multiplicity 2 (the
    /// exact flux is only C¹ there).
    pub fn discretization(&self, degree: usize, n_h: usize) -> Result<BasisSpec, ProblemError> {
        let (a, b) = self.curve.domain();
        match self.kind {
            ProblemKind::OpenArc => Ok(BasisSpec::clamped_uniform(degree, a, b, n_h)?),
            ProblemKind::ClosedDirect => {
                let geo = self.curve.basis().breakpoints();
                let m = geo.len() - 1;
                let uniform_geo = geo.windows(2).all(|w| ((w[1] - w[0]) - (b - a) / m as f64).abs() <= 1e-12 * (b - a));
                if n_h % m != 0 || !uniform_geo {
                    return Err(ProblemError::NotNested { n_h, geometry: m });
                }
                let step = n_h / m;
                let breakpoints = crate::splines::uniform_breakpoints(a, b, n_h);
                let mult: Vec<usize> = (0..=n_h).map(|k| if k % step == 0 && degree >= 2 { 2 } else { 1 }).collect();
                Ok(BasisSpec::cyclic_with_multiplicities(degree, &breakpoints, &mult)?)
            }
        }
    }

    /// Orientation sign of a closed curve (+1 counterclockwise).
    pub fn orientation(&self) -> Result<f64, ProblemError> {
        Ok(if self.curve.signed_area()? >= 0.0 { 1.0 } else { -1.0 })
    }

    /// Known boundary unknown at parameter `s`.
    pub fn exact_density(&self, s: f64) -> Result<f64, ProblemError> {
        let p = self.curve.point(s)?;
        Ok(match self.kind {
            ProblemKind::OpenArc => open_arc_density(&p),
            ProblemKind::ClosedDirect => self.orientation()? * (p.d1[0] - p.d1[1]) / p.speed,
        })
    }

    /// Exact solution `u` in the plane (closed problem only: the linear datum).
    pub fn exact_u(&self, x: [f64; 2]) -> f64 {
        -(x[0] + x[1])
    }

    /// Dirichlet datum at a curve point. For the open arc it is the
    /// single-layer potential of the manufactured density, computed by
    /// adaptive integration with the logarithm subtracted analytically.
    pub fn dirichlet(&self, p: &CurvePoint) -> Result<f64, ProblemError> {
        match self.kind {
            ProblemKind::ClosedDirect => Ok(self.exact_u(p.x)),
            ProblemKind::OpenArc => self.open_arc_dirichlet(p.s),
        }
    }

    fn open_arc_dirichlet(&self, s: f64) -> Result<f64, ProblemError> {
        let curve = &self.curve;
        let (a, b) = curve.domain();
        let weight = |t: f64| -> f64 {
            let q = curve.point(t).expect("parameter inside the domain");
            open_arc_density(&q) * q.speed
        };
        let smooth = |t: f64| curve.kernel_k1(s, t).expect("regular curve") * weight(t);
        let tol = 1e-14;
        let mut total = 0.0;
        if s > a {
            total += integrate_adaptive(smooth, a, s, tol, tol)?;
        }
        if s < b {
            total += integrate_adaptive(smooth, s, b, tol, tol)?;
        }
        total += integrate_log_singular(weight, a, b, s, tol)?;
        Ok(-total / (2.0 * PI))
    }
}

/// Manufactured density `φ(x) = √(1 + 4 x1²)` of the open-arc problem.
pub fn open_arc_density(p: &CurvePoint) -> f64 {
    (1.0 + 4.0 * p.x[0] * p.x[0]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parabola_registry() {
        let p = Problem::by_name("parabola").unwrap();
        assert_eq!(p.curve.control_points(), &[[-1.0, 0.0], [0.0, 2.0], [1.0, 0.0]]);
        assert_eq!(p.elements_for_h(0.2).unwrap(), 10);
        assert!(p.elements_for_h(0.3).is_err());
        assert!(matches!(Problem::by_name("s-shape"), Err(ProblemError::UnknownProblem(_))));
        // density equals the parametric speed on the parabola
        for &s in &[-1.0, 0.2, 0.9] {
            assert_abs_diff_eq!(p.exact_density(s).unwrap(), p.curve.speed(s).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn parabola_datum_matches_alternate_quadrature() {
        let p = Problem::by_name("parabola").unwrap();
        let s = 0.0;
        let u = p.dirichlet(&p.curve.point(s).unwrap()).unwrap();
        // second route: kernel ln|f(s) - f(t)| integrated directly, split at s
        let f = |t: f64| p.curve.log_distance(s, t).unwrap() * (1.0 + 4.0 * t * t);
        let direct = integrate_adaptive(f, -1.0, 0.0, 1e-14, 1e-14).unwrap()
            + integrate_adaptive(f, 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert_abs_diff_eq!(u, -direct / (2.0 * PI), epsilon = 1e-11);
    }

    #[test]
    fn closed_curve_is_smooth_and_closed() {
        let p = Problem::by_name("closed-smooth").unwrap();
        let c = &p.curve;
        for k in 0..3 {
            let u = c.eval(-1.0, k).unwrap();
            let v = c.eval(1.0, k).unwrap();
            assert_abs_diff_eq!(u[0], v[0], epsilon = 1e-12);
            assert_abs_diff_eq!(u[1], v[1], epsilon = 1e-12);
        }
        assert!(c.check_c2().is_ok());
        assert_eq!(p.orientation().unwrap(), 1.0);
        let basis = p.discretization(3, 24).unwrap();
        assert_eq!(basis.dim(), 24 + 12);
        assert!(p.discretization(3, 30).is_err());
    }

    #[test]
    fn closed_density_is_outward_flux() {
        let p = Problem::by_name("closed-smooth").unwrap();
        // ∫ q dγ = 0 for a harmonic u
        let rule = crate::quadrature::gauss_legendre(8);
        let basis = p.curve.basis();
        let mut total = 0.0;
        for e in 0..basis.num_elements() {
            let (lo, hi) = basis.element(e);
            for (s, w) in rule.mapped(lo, hi) {
                total += w * p.exact_density(s).unwrap() * p.curve.speed(s).unwrap();
            }
        }
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-12);
    }
}
