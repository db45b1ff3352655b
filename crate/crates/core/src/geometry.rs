//! Parametric boundary curves `f(s) = Σ Q_i B_i(s)` and the boundary kernels.
//!
//! The log kernel is split as `ln|f(s) - f(t)| = K1(s,t) + K2(s,t)` with
//! `K2 = ln|s - t|` and the smooth remainder `K1 = ½ ln R`,
//! `R(s,t) = |f(s) - f(t)|² / (s - t)²`. On closed curves `K2` is the periodic
//! `ln|(L/π) sin(π (t-s) / L)|` so that `K1` stays smooth and periodic where
//! the curve closes; the parameter difference is then taken modulo the period.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::gauss_legendre;
use crate::splines::{BasisSpec, SplineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve has {got} control points but its basis has dimension {expected}")]
    ControlPointCount { expected: usize, got: usize },
    #[error("parametrization is not regular at s = {s} (speed {speed:e})")]
    Irregular { s: f64, speed: f64 },
    #[error("curve points f({s}) and f({t}) coincide: degenerate or self-intersecting curve")]
    Degenerate { s: f64, t: f64 },
    #[error("normal-derivative kernel needs a C2 curve: {0}")]
    NotSmooth(String),
    #[error("invalid curve description: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Position, first and second derivative of the curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub s: f64,
    pub x: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
    /// Parametric speed `|f'(s)|`.
    pub speed: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    basis: BasisSpec,
    control: Vec<[f64; 2]>,
}

impl BoundaryCurve {
    pub fn new(basis: BasisSpec, control: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        if control.len() != basis.dim() {
            return Err(GeometryError::ControlPointCount { expected: basis.dim(), got: control.len() });
        }
        let curve = Self { basis, control };
        let (a, b) = curve.domain();
        let scale = curve.control.iter().map(|q| q[0].abs().max(q[1].abs())).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for k in 0..=1000 {
            let s = a + (b - a) * k as f64 / 1000.0;
            let speed = curve.speed(s)?;
            if !(speed > 1e-12 * scale) {
                return Err(GeometryError::Irregular { s, speed });
            }
        }
        Ok(curve)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn control_points(&self) -> &[[f64; 2]] {
        &self.control
    }

    pub fn is_closed(&self) -> bool {
        self.basis.is_closed()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.basis.domain()
    }

    pub fn period(&self) -> Option<f64> {
        self.is_closed().then(|| self.basis.length())
    }

    /// Below this parameter distance the diagonal limits are used.
    pub fn diag_eps(&self) -> f64 {
        1e-7 * self.basis.length()
    }

    /// Point (`deriv_order = 0`) or derivative of `f` at `s`.
    pub fn eval(&self, s: f64, deriv_order: usize) -> Result<[f64; 2], GeometryError> {
        let mut out = [0.0; 2];
        for (i, v) in self.basis.eval(s, deriv_order)? {
            out[0] += v * self.control[i][0];
            out[1] += v * self.control[i][1];
        }
        Ok(out)
    }

    pub fn point(&self, s: f64) -> Result<CurvePoint, GeometryError> {
        let (idx, ders) = self.basis.eval_derivatives(s, 2)?;
        let mut p = [[0.0; 2]; 3];
        for (k, row) in ders.iter().enumerate() {
            for (r, &v) in row.iter().enumerate() {
                p[k][0] += v * self.control[idx[r]][0];
                p[k][1] += v * self.control[idx[r]][1];
            }
        }
        Ok(CurvePoint { s, x: p[0], d1: p[1], d2: p[2], speed: p[1][0].hypot(p[1][1]) })
    }

    /// Parametric speed `J(s) = |f'(s)|`.
    pub fn speed(&self, s: f64) -> Result<f64, GeometryError> {
        let d = self.eval(s, 1)?;
        Ok(d[0].hypot(d[1]))
    }

    /// Parameter difference `t - s`, reduced to the nearest periodic image on
    /// closed curves.
    pub fn param_diff(&self, s: f64, t: f64) -> f64 {
        wrap_diff(t - s, self.period())
    }

    /// `R(s,t) = |f(s) - f(t)|² / (s - t)²` with the diagonal limit `J²`.
    pub fn kernel_r(&self, s: f64, t: f64) -> Result<f64, GeometryError> {
        let delta = self.param_diff(s, t);
        if delta.abs() <= self.diag_eps() {
            let mid = self.wrap_param(s + 0.5 * delta);
            let j = self.speed(mid)?;
            return Ok(j * j);
        }
        let (p, q) = (self.eval(s, 0)?, self.eval(t, 0)?);
        let dist2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
        if dist2 == 0.0 {
            return Err(GeometryError::Degenerate { s, t });
        }
        Ok(dist2 / (delta * delta))
    }

    pub fn kernel_k1(&self, s: f64, t: f64) -> Result<f64, GeometryError> {
        let r = self.kernel_r(s, t)?;
        Ok(0.5 * r.ln() - self.periodic_correction(s, t))
    }

    /// `ln|s - t|`; on closed curves the periodic
    /// `ln|(L/π) sin(π (t - s) / L)|`, which has the same singularity.
    pub fn kernel_k2(&self, s: f64, t: f64) -> f64 {
        match self.period() {
            None => (t - s).abs().ln(),
            Some(l) => periodic_log(t - s, l),
        }
    }

    /// `ln|f(s) - f(t)|` evaluated directly.
    pub fn log_distance(&self, s: f64, t: f64) -> Result<f64, GeometryError> {
        let (p, q) = (self.eval(s, 0)?, self.eval(t, 0)?);
        Ok(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt().ln())
    }

    /// Normal-derivative kernel
    /// `[(f2(t)-f2(s)) f1'(t) - (f1(t)-f1(s)) f2'(t)] / |f(s)-f(t)|²`,
    /// i.e. the derivative of `ln|f(s) - y|` along the left normal
    /// `(-f2', f1')` at `y = f(t)`, times `J(t)`.
    pub fn kernel_kbar(&self, s: f64, t: f64) -> Result<f64, GeometryError> {
        self.check_c2()?;
        let delta = self.param_diff(s, t);
        if delta.abs() <= self.diag_eps() {
            return Ok(kbar_diagonal(&self.point(s)?));
        }
        kbar_points(&self.point(s)?, &self.point(t)?)
    }

    fn wrap_param(&self, s: f64) -> f64 {
        let (a, b) = self.domain();
        match self.period() {
            Some(l) if s < a => s + l,
            Some(l) if s > b => s - l,
            _ => s.clamp(a, b),
        }
    }

    /// `K2 - ln|d|` for the nearest periodic image `d` of `t - s`.
    fn periodic_correction(&self, s: f64, t: f64) -> f64 {
        match self.period() {
            None => 0.0,
            Some(l) => periodic_correction(t - s, l),
        }
    }

    /// `K̄` is only used on curves that are at least C².
    pub fn check_c2(&self) -> Result<(), GeometryError> {
        let d = self.basis.degree();
        if d < 2 {
            return Err(GeometryError::NotSmooth(format!("degree {d} curve")));
        }
        let mults = self.basis.multiplicities();
        let inner: Box<dyn Iterator<Item = &usize>> =
            if self.is_closed() { Box::new(mults.iter()) } else { Box::new(mults[1..mults.len() - 1].iter()) };
        for &m in inner {
            if d < m + 2 {
                return Err(GeometryError::NotSmooth(format!("knot multiplicity {m} at degree {d}")));
            }
        }
        Ok(())
    }

    /// Signed enclosed area `½ ∮ (x dy - y dx)`; positive for counterclockwise
    /// closed curves.
    pub fn signed_area(&self) -> Result<f64, GeometryError> {
        let rule = gauss_legendre(self.basis.degree() * 2 + 2);
        let mut area = 0.0;
        for e in 0..self.basis.num_elements() {
            let (lo, hi) = self.basis.element(e);
            for (s, w) in rule.mapped(lo, hi) {
                let p = self.point(s)?;
                area += 0.5 * w * (p.x[0] * p.d1[1] - p.x[1] * p.d1[0]);
            }
        }
        Ok(area)
    }
}

/// Reduces a parameter difference to the nearest periodic image.
pub fn wrap_diff(d: f64, period: Option<f64>) -> f64 {
    match period {
        None => d,
        Some(l) => d - l * (d / l).round(),
    }
}

/// `ln|(L/π) sin(π d / L)|`, the periodic log kernel of closed curves.
pub fn periodic_log(d: f64, l: f64) -> f64 {
    let w = wrap_diff(d, Some(l));
    w.abs().ln() + periodic_correction(w, l)
}

/// `ln|(L/π) sin(π d / L)| - ln|w|` with `w` the nearest image of `d`:
/// `ln sinc(π w / L)`, smooth and bounded.
pub fn periodic_correction(d: f64, l: f64) -> f64 {
    let x = std::f64::consts::PI * wrap_diff(d, Some(l)) / l;
    if x == 0.0 {
        0.0
    } else {
        (x.sin() / x).ln()
    }
}

/// `K1` from precomputed curve points. `period` is `Some(L)` on closed curves.
pub fn k1_points(p: &CurvePoint, q: &CurvePoint, period: Option<f64>, eps: f64) -> Result<f64, GeometryError> {
    let delta = wrap_diff(q.s - p.s, period);
    let corr = period.map_or(0.0, |l| periodic_correction(q.s - p.s, l));
    if delta.abs() <= eps {
        return Ok(0.5 * (0.5 * (p.speed * p.speed + q.speed * q.speed)).ln() - corr);
    }
    let dist2 = (p.x[0] - q.x[0]).powi(2) + (p.x[1] - q.x[1]).powi(2);
    if dist2 == 0.0 {
        return Err(GeometryError::Degenerate { s: p.s, t: q.s });
    }
    Ok(0.5 * (dist2 / (delta * delta)).ln() - corr)
}

/// Off-diagonal `K̄(s,t)` from precomputed points (`p` at `s`, `q` at `t`).
pub fn kbar_points(p: &CurvePoint, q: &CurvePoint) -> Result<f64, GeometryError> {
    let dx = q.x[0] - p.x[0];
    let dy = q.x[1] - p.x[1];
    let dist2 = dx * dx + dy * dy;
    if dist2 == 0.0 {
        return Err(GeometryError::Degenerate { s: p.s, t: q.s });
    }
    Ok((dy * q.d1[0] - dx * q.d1[1]) / dist2)
}

/// Diagonal limit `½ (f2' f1'' - f1' f2'') / J²`.
pub fn kbar_diagonal(p: &CurvePoint) -> f64 {
    0.5 * (p.d1[1] * p.d2[0] - p.d1[0] * p.d2[1]) / (p.speed * p.speed)
}

/// Curve description read from JSON: degree, either the full knot vector or
/// breakpoints (with optional multiplicities), control points and the closed
/// flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<usize>>,
    pub control_points: Vec<[f64; 2]>,
    #[serde(default)]
    pub closed: bool,
}

impl CurveSpec {
    pub fn build(&self) -> Result<BoundaryCurve, GeometryError> {
        let d = self.degree;
        let basis = match (&self.knots, &self.breakpoints, self.closed) {
            (Some(k), None, false) => BasisSpec::from_knots(d, k)?,
            (None, Some(bp), false) => match &self.multiplicities {
                Some(m) => BasisSpec::open(d, bp, m)?,
                None => BasisSpec::clamped(d, bp)?,
            },
            (None, Some(bp), true) => match &self.multiplicities {
                Some(m) => BasisSpec::cyclic_with_multiplicities(d, bp, m)?,
                None => BasisSpec::cyclic(d, bp)?,
            },
            (Some(_), _, true) => {
                return Err(GeometryError::InvalidSpec("closed curves are given by breakpoints".into()))
            }
            _ => return Err(GeometryError::InvalidSpec("give exactly one of knots or breakpoints".into())),
        };
        BoundaryCurve::new(basis, self.control_points.clone())
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| GeometryError::InvalidSpec(e.to_string()))
    }
}
