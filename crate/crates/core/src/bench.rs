//! Convergence sweeps and the log-weighted quadrature benchmark, with CSV and
//! SVG reports.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{QuadratureSetup, Strategy};
use crate::pipeline::{run_case, RunConfig, RunRow};
use crate::problems::Problem;
use crate::quadrature::{log_moments, monomial_log_moment, quad_error_err};
use crate::splines::BasisSpec;
use crate::Error;

/// A sweep over degrees and mesh sizes for one problem and strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub problem: String,
    pub degrees: Vec<usize>,
    /// Mesh sizes in parameter units; each must split the interval evenly.
    pub h: Vec<f64>,
    pub nref: usize,
    pub strategy: Strategy,
    pub ng: usize,
    pub b2_gauss: usize,
    pub repeats: usize,
    pub threads: usize,
    pub symmetrize: bool,
}

impl SweepConfig {
    pub fn new(problem: &str, degrees: Vec<usize>, h: Vec<f64>, nref: usize, strategy: Strategy) -> Self {
        let base = RunConfig::new(problem, 2, 1, nref, strategy);
        Self {
            problem: problem.into(),
            degrees,
            h,
            nref,
            strategy,
            ng: base.ng,
            b2_gauss: base.b2_gauss,
            repeats: base.repeats,
            threads: base.threads,
            symmetrize: base.symmetrize,
        }
    }

    /// One run configuration per `(d, h)` cell, degrees outermost.
    pub fn cells(&self, problem: &Problem) -> Result<Vec<RunConfig>, Error> {
        let mut out = Vec::with_capacity(self.degrees.len() * self.h.len());
        for &d in &self.degrees {
            for &h in &self.h {
                let n_h = problem.elements_for_h(h)?;
                let mut cfg = RunConfig::new(&self.problem, d, n_h, self.nref, self.strategy);
                cfg.ng = self.ng;
                cfg.b2_gauss = self.b2_gauss;
                cfg.repeats = self.repeats;
                cfg.threads = self.threads;
                cfg.symmetrize = self.symmetrize;
                out.push(cfg);
            }
        }
        Ok(out)
    }
}

/// Runs every cell of the sweep in order. Cells run one after another so
/// that their timings do not compete for cores.
pub fn run_convergence(cfg: &SweepConfig) -> Result<Vec<RunRow>, Error> {
    let problem = Problem::by_name(&cfg.problem)?;
    run_convergence_on(&problem, cfg)
}

/// As [`run_convergence`], on an explicit problem (e.g. with a user curve).
pub fn run_convergence_on(problem: &Problem, cfg: &SweepConfig) -> Result<Vec<RunRow>, Error> {
    let mut rows = Vec::new();
    for cell in cfg.cells(problem)? {
        log::info!("running {} d={} n_h={} ({})", cell.problem, cell.degree, cell.n_h, cell.strategy.as_str());
        rows.push(run_case(problem, &cell)?.row);
    }
    Ok(rows)
}

/// Least-squares slope of `log err` against `log h`.
pub fn fitted_order(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() != err.len() || h.len() < 2 || err.iter().chain(h).any(|v| !(*v > 0.0)) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Test integrands of the quadrature benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFamily {
    /// The `(d+1)`-th B-spline (0-based) of degree `d+1` on the same mesh.
    BSpline,
    /// `t^p` with `p` above the exactness degree.
    Monomial(u32),
    /// `√(1 - t²) / (t² + 25)` on `[-1, 1]`.
    SqrtRational,
}

impl TestFamily {
    pub fn label(&self) -> String {
        match self {
            TestFamily::BSpline => "bspline".into(),
            TestFamily::Monomial(p) => format!("t^{p}"),
            TestFamily::SqrtRational => "sqrt-rational".into(),
        }
    }
}

/// `∫_{-1}^{1} ln|t - s| √(1 - t²) / (t² + 25) dt` in closed form.
pub fn sqrt_rational_log_integral(s: f64) -> f64 {
    let r26 = 26.0f64.sqrt();
    PI * 2.0f64.ln() + PI * r26 / 5.0 * ((25.0 + s * s).sqrt() / (5.0 + r26)).ln()
}

pub fn sqrt_rational(t: f64) -> f64 {
    (1.0 - t * t).max(0.0).sqrt() / (t * t + 25.0)
}

/// One cell of the quadrature benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadBenchRow {
    pub d: usize,
    pub n_h: usize,
    pub n_ref: usize,
    pub n_quad: usize,
    pub family: String,
    /// `Σ (Q - I)² / Σ Q²` over all nodes.
    pub err: f64,
    /// Its square root, the relative ℓ² error.
    pub err_rel: f64,
    /// Largest exactness residual of the regular rules.
    pub regular_residual: f64,
    /// Largest exactness residual of the singular rules.
    pub singular_residual: f64,
    /// Largest error of the singular rules on `t^d`, relative to the largest
    /// exact value over all abscissae (the exact value vanishes at some of
    /// them for odd `d`).
    pub monomial_exactness: f64,
}

/// Singular-rule benchmark on `[-1, 1]`: clamped uniform degree-`d` basis with
/// `n_h` elements, rules exact on its `nref`-fold refinement, abscissae at
/// every node.
pub fn quad_bench_cell(d: usize, n_h: usize, nref: usize) -> Result<Vec<QuadBenchRow>, Error> {
    let basis = BasisSpec::clamped_uniform(d, -1.0, 1.0, n_h)?;
    let setup = QuadratureSetup::build(&basis, nref)?;
    let nodes = &setup.nodes.nodes;
    let apply = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        (0..nodes.len()).map(|nu| setup.singular.apply(nu, &values)).collect()
    };

    let mono_q = apply(&|t: f64| t.powi(d as i32));
    let mono_exact: Vec<f64> = nodes.iter().map(|&s| monomial_log_moment(d, -1.0, 1.0, s)).collect();
    let scale = mono_exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let monomial_exactness = mono_q.iter().zip(&mono_exact).map(|(q, e)| (q - e).abs()).fold(0.0, f64::max) / scale;

    let high = BasisSpec::clamped_uniform(d + 1, -1.0, 1.0, n_h)?;
    let families = [
        TestFamily::BSpline,
        TestFamily::Monomial(d as u32 + 1),
        TestFamily::Monomial(d as u32 + 2),
        TestFamily::SqrtRational,
    ];
    let mut rows = Vec::with_capacity(families.len());
    for family in families {
        let (approx, exact): (Vec<f64>, Vec<f64>) = match family {
            TestFamily::BSpline => {
                let j = d + 1;
                let f = |t: f64| high.eval_function(j, t).expect("node inside the domain");
                (apply(&f), nodes.iter().map(|&s| log_moments(&high, s)[j]).collect())
            }
            TestFamily::Monomial(p) => (
                apply(&|t: f64| t.powi(p as i32)),
                nodes.iter().map(|&s| monomial_log_moment(p as usize, -1.0, 1.0, s)).collect(),
            ),
            TestFamily::SqrtRational => {
                (apply(&sqrt_rational), nodes.iter().map(|&s| sqrt_rational_log_integral(s)).collect())
            }
        };
        let err = quad_error_err(&approx, &exact)?;
        rows.push(QuadBenchRow {
            d,
            n_h,
            n_ref: nref,
            n_quad: nodes.len(),
            family: family.label(),
            err,
            err_rel: err.sqrt(),
            regular_residual: setup.regular.max_residual,
            singular_residual: setup.singular.max_residual,
            monomial_exactness,
        });
    }
    Ok(rows)
}

/// Benchmark over the full `(d, N_h)` grid, cells in parallel.
pub fn run_quad_bench(degrees: &[usize], n_hs: &[usize], nref: usize) -> Result<Vec<QuadBenchRow>, Error> {
    let cells: Vec<(usize, usize)> = degrees.iter().flat_map(|&d| n_hs.iter().map(move |&n| (d, n))).collect();
    let nested: Vec<Vec<QuadBenchRow>> =
        cells.par_iter().map(|&(d, n)| quad_bench_cell(d, n, nref)).collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// One weight of one rule, for `--dump-rules`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleEntry {
    /// `regular` or `singular`.
    pub kind: String,
    /// Basis function index (regular) or abscissa index (singular).
    pub rule: usize,
    pub node: usize,
    pub eta: f64,
    pub weight: f64,
}

pub fn rule_entries(setup: &QuadratureSetup) -> Vec<RuleEntry> {
    let eta = &setup.nodes.nodes;
    let mut out = Vec::new();
    for (i, rule) in setup.regular.rules.iter().enumerate() {
        for (&n, &w) in rule.nodes.iter().zip(&rule.weights) {
            out.push(RuleEntry { kind: "regular".into(), rule: i, node: n, eta: eta[n], weight: w });
        }
    }
    for (nu, weights) in setup.singular.weights.iter().enumerate() {
        for (n, &w) in weights.iter().enumerate() {
            out.push(RuleEntry { kind: "singular".into(), rule: nu, node: n, eta: eta[n], weight: w });
        }
    }
    out
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Log-log plot of `E_R` against DoF (left) and against assembly time
/// (right), one polyline per strategy and degree.
pub fn convergence_svg(rows: &[RunRow]) -> String {
    let mut series: Vec<(String, Vec<&RunRow>)> = Vec::new();
    for row in rows {
        let key = format!("{} d={}", row.strategy, row.d);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(row),
            None => series.push((key, vec![row])),
        }
    }
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let (w, h, pad) = (420.0, 320.0, 50.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">"#,
        2.0 * w,
        h
    );
    let panels: [(&str, fn(&RunRow) -> f64); 2] =
        [("DoF", |r| r.dof as f64), ("assembly time (s)", |r| r.assembly_seconds)];
    for (p, (xlabel, xval)) in panels.iter().enumerate() {
        let ox = p as f64 * w;
        let pts: Vec<(f64, f64)> =
            rows.iter().map(|r| (xval(r), r.e_r)).filter(|(x, y)| *x > 0.0 && *y > 0.0).collect();
        if pts.is_empty() {
            continue;
        }
        let lx: Vec<f64> = pts.iter().map(|v| v.0.log10()).collect();
        let ly: Vec<f64> = pts.iter().map(|v| v.1.log10()).collect();
        let (x0, x1) = bounds(&lx);
        let (y0, y1) = bounds(&ly);
        let map = |x: f64, y: f64| {
            (
                ox + pad + (x.log10() - x0) / (x1 - x0) * (w - 2.0 * pad),
                h - pad - (y.log10() - y0) / (y1 - y0) * (h - 2.0 * pad),
            )
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            ox + pad,
            w - 2.0 * pad,
            h - 2.0 * pad
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, ox + w / 2.0, h - 15.0);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" transform="rotate(-90 {} {})" text-anchor="middle">E_R</text>"#,
            ox + 15.0,
            h / 2.0,
            ox + 15.0,
            h / 2.0
        );
        for (k, (name, members)) in series.iter().enumerate() {
            let color = colors[k % colors.len()];
            let coords: Vec<String> = members
                .iter()
                .filter(|r| xval(r) > 0.0 && r.e_r > 0.0)
                .map(|r| {
                    let (x, y) = map(xval(r), r.e_r);
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, coords.join(" "));
            for c in &coords {
                let (x, y) = c.split_once(',').expect("formatted pair");
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
            }
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
                ox + pad + 8.0,
                pad + 14.0 * (k as f64 + 1.0)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo))
    }
}
