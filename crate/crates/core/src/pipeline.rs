//! One solver run: discretize, build rules, assemble, solve, measure errors.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_b1, assemble_b2, assemble_baseline, assemble_weighted_matrix, baseline_b1, gauss_points_on_elements,
    kbar_layer, node_points, AssembledSystem, QuadratureSetup, Strategy,
};
use crate::problems::{Problem, ProblemKind};
use crate::solver::{condition_number, error_metrics, solve, BoundaryQuadrature, BoundarySolution};
use crate::Error;

fn default_ng() -> usize {
    16
}
fn default_b2_gauss() -> usize {
    16
}
fn default_repeats() -> usize {
    1
}
fn default_nref() -> usize {
    1
}

/// Parameters of one run. Fully deterministic; `threads = 0` uses the global
/// thread pool, any other value runs the case on a dedicated pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub degree: usize,
    /// Number of elements of the discretization.
    pub n_h: usize,
    #[serde(default = "default_nref")]
    pub nref: usize,
    pub strategy: Strategy,
    /// Gauss points per element for the element-by-element strategy.
    #[serde(default = "default_ng")]
    pub ng: usize,
    /// Gauss points per refined element for the double-layer term.
    #[serde(default = "default_b2_gauss")]
    pub b2_gauss: usize,
    /// Assembly is repeated and the fastest time kept.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub threads: usize,
    /// Average the weighted-quadrature matrix with its transpose before
    /// solving. Off by default: the averaged matrix no longer matches the
    /// right-hand side row by row and the solution loses accuracy.
    #[serde(default)]
    pub symmetrize: bool,
}

impl RunConfig {
    pub fn new(problem: &str, degree: usize, n_h: usize, nref: usize, strategy: Strategy) -> Self {
        Self {
            problem: problem.into(),
            degree,
            n_h,
            nref,
            strategy,
            ng: default_ng(),
            b2_gauss: default_b2_gauss(),
            repeats: default_repeats(),
            threads: 0,
            symmetrize: false,
        }
    }
}

/// One report row; carries the full configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub strategy: String,
    pub d: usize,
    pub h: f64,
    pub n_h: usize,
    pub n_ref: usize,
    pub n_g: usize,
    pub b2_gauss: usize,
    pub repeats: usize,
    pub threads: usize,
    pub symmetrized: bool,
    pub dof: usize,
    pub n_quad: usize,
    pub kernel_evals: u64,
    pub near_kernel_evals: u64,
    pub rules_seconds: f64,
    pub assembly_seconds: f64,
    pub rhs_seconds: f64,
    pub cond: f64,
    pub e_r: f64,
    pub e_m: f64,
    pub symmetry_defect: f64,
    pub solve_residual: f64,
    /// Largest error of the representation formula at the interior test
    /// points (closed problems only; empty otherwise, and on meshes too
    /// coarse for the points to be evaluated).
    pub interior_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub row: RunRow,
    pub system: AssembledSystem,
    pub solution: BoundarySolution,
}

/// Interior test points of the closed-curve problem.
pub const INTERIOR_POINTS: [[f64; 2]; 5] = [[0.0, 0.0], [0.1, 0.05], [-0.1, -0.05], [0.05, -0.1], [-0.08, 0.1]];

fn timed<T, F: FnMut() -> Result<T, Error>>(repeats: usize, mut f: F) -> Result<(T, f64), Error> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(v);
    }
    Ok((out.expect("at least one repetition"), best))
}

pub fn run_case(problem: &Problem, cfg: &RunConfig) -> Result<RunOutput, Error> {
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| run_inner(problem, cfg))
    } else {
        run_inner(problem, cfg)
    }
}

fn run_inner(problem: &Problem, cfg: &RunConfig) -> Result<RunOutput, Error> {
    if cfg.nref == 0 || cfg.n_h == 0 {
        return Err(Error::Config("n_h and nref must be positive".into()));
    }
    let basis = problem.discretization(cfg.degree, cfg.n_h)?;
    let curve = &problem.curve;
    let closed = problem.kind == ProblemKind::ClosedDirect;
    let orientation = if closed { problem.orientation()? } else { 1.0 };

    let (system, n_quad) = match cfg.strategy {
        Strategy::Weighted => {
            let setup = QuadratureSetup::build(&basis, cfg.nref)?;
            let ((matrix, defect, evals), seconds) =
                timed(cfg.repeats, || Ok(assemble_weighted_matrix(curve, &setup, cfg.symmetrize)?))?;
            let start = Instant::now();
            let points = node_points(curve, &setup.nodes)?;
            let u_nodes: Vec<f64> = points.par_iter().map(|p| problem.dirichlet(p)).collect::<Result<_, _>>()?;
            let b1 = assemble_b1(&setup, &points, &u_nodes)?;
            let rhs = if closed {
                let u = |p: &crate::geometry::CurvePoint| problem.exact_u(p.x);
                let b2 = assemble_b2(curve, &setup, &points, cfg.b2_gauss, u)?;
                b1 * 0.5 + b2 * (orientation / (2.0 * PI))
            } else {
                b1
            };
            let system = AssembledSystem {
                matrix,
                rhs,
                strategy: Strategy::Weighted,
                kernel_evals: evals,
                near_kernel_evals: 0,
                rules_seconds: setup.rules_seconds,
                assembly_seconds: seconds,
                rhs_seconds: start.elapsed().as_secs_f64(),
                symmetry_defect: defect,
                symmetrized: cfg.symmetrize,
            };
            (system, setup.num_nodes())
        }
        Strategy::Element => {
            let (base, seconds) = timed(cfg.repeats, || Ok(assemble_baseline(curve, &basis, cfg.ng)?))?;
            let start = Instant::now();
            let rhs = if closed {
                let fine = crate::splines::RefinedBasis::new(&basis, cfg.nref)?.fine;
                let inner = gauss_points_on_elements(curve, &fine, cfg.b2_gauss)?;
                let values: Vec<f64> = inner.iter().map(|(q, w)| w * problem.exact_u(q.x)).collect();
                baseline_b1(curve, &basis, cfg.ng, |p| {
                    let k = kbar_layer(curve, &inner, &values, p).expect("curve checked at construction");
                    0.5 * problem.exact_u(p.x) + orientation / (2.0 * PI) * k
                })?
            } else {
                baseline_b1(curve, &basis, cfg.ng, |p| problem.dirichlet(p).expect("regular datum"))?
            };
            let system = AssembledSystem {
                matrix: base.matrix,
                rhs,
                strategy: Strategy::Element,
                kernel_evals: base.far_kernel_evals,
                near_kernel_evals: base.near_kernel_evals,
                rules_seconds: 0.0,
                assembly_seconds: seconds,
                rhs_seconds: start.elapsed().as_secs_f64(),
                symmetry_defect: base.symmetry_defect,
                symmetrized: true,
            };
            (system, 0)
        }
    };

    let coeffs = solve(&system.matrix, &system.rhs)?;
    let solve_residual = relative_residual(&system, &coeffs);
    let solution = BoundarySolution { coeffs, basis: basis.clone() };
    let cond = condition_number(&system.matrix);
    let exact = |s: f64| problem.exact_density(s).expect("parameter inside the domain");
    let report = error_metrics(&solution, exact)?;

    let interior_error = if closed {
        let quad = BoundaryQuadrature::new(curve, &basis, 16)?;
        let mut worst = Some(0.0f64);
        for x in INTERIOR_POINTS {
            let u = quad
                .single_layer(x, &solution)
                .and_then(|sl| Ok(sl + quad.double_layer(x, orientation, |p| problem.exact_u(p.x))?));
            match u {
                Ok(u) => worst = worst.map(|w| w.max((u - problem.exact_u(x)).abs())),
                Err(e @ crate::solver::SolverError::TooClose { .. }) => {
                    log::warn!("interior check skipped: {e}");
                    worst = None;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        worst
    } else {
        None
    };

    let row = RunRow {
        problem: problem.name.clone(),
        strategy: system.strategy.as_str().into(),
        d: cfg.degree,
        h: basis.length() / cfg.n_h as f64,
        n_h: cfg.n_h,
        n_ref: cfg.nref,
        n_g: cfg.ng,
        b2_gauss: cfg.b2_gauss,
        repeats: cfg.repeats,
        threads: cfg.threads,
        symmetrized: system.symmetrized,
        dof: basis.dim(),
        n_quad,
        kernel_evals: system.kernel_evals,
        near_kernel_evals: system.near_kernel_evals,
        rules_seconds: system.rules_seconds,
        assembly_seconds: system.assembly_seconds,
        rhs_seconds: system.rhs_seconds,
        cond,
        e_r: report.e_rel,
        e_m: report.e_max,
        symmetry_defect: system.symmetry_defect,
        solve_residual,
        interior_error,
    };
    Ok(RunOutput { row, system, solution })
}

fn relative_residual(system: &AssembledSystem, x: &DVector<f64>) -> f64 {
    let r = (&system.matrix * x - &system.rhs).norm();
    let b = system.rhs.norm();
    if b > 0.0 {
        r / b
    } else {
        r
    }
}
