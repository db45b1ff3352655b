mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use splinebem::assembly::Strategy;
use splinebem::pipeline::{run_case, RunConfig, INTERIOR_POINTS};
use splinebem::problems::{open_arc_density, Problem};
use splinebem::quadrature::integrate_adaptive;
use splinebem::solver::{condition_number, solve, BoundaryQuadrature, BoundarySolution, SolverError};

#[test]
fn random_spd_recovery() {
    // deterministic pseudo-random entries
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let m = DMatrix::from_fn(20, 20, |_, _| next());
    let a = &m * m.transpose() + DMatrix::identity(20, 20);
    let x = DVector::from_fn(20, |_, _| next());
    let got = solve(&a, &(&a * &x)).unwrap();
    assert!((got - x).amax() <= 1e-10);
    assert!(condition_number(&a) >= 1.0);
}

#[test]
fn singular_matrix_reported() {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    assert!(matches!(solve(&a, &DVector::from_vec(vec![1.0, 1.0])), Err(SolverError::Singular)));
    assert!(condition_number(&a).is_infinite() || condition_number(&a) > 1e15);
}

fn closed_solution() -> (Problem, BoundarySolution) {
    let p = Problem::by_name("closed-smooth").unwrap();
    let out = run_case(&p, &RunConfig::new("closed-smooth", 3, 48, 2, Strategy::Weighted)).unwrap();
    (p, out.solution)
}

fn representation(p: &Problem, quad: &BoundaryQuadrature, sol: &BoundarySolution, x: [f64; 2]) -> f64 {
    let orientation = p.orientation().unwrap();
    quad.single_layer(x, sol).unwrap() + quad.double_layer(x, orientation, |q| p.exact_u(q.x)).unwrap()
}

#[test]
fn interior_values_are_harmonic() {
    let (p, sol) = closed_solution();
    let quad = BoundaryQuadrature::new(&p.curve, &sol.basis, 16).unwrap();
    let h = 1e-3;
    for k in 0..10 {
        let th = 2.0 * PI * k as f64 / 10.0;
        let r = 0.05 + 0.015 * k as f64;
        let x = [r * th.cos(), r * th.sin()];
        let u = |dx: f64, dy: f64| representation(&p, &quad, &sol, [x[0] + dx, x[1] + dy]);
        let lap = (u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h) - 4.0 * u(0.0, 0.0)) / (h * h);
        assert!(lap.abs() <= 1e-4, "x={x:?}: {lap:e}");
    }
}

#[test]
fn interior_points_reproduce_linear_datum() {
    let (p, sol) = closed_solution();
    let quad = BoundaryQuadrature::new(&p.curve, &sol.basis, 16).unwrap();
    for x in INTERIOR_POINTS {
        let u = representation(&p, &quad, &sol, x);
        assert!((u - p.exact_u(x)).abs() < 1e-6);
    }
}

#[test]
fn near_boundary_points_refused() {
    let (p, sol) = closed_solution();
    let quad = BoundaryQuadrature::new(&p.curve, &sol.basis, 16).unwrap();
    let on = p.curve.eval(0.3, 0).unwrap();
    assert!(matches!(quad.single_layer(on, &sol), Err(SolverError::TooClose { .. })));
}

#[test]
fn constant_datum_has_zero_net_flux() {
    // u ≡ 1: the double layer of a constant is -1 inside, the flux vanishes
    let (p, sol) = closed_solution();
    let quad = BoundaryQuadrature::new(&p.curve, &sol.basis, 16).unwrap();
    let dl = quad.double_layer([0.0, 0.0], p.orientation().unwrap(), |_| 1.0).unwrap();
    assert!((dl.abs() - 1.0).abs() < 1e-10, "{dl}");
    let rule = splinebem::quadrature::gauss_legendre(8);
    let mut net = 0.0;
    for e in 0..sol.basis.num_elements() {
        let (lo, hi) = sol.basis.element(e);
        for (s, w) in rule.mapped(lo, hi) {
            net += w * sol.eval(s).unwrap() * p.curve.speed(s).unwrap();
        }
    }
    assert!(net.abs() < 1e-6, "{net}");
}

#[test]
fn parabola_far_field_matches_brute_force() {
    let p = Problem::by_name("parabola").unwrap();
    let out = run_case(&p, &RunConfig::new("parabola", 3, 20, 1, Strategy::Weighted)).unwrap();
    let quad = BoundaryQuadrature::new(&p.curve, &out.solution.basis, 16).unwrap();
    let x = [0.3, 3.0];
    let numeric = quad.single_layer(x, &out.solution).unwrap();
    let exact = integrate_adaptive(
        |t| {
            let q = p.curve.point(t).unwrap();
            (q.x[0] - x[0]).hypot(q.x[1] - x[1]).ln() * open_arc_density(&q) * q.speed
        },
        -1.0,
        1.0,
        1e-14,
        1e-14,
    )
    .unwrap()
        * (-1.0 / (2.0 * PI));
    assert!((numeric - exact).abs() < 1e-5 * exact.abs().max(1.0), "{numeric} vs {exact}");
}

#[test]
fn parabola_solution_residual_and_order() {
    let p = Problem::by_name("parabola").unwrap();
    let mut errs = Vec::new();
    for n in [10, 20, 40, 80] {
        let row = run_case(&p, &RunConfig::new("parabola", 2, n, 1, Strategy::Weighted)).unwrap().row;
        assert!(row.solve_residual <= 1e-10);
        errs.push(row.e_r);
    }
    for o in common::halving_orders(&errs) {
        assert!(o >= 3.0, "{errs:?}");
    }
}
