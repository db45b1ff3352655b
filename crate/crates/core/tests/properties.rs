mod common;

use proptest::prelude::*;
use splinebem::assembly::{assemble_weighted_matrix, QuadratureSetup};
use splinebem::problems::Problem;
use splinebem::quadrature::log_moments;
use splinebem::splines::BasisSpec;

use common::moment_oracle;

fn basis_strategy() -> impl Strategy<Value = BasisSpec> {
    (1usize..=6, 1usize..=12, any::<bool>(), -2.0f64..2.0, 0.5f64..4.0).prop_filter_map(
        "cyclic basis needs enough elements",
        |(d, n, cyclic, a, len)| {
            if cyclic {
                BasisSpec::cyclic_uniform(d, a, a + len, n.max(d + 1)).ok()
            } else {
                BasisSpec::clamped_uniform(d, a, a + len, n).ok()
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_of_unity(basis in basis_strategy(), u in 0.0f64..=1.0) {
        let (a, b) = basis.domain();
        let s = a + u * (b - a);
        let total: f64 = basis.eval(s, 0).unwrap().iter().map(|(_, v)| v).sum();
        prop_assert!((total - 1.0).abs() <= 1e-13, "sum {total}");
        let slope: f64 = basis.eval(s, 1).unwrap().iter().map(|(_, v)| v).sum();
        prop_assert!(slope.abs() <= 1e-9 * (basis.num_elements() as f64 / (b - a)).max(1.0));
    }

    #[test]
    fn uneven_knots_partition_of_unity(
        d in 1usize..=5,
        gaps in prop::collection::vec(0.05f64..1.0, 1..8),
        u in 0.0f64..=1.0,
    ) {
        let mut bp = vec![0.0];
        for g in &gaps {
            bp.push(bp.last().unwrap() + g);
        }
        let basis = BasisSpec::clamped(d, &bp).unwrap();
        let s = u * bp.last().unwrap();
        let total: f64 = basis.eval(s, 0).unwrap().iter().map(|(_, v)| v).sum();
        prop_assert!((total - 1.0).abs() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moment_recursion_matches_oracle(
        d in 0usize..=5,
        n in 1usize..=8,
        pick in 0.0f64..1.0,
        s in -1.5f64..1.5,
    ) {
        let basis = BasisSpec::clamped_uniform(d, -1.0, 1.0, n).unwrap();
        let j = ((pick * basis.dim() as f64) as usize).min(basis.dim() - 1);
        let fast = log_moments(&basis, s)[j];
        let oracle = moment_oracle(&basis, j, s);
        prop_assert!((fast - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "{fast} vs {oracle}");
    }

    #[test]
    fn moment_recursion_on_breakpoints(d in 1usize..=5, n in 1usize..=8, k in 0usize..=8) {
        let basis = BasisSpec::clamped_uniform(d, 0.0, 1.0, n).unwrap();
        let s = k.min(n) as f64 / n as f64;
        let fast = log_moments(&basis, s);
        for (j, &v) in fast.iter().enumerate() {
            let oracle = moment_oracle(&basis, j, s);
            prop_assert!((v - oracle).abs() <= 1e-10 * oracle.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_split_consistency(closed in any::<bool>(), u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        let p = Problem::by_name(if closed { "closed-smooth" } else { "parabola" }).unwrap();
        let c = &p.curve;
        let (a, b) = c.domain();
        let (s, t) = (a + u * (b - a), a + v * (b - a));
        prop_assume!(c.param_diff(s, t).abs() > 1e-3);
        let direct = c.log_distance(s, t).unwrap();
        let split = c.kernel_k1(s, t).unwrap() + c.kernel_k2(s, t);
        prop_assert!((direct - split).abs() <= 1e-12, "{direct} vs {split}");
    }

    #[test]
    fn diagonal_limit_continuity(closed in any::<bool>(), u in 0.0f64..=1.0, sign in prop::bool::ANY) {
        let p = Problem::by_name(if closed { "closed-smooth" } else { "parabola" }).unwrap();
        let c = &p.curve;
        let (a, b) = c.domain();
        let eps = c.diag_eps();
        let dir = if sign { 1.0 } else { -1.0 };
        let s = (a + 2.0 * eps) + u * (b - a - 4.0 * eps);
        let outside = c.kernel_k1(s, s + dir * 1.01 * eps).unwrap();
        let inside = c.kernel_k1(s, s + dir * 0.99 * eps).unwrap();
        let at = c.kernel_k1(s, s).unwrap();
        prop_assert!((outside - inside).abs() <= 1e-6);
        prop_assert!((outside - at).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn assembly_is_bit_identical(d in 2usize..=4, n in 2usize..=12, nref in 1usize..=2, threads in 1usize..=4) {
        let p = Problem::by_name("parabola").unwrap();
        let basis = p.discretization(d, n).unwrap();
        let setup = QuadratureSetup::build(&basis, nref).unwrap();
        let (first, _, _) = assemble_weighted_matrix(&p.curve, &setup, false).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let again = QuadratureSetup::build(&basis, nref).unwrap();
        let (second, _, _) = pool.install(|| assemble_weighted_matrix(&p.curve, &again, false)).unwrap();
        prop_assert!(first.iter().zip(second.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
