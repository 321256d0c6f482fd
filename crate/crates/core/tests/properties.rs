use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use velopaoi_core::correlation::discretize_joint;
use velopaoi_core::distances::{handover_void_area, law_of_cosines, serving_cdf, serving_quantile};
use velopaoi_core::math::{lambert_w0, upper_incomplete_gamma};
use velopaoi_core::sim::LinkBudget;
use velopaoi_core::{GroundSuccessContext, SystemParams};

proptest! {
    #[test]
    fn lambert_round_trip(x in -0.367_879_f64..1e6) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1e-3));
    }

    #[test]
    fn incomplete_gamma_recurrence(a in 0.1_f64..6.0, z in 0.05_f64..40.0) {
        let lhs = upper_incomplete_gamma(a + 1.0, z).unwrap();
        let rhs = a * upper_incomplete_gamma(a, z).unwrap() + z.powf(a) * (-z).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1e-300));
    }

    #[test]
    fn serving_quantile_inverts_cdf(u in 1e-9_f64..0.999_999) {
        let p = SystemParams::default();
        let r = serving_quantile(&p, u);
        assert_relative_eq!(serving_cdf(&p, r), u, max_relative = 1e-10);
    }

    #[test]
    fn displaced_distance_obeys_triangle_inequality(r0 in 0.0_f64..5e3, d in 0.0_f64..5e3, k in 0.0_f64..std::f64::consts::PI) {
        let r1 = law_of_cosines(r0, d, k);
        prop_assert!(r1 >= (r0 - d).abs() - 1e-9 && r1 <= r0 + d + 1e-9);
    }

    #[test]
    fn void_area_is_non_negative(r0 in 1.0_f64..3e3, d in 0.0_f64..3e3, k in 0.0_f64..std::f64::consts::PI) {
        prop_assert!(handover_void_area(r0, k, d) >= 0.0);
    }

    #[test]
    fn ground_success_is_monotone(r0 in 10.0_f64..2e3, r1 in 10.0_f64..4e3, f in 1.01_f64..3.0) {
        let ctx = GroundSuccessContext::new(&SystemParams::default()).unwrap();
        let base = ctx.cond_success(r0, r1);
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(ctx.cond_success(r0 * f, r1) <= base);
        prop_assert!(ctx.cond_success(r0, r1 * f) >= base);
    }

    #[test]
    fn link_budget_success_decreases_in_threshold(
        signal in 1e-3_f64..10.0,
        shape in 1u32..4,
        powers in proptest::collection::vec((1e-4_f64..1.0, 1u32..4), 0..6),
        theta in 0.01_f64..10.0,
    ) {
        let budget = LinkBudget { signal, signal_shape: shape, interferers: powers, noise: 1e-3 };
        let a = budget.success_probability(theta);
        let b = budget.success_probability(theta * 1.5);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn product_lattices_carry_unit_mass(k0 in 0.2_f64..3.0, k1 in 0.2_f64..3.0) {
        let grid = discretize_joint(|a, b| Ok((1.0 - a.powf(k0)) * (1.0 - b.powf(k1))), 0.02, None).unwrap();
        assert_relative_eq!(grid.total_mass(), 1.0, epsilon = 1e-12);
        prop_assert!(grid.clipped == 0.0);
    }
}

#[test]
fn link_budget_draws_agree_for_rayleigh_links() {
    let budget = LinkBudget { signal: 1.0, signal_shape: 1, interferers: vec![(0.3, 1), (0.2, 1)], noise: 0.05 };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mc = budget.success_by_draws(1.0, 400_000, &mut rng);
    assert!((mc - budget.success_probability(1.0)).abs() < 0.004);
}
