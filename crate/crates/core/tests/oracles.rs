//! Analysis checked against the simulator and against geometric sampling.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use velopaoi_core::aerial::AerialSuccessContext;
use velopaoi_core::distances::handover_probability_at;
use velopaoi_core::sim::{
    estimate_handover_probability, estimate_joint_and_correlation, estimate_meta, Placement, SimConfig, Simulator,
    UserKind,
};
use velopaoi_core::{Environment, SystemParams};

#[test]
fn handover_probability_matches_geometric_sampling() {
    let p = SystemParams::default();
    let analytic = handover_probability_at(&p, 500.0).unwrap();
    let mc = estimate_handover_probability(&p, 500.0, 200_000, 21);
    assert!((analytic - mc.estimate).abs() < 0.01, "{analytic} vs {}", mc.estimate);
}

#[test]
fn origin_mode_nearest_distance_is_rayleigh() {
    // Only BSs matter here, so the UE process is made sparse.
    let mut p = SystemParams::default();
    p.ue_density_km2 = 1e-3;
    let cfg = SimConfig { placement: Placement::Origin, ..SimConfig::default() };
    let sim = Simulator::new(&p, UserKind::Ground, cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut d: Vec<f64> = (0..100_000).map(|_| sim.realize(&mut rng).serving_distance()).collect();
    d.sort_by(|a, b| a.total_cmp(b));
    let n = d.len() as f64;
    let lambda = p.lambda();
    let ks = d
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let f = 1.0 - (-PI * lambda * r * r).exp();
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS statistic {ks}");
}

#[test]
fn interferer_radial_density_follows_thinning() {
    let p = SystemParams::default();
    let sim = Simulator::new(&p, UserKind::Ground, SimConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (bins, width, trials) = (10, 200.0, 20_000);
    let mut counts = vec![0.0; bins];
    for _ in 0..trials {
        for r in sim.realize(&mut rng).interferer_distances() {
            let k = (r / width) as usize;
            if k < bins {
                counts[k] += 1.0;
            }
        }
    }
    let lambda = p.lambda();
    let mut worst: f64 = 0.0;
    for (k, c) in counts.iter().enumerate() {
        let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
        let area = PI * (b * b - a * a);
        let empirical = c / (trials as f64 * area * lambda);
        // Bin average of the thinning factor.
        let model = 1.0 - ((-PI * lambda * a * a).exp() - (-PI * lambda * b * b).exp()) / (PI * lambda * (b * b - a * a));
        worst = worst.max((empirical - model).abs());
    }
    assert!(worst <= 0.02, "largest per-bin deviation {worst}");
}

#[test]
fn window_doubling_is_within_confidence() {
    let p = SystemParams::default();
    let near = Simulator::new(&p, UserKind::Ground, SimConfig::default()).unwrap();
    let far = Simulator::new(&p, UserKind::Ground, SimConfig { window_factor: Some(20.0), ..SimConfig::default() }).unwrap();
    let a = estimate_meta(&near, &[0.5], 10_000, 31)[0];
    let b = estimate_meta(&far, &[0.5], 10_000, 31)[0];
    assert!((a.estimate - b.estimate).abs() < a.half_width.max(b.half_width), "{a:?} vs {b:?}");
}

#[test]
fn static_ground_user_is_fully_correlated() {
    let sim = Simulator::new(&SystemParams::default(), UserKind::Ground, SimConfig::default()).unwrap();
    let j = estimate_joint_and_correlation(&sim, 0.0, 1.0, 2_000, 3);
    assert!((j.correlation() - 1.0).abs() < 0.02);
    assert_eq!(j.handover_fraction().estimate, 0.0);
}

#[test]
fn distant_instants_factorize() {
    let sim = Simulator::new(&SystemParams::default(), UserKind::Ground, SimConfig::default()).unwrap();
    let j = estimate_joint_and_correlation(&sim, 3_000.0, 1.0, 6_000, 5);
    let joint = j.joint_ccdf(0.4, 0.4, None);
    let (m0, m1) = (j.marginal(0.4, 0), j.marginal(0.4, 1));
    let product = m0.estimate * m1.estimate;
    let ci = joint.half_width + m0.half_width * m1.estimate + m1.half_width * m0.estimate;
    assert!((joint.estimate - product).abs() <= 3.0 * ci, "{} vs {product}", joint.estimate);
}

#[test]
fn vanishing_threshold_gives_certain_success() {
    let p = SystemParams::default().with_threshold(1e-18);
    let sim = Simulator::new(&p, UserKind::Aerial, SimConfig::default()).unwrap();
    let est = estimate_meta(&sim, &[0.05, 0.5, 0.95], 300, 2);
    assert!(est.iter().all(|e| e.estimate == 1.0));
}

#[test]
fn suburban_aerial_meta_within_simulation_confidence() {
    let p = SystemParams::default().with_environment(Environment::Suburban);
    let ctx = AerialSuccessContext::new(&p).unwrap();
    let sim = Simulator::new(&p, UserKind::Aerial, SimConfig::default()).unwrap();
    let e = estimate_meta(&sim, &[0.5], 10_000, 12)[0];
    let analytic = ctx.meta_distribution(0.5).unwrap();
    assert!((analytic - e.estimate).abs() <= e.half_width, "analysis {analytic} vs {e:?}");
}
