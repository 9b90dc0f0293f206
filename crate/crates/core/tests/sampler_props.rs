use proptest::prelude::*;

use hmconv::approximation::{interior_region, RegionWalker};
use hmconv::geometry::{Domain, Obstacle, Point};
use hmconv::sampler::{
    measure_from_walks, obstacle_hits, sample_harmonic_measure, walk_rng, EmpiricalMeasure, FirstHit, WalkConfig,
    WalkEnd,
};
use hmconv::transport::{subsample, w1_distance, ResampleMethod};

fn slit_domain(length: f64) -> Domain {
    let slit = Obstacle::segment(Point::new(0.2, 0.0), Point::new(0.2 + length, 0.0)).unwrap();
    Domain::new(Point::ORIGIN, 1.0, vec![slit], "slit").unwrap()
}

fn obstacle() -> impl Strategy<Value = Obstacle> {
    prop_oneof![
        (0.1f64..0.6, 0.0f64..6.28, 0.02f64..0.15)
            .prop_map(|(r, t, s)| Obstacle::disk(Point::new(r * t.cos(), r * t.sin()), s).unwrap()),
        (0.1f64..0.6, 0.0f64..6.28, 0.0f64..3.14, 0.05f64..0.2).prop_map(|(r, t, a, l)| {
            let m = Point::new(r * t.cos(), r * t.sin());
            let d = Point::new(l * a.cos(), l * a.sin());
            Obstacle::segment(m - d, m + d).unwrap()
        }),
    ]
}

/// Unit disk with one obstacle and a basepoint on the far side.
fn domain_and_start() -> impl Strategy<Value = (Domain, Point)> {
    (obstacle(), 0.0f64..6.28).prop_filter_map("basepoint too close", |(o, t)| {
        let dom = Domain::new(Point::ORIGIN, 1.0, vec![o], "random").ok()?;
        let w = Point::new(0.8 * t.cos(), 0.8 * t.sin());
        (dom.dist_to_boundary(w).ok()? > 0.05).then_some((dom, w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_measure((dom, w) in domain_and_start(), seed in any::<u64>()) {
        let cfg = WalkConfig::default().with_seed(seed).with_samples(300);
        let a = sample_harmonic_measure(&dom, w, &cfg).unwrap();
        let b = sample_harmonic_measure(&dom, w, &cfg).unwrap();
        prop_assert_eq!(a.atoms(), b.atoms());
    }

    #[test]
    fn hits_and_timeouts_account_for_all_mass((dom, w) in domain_and_start(), seed in any::<u64>()) {
        let cfg = WalkConfig { max_steps: 1000, ..WalkConfig::default().with_seed(seed).with_samples(300) };
        let mu = sample_harmonic_measure(&dom, w, &cfg).unwrap();
        prop_assert!((mu.total_weight() + mu.mass_deficit() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hits_lie_on_the_boundary((dom, w) in domain_and_start(), seed in any::<u64>()) {
        let cfg = WalkConfig::default().with_seed(seed).with_samples(300);
        let mu = sample_harmonic_measure(&dom, w, &cfg).unwrap();
        for a in mu.atoms() {
            prop_assert!(dom.boundary_distance(a.point) <= cfg.eps_stop);
        }
    }
}

#[test]
fn longer_slits_catch_more_mass() {
    let cfg = WalkConfig::default().with_seed(7);
    let n = cfg.n_samples as f64;
    let mass: Vec<(f64, f64)> = [0.1, 0.3, 0.6]
        .iter()
        .map(|&len| {
            let (hits, total) = obstacle_hits(&slit_domain(len), Point::ORIGIN, &cfg).unwrap();
            let p = hits as f64 / total as f64;
            (p, (p * (1.0 - p) / n).sqrt())
        })
        .collect();
    assert!(mass[0].0 > 0.0);
    for pair in mass.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let se = (lo.1 * lo.1 + hi.1 * hi.1).sqrt();
        assert!(hi.0 > lo.0 - 3.0 * se, "{mass:?}");
    }
}

/// Stopping at the exit of an interior region and restarting from the exit
/// point gives the same hitting distribution as a single walk.
#[test]
fn restart_from_interior_exit_matches_direct_walk() {
    let dom = slit_domain(0.5);
    let w = Point::new(0.0, 0.3);
    let region = interior_region(&dom, w, 0.2, 0.02).unwrap();
    let inner = RegionWalker::new(&region);
    let cfg = WalkConfig::default().with_seed(11).with_samples(20_000);

    let restarted: Vec<WalkEnd> = (0..cfg.n_samples as u64)
        .map(|k| {
            let mut rng = walk_rng(cfg.seed, k);
            match inner.first_hit(w, &cfg, &mut rng) {
                WalkEnd::Hit { point, .. } => dom.first_hit(point, &cfg, &mut rng),
                timed_out => timed_out,
            }
        })
        .collect();
    let two_stage = measure_from_walks(&restarted, &cfg);
    let direct = sample_harmonic_measure(&dom, w, &cfg.with_seed(12)).unwrap();
    let other = sample_harmonic_measure(&dom, w, &cfg.with_seed(13)).unwrap();

    let w1 = |a: &EmpiricalMeasure, b: &EmpiricalMeasure| {
        let a = subsample(a, 2048, 1, ResampleMethod::Systematic).unwrap();
        let b = subsample(b, 2048, 2, ResampleMethod::Systematic).unwrap();
        w1_distance(&a, &b).unwrap().0
    };
    let noise = w1(&direct, &other);
    let gap = w1(&two_stage, &direct);
    assert!(gap <= 3.0 * noise + cfg.eps_stop, "gap {gap}, noise {noise}");
}
