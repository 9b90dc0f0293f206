use proptest::prelude::*;

use hmconv::geometry::Point;
use hmconv::sampler::{Atom, EmpiricalMeasure};
use hmconv::transport::{w1_distance, w1_distance_with, W1Options};

fn points(n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point::new(x, y)), n)
}

/// Probability measure on up to eight atoms with random weights.
fn weighted() -> impl Strategy<Value = EmpiricalMeasure> {
    (1usize..=8).prop_flat_map(|n| (points(n), prop::collection::vec(0.1f64..1.0, n))).prop_map(|(pts, w)| {
        let total: f64 = w.iter().sum();
        EmpiricalMeasure::new(
            pts.into_iter()
                .zip(w)
                .map(|(point, weight)| Atom {
                    point,
                    weight: weight / total,
                })
                .collect(),
        )
        .unwrap()
    })
}

fn uniform_pair() -> impl Strategy<Value = (Vec<Point>, Vec<Point>)> {
    (1usize..=7).prop_flat_map(|n| (points(n), points(n)))
}

fn brute_force(a: &[Point], b: &[Point]) -> f64 {
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = f64::INFINITY;
    permute(&mut idx, 0, &mut |p| {
        best = best.min(a.iter().zip(p).map(|(x, &j)| x.dist(b[j])).sum());
    });
    best / a.len() as f64
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

fn cost(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    w1_distance(a, b).unwrap().0
}

proptest! {
    #[test]
    fn symmetric(a in weighted(), b in weighted()) {
        prop_assert!((cost(&a, &b) - cost(&b, &a)).abs() <= 1e-9);
    }

    #[test]
    fn triangle_inequality(a in weighted(), b in weighted(), c in weighted()) {
        prop_assert!(cost(&a, &c) <= cost(&a, &b) + cost(&b, &c) + 1e-9);
    }

    #[test]
    fn zero_on_identical_multisets(a in weighted()) {
        prop_assert!(cost(&a, &a).abs() <= 1e-12);
        let mut split: Vec<Atom> = Vec::new();
        for at in a.atoms() {
            split.push(Atom { point: at.point, weight: at.weight / 2.0 });
            split.push(Atom { point: at.point, weight: at.weight / 2.0 });
        }
        prop_assert!(cost(&a, &EmpiricalMeasure::new(split).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn positive_on_distinct_supports(a in weighted(), shift in 0.01f64..1.0) {
        let b = a.translated(Point::new(shift, 0.0));
        prop_assert!(cost(&a, &b) > 0.0);
    }

    #[test]
    fn translation_equivariant(a in weighted(), b in weighted(), vx in -5.0f64..5.0, vy in -5.0f64..5.0) {
        let v = Point::new(vx, vy);
        prop_assert!((cost(&a, &b) - cost(&a.translated(v), &b.translated(v))).abs() <= 1e-9);
    }

    #[test]
    fn plans_are_feasible(a in weighted(), b in weighted()) {
        let (c, plan) = w1_distance(&a, &b).unwrap();
        prop_assert!(plan.marginal_error(&a, &b) <= 1e-12);
        prop_assert!(plan.pairs.iter().all(|p| p.2 > 0.0));
        prop_assert!((plan.cost - c).abs() <= 1e-15);
    }

    #[test]
    fn every_solver_matches_brute_force((a, b) in uniform_pair()) {
        let want = brute_force(&a, &b);
        let (ua, ub) = (EmpiricalMeasure::uniform(&a).unwrap(), EmpiricalMeasure::uniform(&b).unwrap());
        for solver in ["auction", "hungarian", "ssp"] {
            let opts = W1Options { solver: Some(solver.into()), ..W1Options::default() };
            let (got, plan) = w1_distance_with(&ua, &ub, &opts).unwrap();
            prop_assert!((got - want).abs() <= 1e-9, "{}: {} vs {}", solver, got, want);
            prop_assert!(plan.marginal_error(&ua, &ub) <= 1e-12);
        }
    }
}
