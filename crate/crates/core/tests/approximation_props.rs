use std::path::PathBuf;

use proptest::prelude::*;

use hmconv::approximation::{
    basepoint_transfer_check, cell_center, common_interior_on, interior_region, GridFamily,
};
use hmconv::geometry::{Domain, Obstacle, Point};
use hmconv::scenarios::Scenario;

fn disks(radii: &[f64]) -> Vec<Domain> {
    radii.iter().map(|&r| Domain::disk(Point::ORIGIN, r).unwrap()).collect()
}

fn shipped(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"));
    Scenario::load(path).unwrap()
}

fn obstacle() -> impl Strategy<Value = Obstacle> {
    prop_oneof![
        (0.2f64..0.7, 0.0f64..6.28, 0.02f64..0.15)
            .prop_map(|(r, t, s)| Obstacle::disk(Point::new(r * t.cos(), r * t.sin()), s).unwrap()),
        (0.2f64..0.7, 0.0f64..6.28, 0.0f64..3.14, 0.05f64..0.2).prop_map(|(r, t, a, l)| {
            let m = Point::new(r * t.cos(), r * t.sin());
            let d = Point::new(l * a.cos(), l * a.sin());
            Obstacle::segment(m - d, m + d).unwrap()
        }),
    ]
}

/// A family of unit disks whose obstacles drift toward their final positions.
fn family() -> impl Strategy<Value = (Domain, Vec<Domain>)> {
    (prop::collection::vec(obstacle(), 0..3), 2usize..5).prop_filter_map("invalid member", |(obs, len)| {
        let limit = Domain::new(Point::ORIGIN, 1.0, obs.clone(), "limit").ok()?;
        let seq = (1..=len)
            .map(|k| {
                let shrink = 1.0 - 0.1 / k as f64;
                let moved = obs
                    .iter()
                    .map(|o| match o {
                        Obstacle::Disk { center, radius } => Obstacle::disk(*center, radius * shrink),
                        other => Ok(other.clone()),
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .ok()?;
                Domain::new(Point::ORIGIN, 1.0 - 0.05 / k as f64, moved, "member").ok()
            })
            .collect::<Option<Vec<_>>>()?;
        Some((limit, seq))
    })
}

fn clear_basepoint(limit: &Domain, seq: &[Domain], margin: f64) -> Option<Point> {
    let candidates = [Point::ORIGIN, Point::new(0.0, 0.5), Point::new(-0.5, 0.0), Point::new(0.3, -0.3)];
    candidates.into_iter().find(|&w| {
        std::iter::once(limit).chain(seq).all(|d| d.dist_to_boundary(w).map_or(false, |r| r > margin))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn larger_epsilon_keeps_an_ok_verdict((limit, seq) in family()) {
        let h = 0.02;
        let w = clear_basepoint(&limit, &seq, 0.4);
        prop_assume!(w.is_some());
        let w = w.unwrap();
        let grid = GridFamily::new(&limit, &seq, h).unwrap();
        let ladder = [0.1, 0.15, 0.2, 0.3, 0.4, 0.6];
        let mut first_ok: Option<usize> = None;
        for eps in ladder {
            let v = common_interior_on(&grid, w, eps).unwrap();
            if let Some(tail) = first_ok {
                prop_assert!(v.ok, "ok below {eps} but not at it");
                prop_assert!(v.tail_start <= tail);
            }
            if v.ok {
                first_ok = Some(v.tail_start);
            }
        }
    }

    #[test]
    fn region_cells_meet_the_threshold((limit, seq) in family(), eps in 0.1f64..0.5) {
        let h = eps / 5.0;
        let w = clear_basepoint(&limit, &seq, eps);
        prop_assume!(w.is_some());
        let w = w.unwrap();

        let single = interior_region(&limit, w, eps, h).unwrap();
        prop_assert!(single.is_4_connected());
        prop_assert!(single.contains_cell(single.marked));
        for &c in &single.cells {
            prop_assert!(limit.dist_to_boundary(cell_center(c, h)).unwrap() >= eps / 2.0);
        }

        let grid = GridFamily::new(&limit, &seq, h).unwrap();
        let v = common_interior_on(&grid, w, eps).unwrap();
        prop_assert!(v.region.is_4_connected());
        for &c in &v.region.cells {
            let p = cell_center(c, h);
            for d in std::iter::once(&limit).chain(&seq[v.tail_start - 1..]) {
                prop_assert!(d.dist_to_boundary(p).unwrap() >= eps / 2.0);
            }
        }
        prop_assert_eq!(v.ok, v.worst_boundary_gap < eps);
    }
}

#[test]
fn growing_disks_are_monotone_in_epsilon() {
    let limit = Domain::unit_disk();
    let seq = disks(&(2..=8).map(|n| 1.0 - 1.0 / n as f64).collect::<Vec<_>>());
    let grid = GridFamily::new(&limit, &seq, 0.005).unwrap();
    let verdicts: Vec<_> = [0.1, 0.2, 0.3, 0.4, 0.6]
        .iter()
        .map(|&eps| common_interior_on(&grid, Point::ORIGIN, eps).unwrap())
        .collect();
    assert!(verdicts[2].ok, "{:?}", verdicts.iter().map(|v| (v.ok, v.worst_boundary_gap)).collect::<Vec<_>>());
    for pair in verdicts.windows(2) {
        if pair[0].ok {
            assert!(pair[1].ok && pair[1].tail_start <= pair[0].tail_start);
        }
    }
}

#[test]
fn halving_the_grid_keeps_ok_verdicts() {
    for name in ["shrinking-disks", "slit-circle", "radial-teeth"] {
        let s = shipped(name);
        let seq = s.members().unwrap();
        let h = s.settings.grid_h;
        for limit in s.limit_domains().unwrap() {
            let coarse = GridFamily::new(&limit, &seq, h).unwrap();
            let mut fine = None;
            for &w in &s.basepoints {
                if !limit.contains(w) {
                    continue;
                }
                for &eps in &s.settings.epsilon_ladder {
                    let ok = common_interior_on(&coarse, w, eps).map_or(false, |v| v.ok);
                    if !ok {
                        continue;
                    }
                    let fine = fine.get_or_insert_with(|| GridFamily::new(&limit, &seq, h / 2.0).unwrap());
                    let v = common_interior_on(fine, w, eps).unwrap();
                    assert!(v.ok, "{name}: ok at h = {h} but not at h / 2 (w = {w}, eps = {eps})");
                }
            }
        }
    }
}

#[test]
fn shrinking_disks_transfer_between_basepoints() {
    let seq = disks(&(2..=8).map(|n| 1.0 - 1.0 / n as f64).collect::<Vec<_>>());
    let ok = basepoint_transfer_check(&Domain::unit_disk(), &seq, Point::ORIGIN, Point::new(0.3, 0.0), 0.2, 0.005);
    assert!(ok.unwrap());
}

#[test]
fn radial_teeth_transfer_between_basepoints() {
    let s = shipped("radial-teeth");
    let seq = s.members().unwrap();
    let half = Domain::disk(Point::ORIGIN, 0.5).unwrap();
    let ok = basepoint_transfer_check(&half, &seq, Point::ORIGIN, Point::new(0.25, 0.0), 0.05, 0.005);
    assert!(ok.unwrap());
}
