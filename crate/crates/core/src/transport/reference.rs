use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{mobius_exit, Atom, EmpiricalMeasure};

/// Closed-form harmonic measures of an obstacle-free disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReferenceKind {
    UniformCircle,
    AnalyticPoisson { basepoint: Point },
    /// Equal weights at the Poisson-kernel quantiles: the uniform atoms
    /// carried by the disk automorphism that sends the center to the
    /// basepoint.
    PoissonQuantiles { basepoint: Point },
}

/// `n_atoms` atoms at equally spaced angles `2 pi k / n` on the ambient
/// circle of an obstacle-free disk, weighted uniformly or by the Poisson
/// kernel at the basepoint.
pub fn discretize_reference(dom: &Domain, kind: ReferenceKind, n_atoms: usize) -> Result<EmpiricalMeasure> {
    if !dom.obstacles().is_empty() {
        return Err(Error::UnsupportedDomain(format!(
            "`{}` has obstacles; analytic references need a plain disk",
            dom.label()
        )));
    }
    if n_atoms == 0 {
        return Err(Error::InvalidArgument("reference needs at least one atom".into()));
    }
    let (c, r) = (dom.ambient_center(), dom.ambient_radius());
    let angles = (0..n_atoms).map(|k| TAU * k as f64 / n_atoms as f64);
    let atoms: Vec<Atom> = match kind {
        ReferenceKind::UniformCircle => angles
            .map(|t| Atom {
                point: c + Point::polar(r, t),
                weight: 1.0 / n_atoms as f64,
            })
            .collect(),
        ReferenceKind::AnalyticPoisson { basepoint } => {
            if !dom.contains(basepoint) {
                return Err(Error::PointOutsideDomain(basepoint));
            }
            let v = basepoint - c;
            let raw: Vec<(Point, f64)> = angles
                .map(|t| {
                    let e = Point::polar(r, t);
                    let d = e - v;
                    (c + e, (r * r - v.dot(v)) / d.dot(d))
                })
                .collect();
            let sum: f64 = raw.iter().map(|(_, k)| k).sum();
            raw.into_iter()
                .map(|(point, k)| Atom { point, weight: k / sum })
                .collect()
        }
        ReferenceKind::PoissonQuantiles { basepoint } => {
            if !dom.contains(basepoint) {
                return Err(Error::PointOutsideDomain(basepoint));
            }
            let v = (basepoint - c) * (1.0 / r);
            angles
                .map(|t| Atom {
                    point: c + mobius_exit(v, t) * r,
                    weight: 1.0 / n_atoms as f64,
                })
                .collect()
        }
    };
    EmpiricalMeasure::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Obstacle;

    #[test]
    fn uniform_four_atoms() {
        let m = discretize_reference(&Domain::unit_disk(), ReferenceKind::UniformCircle, 4).unwrap();
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (a, w) in m.atoms().iter().zip(want) {
            assert!(a.point.dist(Point::new(w.0, w.1)) < 1e-15);
            assert_eq!(a.weight, 0.25);
        }
    }

    #[test]
    fn poisson_at_center_is_uniform() {
        let d = Domain::unit_disk();
        let p = discretize_reference(&d, ReferenceKind::AnalyticPoisson { basepoint: Point::ORIGIN }, 64).unwrap();
        let u = discretize_reference(&d, ReferenceKind::UniformCircle, 64).unwrap();
        for (a, b) in p.atoms().iter().zip(u.atoms()) {
            assert!((a.weight - b.weight).abs() < 1e-15);
            assert_eq!(a.point, b.point);
        }
    }

    #[test]
    fn poisson_ratio_at_half() {
        let p = discretize_reference(
            &Domain::unit_disk(),
            ReferenceKind::AnalyticPoisson {
                basepoint: Point::new(0.5, 0.0),
            },
            360,
        )
        .unwrap();
        let ratio = p.atoms()[0].weight / p.atoms()[180].weight;
        assert!((ratio - 9.0).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn quantiles_at_center_are_uniform() {
        let d = Domain::disk(Point::new(1.0, -2.0), 3.0).unwrap();
        let q = discretize_reference(&d, ReferenceKind::PoissonQuantiles { basepoint: d.ambient_center() }, 32).unwrap();
        let u = discretize_reference(&d, ReferenceKind::UniformCircle, 32).unwrap();
        for (a, b) in q.atoms().iter().zip(u.atoms()) {
            assert!(a.point.dist(b.point) < 1e-14);
        }
    }

    #[test]
    fn quantiles_match_poisson_half_disk_mass() {
        let w = Point::new(0.5, 0.0);
        let n = 4096;
        let q = discretize_reference(&Domain::unit_disk(), ReferenceKind::PoissonQuantiles { basepoint: w }, n).unwrap();
        // Right half-circle mass from the Poisson weights on a fine grid.
        let p = discretize_reference(&Domain::unit_disk(), ReferenceKind::AnalyticPoisson { basepoint: w }, 1 << 16).unwrap();
        let exact = p.mass_where(|x| x.x > 0.0);
        let got = q.mass_where(|x| x.x > 0.0);
        assert!((got - exact).abs() < 2.0 / n as f64, "{got} vs {exact}");
    }

    #[test]
    fn rejects_domains_with_obstacles() {
        let d = Domain::new(
            Point::ORIGIN,
            1.0,
            vec![Obstacle::disk(Point::new(0.5, 0.0), 0.1).unwrap()],
            "holed",
        )
        .unwrap();
        assert!(matches!(
            discretize_reference(&d, ReferenceKind::UniformCircle, 8),
            Err(Error::UnsupportedDomain(_))
        ));
    }
}
