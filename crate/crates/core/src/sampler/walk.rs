//! Walk-on-spheres on [`Domain`]s.
//!
//! Two refinements over the textbook walk keep very small obstacles (radii
//! many orders of magnitude below the ambient scale) tractable:
//!
//! * near a tiny obstacle the walk position is stored as an offset from the
//!   obstacle's anchor, so distances are resolved at the obstacle's own scale;
//! * deep inside the empty annulus around a tiny obstacle, the walk crosses
//!   the annulus in one move: it reaches the inner circle with the exact
//!   log-ratio probability and lands at a Poisson-kernel position on the
//!   circle it exits through (the kernel ignores the far circle, an error of
//!   order `1 / CORRIDOR_RATIO`).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPart, Domain, Point, LOCAL_FRAME_RADIUS};
use crate::sampler::{FirstHit, WalkConfig, WalkEnd, WalkRng};

/// Separation (as a ratio of radii) required on both sides of the walk
/// position before an annulus crossing replaces ordinary steps.
const CORRIDOR_RATIO: f64 = 32.0;

impl FirstHit for Domain {
    fn check_start(&self, start: Point) -> Result<()> {
        if self.contains(start) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(start))
        }
    }

    fn length_scale(&self) -> f64 {
        self.ambient_radius()
    }

    fn first_hit(&self, start: Point, cfg: &WalkConfig, rng: &mut WalkRng) -> WalkEnd {
        let center = self.ambient_center();
        let frame_radius = LOCAL_FRAME_RADIUS * self.ambient_radius();
        let mut origin = center;
        let mut off = start - center;
        let mut local: Option<usize> = None;
        let mut steps = 0u64;
        loop {
            let (d, part, rel) = self.probe(origin, off);
            if d < self.shell(part, cfg.eps_stop) {
                return WalkEnd::Hit {
                    point: self.project(part, rel),
                    part,
                    steps,
                };
            }
            if steps >= cfg.max_steps {
                return WalkEnd::TimedOut { steps };
            }
            let mut nearest_tiny = None;
            if let BoundaryPart::Obstacle(k) = part {
                if self.part_info(k).tiny && rel.norm() < frame_radius {
                    nearest_tiny = Some(k);
                }
            }
            match nearest_tiny {
                Some(k) => {
                    if local != Some(k) {
                        origin = self.part_info(k).anchor;
                        off = rel;
                        local = Some(k);
                    }
                    let info = self.part_info(k);
                    let inner = CORRIDOR_RATIO * info.scale;
                    let outer = info.clearance / CORRIDOR_RATIO;
                    let rho = off.norm();
                    if rho >= CORRIDOR_RATIO * inner && rho * CORRIDOR_RATIO <= outer {
                        off = cross_annulus(off, inner, outer, rng);
                        steps += 1;
                        continue;
                    }
                }
                None => {
                    if local.take().is_some() {
                        off = Point::new((origin.x - center.x) + off.x, (origin.y - center.y) + off.y);
                        origin = center;
                    }
                }
            }
            let theta = rng.gen::<f64>() * TAU;
            off = off + Point::polar(d, theta);
            steps += 1;
        }
    }
}

/// Exit position of Brownian motion started at `z` (relative to the annulus
/// center) from the annulus `inner < |z| < outer`.
fn cross_annulus(z: Point, inner: f64, outer: f64, rng: &mut WalkRng) -> Point {
    let rho = z.norm();
    let p_inner = (outer / rho).ln() / (outer / inner).ln();
    let u: f64 = rng.gen();
    let phi = rng.gen::<f64>() * TAU;
    let dir = z * (1.0 / rho);
    if u < p_inner {
        // Hitting law on the inner circle from outside equals the disk
        // Poisson kernel at the inverted point.
        let p = dir * (inner / rho);
        mobius_exit(p, phi) * inner
    } else {
        mobius_exit(z * (1.0 / outer), phi) * outer
    }
}

/// Exit point on the unit circle of Brownian motion started at `p`, |p| < 1,
/// as the image of the uniform angle `phi` under the disk automorphism
/// sending 0 to `p`.
pub(crate) fn mobius_exit(p: Point, phi: f64) -> Point {
    let zeta = Complex64::from_polar(1.0, phi);
    let a = Complex64::new(p.x, p.y);
    let e = (zeta + a) / (Complex64::new(1.0, 0.0) + a.conj() * zeta);
    Point::new(e.re, e.im)
}
