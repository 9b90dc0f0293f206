use std::collections::VecDeque;
use std::f64::consts::{SQRT_2, TAU};

use rand::Rng;

use crate::approximation::{cell_center, cell_of, Cell, GridRegion, Lattice};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPart, Point};
use crate::sampler::{FirstHit, WalkConfig, WalkEnd, WalkRng};

/// Cells farther than this (Chebyshev, in cells) from the outside use the
/// cheap lower bound instead of an exact distance.
const EXACT_RANGE: u32 = 6;

/// Walk-on-spheres inside a [`GridRegion`], treated as the open interior of
/// its union of closed cells.
pub struct RegionWalker {
    lattice: Lattice,
    inside: Vec<bool>,
    /// Chebyshev distance (in cells) to the nearest outside cell.
    depth: Vec<u32>,
}

impl RegionWalker {
    pub fn new(region: &GridRegion) -> Self {
        let h = region.h;
        let margin = 2.0 * h;
        let lattice = Lattice::covering(h, region.cells.iter().map(|&c| (cell_center(c, h), margin)));
        let mut inside = vec![false; lattice.len()];
        for &c in &region.cells {
            inside[lattice.index(c).expect("covered")] = true;
        }
        let mut depth = vec![u32::MAX; lattice.len()];
        let mut queue = VecDeque::new();
        for k in 0..lattice.len() {
            if !inside[k] {
                depth[k] = 0;
                queue.push_back(k);
            }
        }
        while let Some(k) = queue.pop_front() {
            let c = lattice.cell(k);
            for di in -1..=1 {
                for dj in -1..=1 {
                    if let Some(n) = lattice.index((c.0 + di, c.1 + dj)) {
                        if depth[n] == u32::MAX {
                            depth[n] = depth[k] + 1;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        RegionWalker { lattice, inside, depth }
    }

    fn h(&self) -> f64 {
        self.lattice.h
    }

    /// Radius of a disk about `p` inside the region, and the nearest
    /// boundary point whenever that radius is the exact distance.
    fn clearance(&self, p: Point) -> (f64, Option<Point>) {
        let c = cell_of(p, self.h());
        let Some(k) = self.lattice.index(c).filter(|&k| self.inside[k]) else {
            return (0.0, Some(p));
        };
        let depth = self.depth[k];
        if depth > EXACT_RANGE {
            return ((depth - 1) as f64 * self.h(), None);
        }
        let (d, q) = self.nearest_outside(p, c, depth);
        (d, Some(q))
    }

    /// Nearest point of the closed outside cells to `p`, which lies in cell
    /// `c` at Chebyshev depth `depth`.
    fn nearest_outside(&self, p: Point, c: Cell, depth: u32) -> (f64, Point) {
        let h = self.h();
        // Any outside cell closer than the one at Chebyshev distance `depth`
        // lies within this range.
        let reach = (SQRT_2 * f64::from(depth + 1)).ceil() as i64 + 1;
        let mut best = (f64::INFINITY, p);
        for di in -reach..=reach {
            for dj in -reach..=reach {
                let n: Cell = (c.0 + di, c.1 + dj);
                if self.lattice.index(n).is_some_and(|m| self.inside[m]) {
                    continue;
                }
                let lo = Point::new(n.0 as f64 * h, n.1 as f64 * h);
                let q = Point::new(p.x.clamp(lo.x, lo.x + h), p.y.clamp(lo.y, lo.y + h));
                let d = p.dist(q);
                if d < best.0 {
                    best = (d, q);
                }
            }
        }
        best
    }

    /// Exact distance from `p` to the region's boundary (zero outside).
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        let c = cell_of(p, self.h());
        match self.lattice.index(c).filter(|&k| self.inside[k]) {
            Some(k) => self.nearest_outside(p, c, self.depth[k]).0,
            None => 0.0,
        }
    }
}

impl FirstHit for RegionWalker {
    fn check_start(&self, start: Point) -> Result<()> {
        if self.clearance(start).0 > 0.0 {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(start))
        }
    }

    fn length_scale(&self) -> f64 {
        self.h() * self.lattice.width.max(self.lattice.height) as f64
    }

    fn first_hit(&self, start: Point, cfg: &WalkConfig, rng: &mut WalkRng) -> WalkEnd {
        let mut p = start;
        let mut steps = 0;
        loop {
            let (d, nearest) = self.clearance(p);
            if d < cfg.eps_stop {
                return WalkEnd::Hit {
                    point: nearest.unwrap_or(p),
                    part: BoundaryPart::Ambient,
                    steps,
                };
            }
            if steps >= cfg.max_steps {
                return WalkEnd::TimedOut { steps };
            }
            p = p + Point::polar(d, rng.gen::<f64>() * TAU);
            steps += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximation::interior_region;
    use crate::geometry::Domain;
    use crate::sampler::sample_harmonic_measure;

    fn square(n: i64, h: f64) -> GridRegion {
        let cells = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        GridRegion::new(h, (0, 0), cells)
    }

    #[test]
    fn distances_in_a_square() {
        let w = RegionWalker::new(&square(40, 0.1));
        for p in [Point::new(2.0, 2.0), Point::new(0.05, 1.3), Point::new(3.9, 3.99), Point::new(0.7, 2.5)] {
            let want = p.x.min(p.y).min(4.0 - p.x).min(4.0 - p.y);
            assert!((w.distance_to_boundary(p) - want).abs() < 1e-12, "{p}");
            let (d, _) = w.clearance(p);
            assert!(d <= want + 1e-12 && d > 0.0);
        }
        assert!(w.check_start(Point::new(-0.1, 1.0)).is_err());
    }

    #[test]
    fn hits_lie_on_region_boundary() {
        let region = interior_region(&Domain::unit_disk(), Point::ORIGIN, 0.4, 0.05).unwrap();
        let walker = RegionWalker::new(&region);
        let cfg = WalkConfig::default().with_samples(2000).with_seed(3);
        let m = sample_harmonic_measure(&walker, Point::ORIGIN, &cfg).unwrap();
        assert_eq!(m.total_weight(), 1.0);
        for a in m.atoms() {
            let c = cell_of(a.point, 0.05);
            // On the boundary of a region cell, next to a non-region cell.
            let near_in = (-1..=1).any(|di| (-1..=1).any(|dj| region.contains_cell((c.0 + di, c.1 + dj))));
            let near_out = (-1..=1).any(|di| (-1..=1).any(|dj| !region.contains_cell((c.0 + di, c.1 + dj))));
            assert!(near_in && near_out, "{}", a.point);
            let r = a.point.norm();
            assert!((0.7..0.85).contains(&r), "{r}");
        }
    }
}
