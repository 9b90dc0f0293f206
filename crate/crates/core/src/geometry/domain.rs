use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::geometry::{Obstacle, Point};

/// Obstacles smaller than this fraction of the ambient radius are "tiny":
/// walks near them switch to the obstacle's local frame and their absorption
/// shell shrinks in proportion to their size.
pub(crate) const TINY_SCALE: f64 = 1e-3;

/// Radius (as a fraction of the ambient radius) around a tiny obstacle's
/// anchor inside which walks are tracked in that obstacle's frame.
pub(crate) const LOCAL_FRAME_RADIUS: f64 = 1e-2;

const CANDIDATE_GRID_MIN_OBSTACLES: usize = 8;
const CANDIDATE_GRID_CELLS: usize = 96;

/// Which piece of the boundary a query resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryPart {
    Obstacle(usize),
    Ambient,
}

/// Result of a nearest-boundary query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closest {
    pub dist: f64,
    pub point: Point,
    pub part: BoundaryPart,
}

#[derive(Debug, Clone)]
pub(crate) struct PartInfo {
    pub anchor: Point,
    pub scale: f64,
    pub shell_factor: f64,
    /// Smallest distance from the anchor to any other boundary part.
    pub clearance: f64,
    pub tiny: bool,
}

/// Per-cell lists of obstacles that can be nearest to a point in the cell.
#[derive(Debug, Clone)]
struct CandidateGrid {
    min: Point,
    cell: f64,
    n: usize,
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl CandidateGrid {
    fn build(center: Point, radius: f64, obstacles: &[Obstacle]) -> Self {
        let n = CANDIDATE_GRID_CELLS;
        let cell = 2.0 * radius / n as f64;
        let min = Point::new(center.x - radius, center.y - radius);
        let half_diag = cell * FRAC_1_SQRT_2;
        let mut offsets = Vec::with_capacity(n * n + 1);
        let mut items = Vec::new();
        let mut d = vec![0.0; obstacles.len()];
        offsets.push(0);
        for j in 0..n {
            for i in 0..n {
                let q = Point::new(min.x + (i as f64 + 0.5) * cell, min.y + (j as f64 + 0.5) * cell);
                let mut upper = (radius - q.dist(center)).abs() + half_diag;
                for (k, o) in obstacles.iter().enumerate() {
                    d[k] = o.distance(q);
                    upper = upper.min(d[k] + half_diag);
                }
                for (k, &dk) in d.iter().enumerate() {
                    if dk - half_diag <= upper + 1e-9 * radius {
                        items.push(k as u32);
                    }
                }
                offsets.push(items.len() as u32);
            }
        }
        CandidateGrid {
            min,
            cell,
            n,
            offsets,
            items,
        }
    }

    fn lookup(&self, p: Point) -> Option<&[u32]> {
        let fx = (p.x - self.min.x) / self.cell;
        let fy = (p.y - self.min.y) / self.cell;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        if i >= self.n || j >= self.n {
            return None;
        }
        let c = j * self.n + i;
        Some(&self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize])
    }
}

/// A bounded planar domain: an open ambient disk minus closed obstacles.
///
/// Domains are immutable after construction and all queries are pure, so a
/// single value can be shared across sampling workers.
#[derive(Debug, Clone)]
pub struct Domain {
    label: String,
    center: Point,
    radius: f64,
    obstacles: Vec<Obstacle>,
    parts: Vec<PartInfo>,
    accel: Option<CandidateGrid>,
    all: Vec<u32>,
}

impl Domain {
    pub fn new(center: Point, radius: f64, obstacles: Vec<Obstacle>, label: impl Into<String>) -> Result<Self> {
        if !center.is_finite() || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "ambient disk needs a finite center and positive radius, got {radius}"
            )));
        }
        for (k, o) in obstacles.iter().enumerate() {
            let (dmin, _) = o.radial_range(center);
            if dmin > radius {
                return Err(Error::InvalidDomain(format!(
                    "obstacle {k} ({}) does not meet the ambient disk",
                    o.kind()
                )));
            }
        }
        let parts = obstacles
            .iter()
            .enumerate()
            .map(|(k, o)| {
                let anchor = o.anchor();
                let scale = o.scale();
                let mut clearance = radius - anchor.dist(center);
                for (j, other) in obstacles.iter().enumerate() {
                    if j != k {
                        clearance = clearance.min(other.distance(anchor));
                    }
                }
                PartInfo {
                    anchor,
                    scale,
                    shell_factor: (scale / (TINY_SCALE * radius)).min(1.0),
                    clearance,
                    tiny: scale < TINY_SCALE * radius,
                }
            })
            .collect();
        let accel = (obstacles.len() > CANDIDATE_GRID_MIN_OBSTACLES)
            .then(|| CandidateGrid::build(center, radius, &obstacles));
        let all = (0..obstacles.len() as u32).collect();
        Ok(Domain {
            label: label.into(),
            center,
            radius,
            obstacles,
            parts,
            accel,
            all,
        })
    }

    /// Disk of the given center and radius with no obstacles.
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        Domain::new(center, radius, Vec::new(), format!("disk(r={radius})"))
    }

    pub fn unit_disk() -> Self {
        Domain::new(Point::ORIGIN, 1.0, Vec::new(), "unit-disk").expect("unit disk is valid")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_center(&self) -> Point {
        self.center
    }

    pub fn ambient_radius(&self) -> f64 {
        self.radius
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    /// True for the origin-centered unit disk without obstacles.
    pub fn is_unit_disk(&self) -> bool {
        self.obstacles.is_empty() && self.center == Point::ORIGIN && self.radius == 1.0
    }

    /// `p` is in the open ambient disk and at positive distance from every obstacle.
    pub fn contains(&self, p: Point) -> bool {
        p.is_finite()
            && p.dist(self.center) < self.radius
            && self.obstacles.iter().all(|o| o.distance(p) > 0.0)
    }

    /// Nearest boundary point with its distance. Ties go to the first obstacle
    /// in list order; the ambient circle only wins when strictly closer.
    pub fn closest(&self, p: Point) -> Result<Closest> {
        if !self.contains(p) {
            return Err(Error::PointOutsideDomain(p));
        }
        let mut best = Closest {
            dist: f64::INFINITY,
            point: p,
            part: BoundaryPart::Ambient,
        };
        for (k, o) in self.obstacles.iter().enumerate() {
            let d = o.distance(p);
            if d < best.dist {
                best = Closest {
                    dist: d,
                    point: o.nearest(p),
                    part: BoundaryPart::Obstacle(k),
                };
            }
        }
        let v = p - self.center;
        let d = self.radius - v.norm();
        if d < best.dist {
            best = Closest {
                dist: d,
                point: self.ambient_point(v),
                part: BoundaryPart::Ambient,
            };
        }
        Ok(best)
    }

    pub fn dist_to_boundary(&self, p: Point) -> Result<f64> {
        self.closest(p).map(|c| c.dist)
    }

    pub fn nearest_boundary_point(&self, p: Point) -> Result<Point> {
        self.closest(p).map(|c| c.point)
    }

    /// Distance from an arbitrary point to the boundary set (no containment
    /// precondition).
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.distance(p))
            .fold((self.radius - p.dist(self.center)).abs(), f64::min)
    }

    fn ambient_point(&self, v: Point) -> Point {
        let n = v.norm();
        if n == 0.0 {
            self.center + Point::new(self.radius, 0.0)
        } else {
            self.center + v * (self.radius / n)
        }
    }

    pub(crate) fn part_info(&self, k: usize) -> &PartInfo {
        &self.parts[k]
    }

    /// Absorption shell of a boundary part for a given base shell width.
    pub(crate) fn shell(&self, part: BoundaryPart, eps_stop: f64) -> f64 {
        match part {
            BoundaryPart::Ambient => eps_stop,
            BoundaryPart::Obstacle(k) => eps_stop * self.parts[k].shell_factor,
        }
    }

    /// Nearest-boundary query for the point `origin + off`, where `origin` is
    /// either the ambient center or some obstacle's anchor. Returns the
    /// distance, the part, and the offset of the point from that part's
    /// anchor (the ambient center for the outer circle).
    pub(crate) fn probe(&self, origin: Point, off: Point) -> (f64, BoundaryPart, Point) {
        let candidates = self
            .accel
            .as_ref()
            .and_then(|g| g.lookup(origin + off))
            .unwrap_or(&self.all);
        let mut best = f64::INFINITY;
        let mut part = BoundaryPart::Ambient;
        let mut rel = off;
        for &k in candidates {
            let k = k as usize;
            let a = self.parts[k].anchor;
            let v = Point::new((origin.x - a.x) + off.x, (origin.y - a.y) + off.y);
            let d = self.obstacles[k].distance_rel(v);
            if d < best {
                best = d;
                part = BoundaryPart::Obstacle(k);
                rel = v;
            }
        }
        let v = Point::new((origin.x - self.center.x) + off.x, (origin.y - self.center.y) + off.y);
        let d = self.radius - v.norm();
        if d < best {
            best = d;
            part = BoundaryPart::Ambient;
            rel = v;
        }
        (best, part, rel)
    }

    /// Boundary point nearest to the point described by `rel` (as returned by
    /// [`Domain::probe`]) on `part`.
    pub(crate) fn project(&self, part: BoundaryPart, rel: Point) -> Point {
        match part {
            BoundaryPart::Ambient => self.ambient_point(rel),
            BoundaryPart::Obstacle(k) => self.parts[k].anchor + self.obstacles[k].nearest_rel(rel),
        }
    }
}
