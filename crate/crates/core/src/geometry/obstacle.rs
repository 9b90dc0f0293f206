//! Obstacle primitives removed from the ambient disk.
//!
//! Every primitive answers its queries in coordinates relative to its own
//! anchor point (disk/arc center, segment midpoint, polygon vertex centroid).
//! Walks that wander close to a very small obstacle are tracked in that local
//! frame, so distances far below `f64` resolution at the anchor's absolute
//! position stay meaningful.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A closed line segment stored as midpoint, unit direction and half-length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    mid: Point,
    dir: Point,
    half: f64,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidObstacle("segment endpoints must be finite".into()));
        }
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            return Err(Error::InvalidObstacle("segment endpoints coincide".into()));
        }
        Ok(Segment {
            mid: Point::new(a.x + 0.5 * d.x, a.y + 0.5 * d.y),
            dir: d * (1.0 / len),
            half: 0.5 * len,
        })
    }

    /// Segment centered at `mid` along direction angle `theta`, spanning
    /// `mid ± half_length * (cos theta, sin theta)`. Unlike [`Segment::new`]
    /// this keeps full precision for segments far shorter than the float
    /// spacing at `mid`.
    pub fn centered(mid: Point, theta: f64, half_length: f64) -> Result<Self> {
        if !mid.is_finite() || !theta.is_finite() || !half_length.is_finite() {
            return Err(Error::InvalidObstacle("segment parameters must be finite".into()));
        }
        if half_length <= 0.0 {
            return Err(Error::InvalidObstacle("segment half-length must be positive".into()));
        }
        Ok(Segment {
            mid,
            dir: Point::polar(1.0, theta),
            half: half_length,
        })
    }

    pub fn mid(&self) -> Point {
        self.mid
    }

    pub fn direction(&self) -> Point {
        self.dir
    }

    pub fn half_length(&self) -> f64 {
        self.half
    }

    pub fn a(&self) -> Point {
        self.mid - self.dir * self.half
    }

    pub fn b(&self) -> Point {
        self.mid + self.dir * self.half
    }

    /// Nearest point to `v`, both relative to the midpoint.
    fn nearest_rel(&self, v: Point) -> Point {
        let t = v.dot(self.dir).clamp(-self.half, self.half);
        self.dir * t
    }

    fn distance_rel(&self, v: Point) -> f64 {
        (v - self.nearest_rel(v)).norm()
    }

    fn distance(&self, p: Point) -> f64 {
        self.distance_rel(p - self.mid)
    }

    fn nearest(&self, p: Point) -> Point {
        self.mid + self.nearest_rel(p - self.mid)
    }
}

/// A closed polygon (its boundary curve, plus the interior when `filled`).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    filled: bool,
    centroid: Point,
    /// Edges relative to `centroid`.
    edges: Vec<Segment>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>, filled: bool) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidObstacle("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidObstacle("polygon vertices must be finite".into()));
        }
        let centroid = vertices.iter().fold(Point::ORIGIN, |acc, &v| acc + v) * (1.0 / n as f64);
        let rel: Vec<Point> = vertices.iter().map(|&v| v - centroid).collect();
        let scale = rel.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let area2: f64 = (0..n).map(|i| rel[i].cross(rel[(i + 1) % n])).sum();
        if area2.abs() <= 1e-12 * scale * scale {
            return Err(Error::InvalidObstacle("polygon vertices are collinear".into()));
        }
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            edges.push(Segment::new(rel[i], rel[(i + 1) % n]).map_err(|_| {
                Error::InvalidObstacle(format!("polygon has repeated vertex at index {i}"))
            })?);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && segments_intersect(&edges[i], &edges[j]) {
                    return Err(Error::InvalidObstacle(format!(
                        "polygon is not simple: edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(Polygon {
            vertices,
            filled,
            centroid,
            edges,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn filled(&self) -> bool {
        self.filled
    }

    fn nearest_rel(&self, v: Point) -> Point {
        let mut best = f64::INFINITY;
        let mut out = v;
        for e in &self.edges {
            let d = e.distance(v);
            if d < best {
                best = d;
                out = e.nearest(v);
            }
        }
        out
    }

    fn distance_rel(&self, v: Point) -> f64 {
        self.edges
            .iter()
            .map(|e| e.distance(v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Strict interior test (crossing number).
    fn encloses_rel(&self, v: Point) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i] - self.centroid;
            let b = self.vertices[(i + 1) % n] - self.centroid;
            if (a.y > v.y) != (b.y > v.y) {
                let x = a.x + (v.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if v.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// A closed circular arc: the circle `center + radius * e^{i theta}` minus
/// an open gap of half-angle `half_gap` centered on direction `gap_dir`.
/// Storing the gap rather than the angular range keeps nearly closed arcs
/// exact, even when the gap is far below the float spacing of `pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    center: Point,
    radius: f64,
    gap_dir: Point,
    half_gap: f64,
    /// Endpoints at `theta_min` and `theta_max`, relative to the center.
    ends: [Point; 2],
}

impl Arc {
    /// Arc over `theta_min <= theta <= theta_max`.
    pub fn new(center: Point, radius: f64, theta_min: f64, theta_max: f64) -> Result<Self> {
        if !theta_min.is_finite() || !theta_max.is_finite() || !(theta_min < theta_max) || theta_max - theta_min >= TAU {
            return Err(Error::InvalidObstacle(format!(
                "arc angles must satisfy theta_min < theta_max < theta_min + 2pi, got [{theta_min}, {theta_max}]"
            )));
        }
        let half_gap = 0.5 * (TAU - (theta_max - theta_min));
        let mut arc = Self::with_gap(center, radius, Point::polar(1.0, theta_max + half_gap), half_gap)?;
        arc.ends = [Point::polar(radius, theta_min), Point::polar(radius, theta_max)];
        Ok(arc)
    }

    /// Arc missing the open angular interval of half-width `half_gap`
    /// around direction `gap_dir` (any non-zero vector).
    pub fn with_gap(center: Point, radius: f64, gap_dir: Point, half_gap: f64) -> Result<Self> {
        if !center.is_finite() || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidObstacle("arc needs a finite center and positive radius".into()));
        }
        let len = gap_dir.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidObstacle("arc gap direction must be a finite non-zero vector".into()));
        }
        if !(half_gap > 0.0 && half_gap < std::f64::consts::PI) {
            return Err(Error::InvalidObstacle(format!(
                "arc gap half-angle must lie in (0, pi), got {half_gap}"
            )));
        }
        let mut arc = Arc {
            center,
            radius,
            gap_dir: gap_dir * (1.0 / len),
            half_gap,
            ends: [Point::ORIGIN; 2],
        };
        arc.ends = [arc.at(half_gap), arc.at(-half_gap)];
        Ok(arc)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn gap_direction(&self) -> Point {
        self.gap_dir
    }

    pub fn half_gap(&self) -> f64 {
        self.half_gap
    }

    pub fn theta_min(&self) -> f64 {
        self.gap_dir.angle() + self.half_gap
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_min() + (TAU - 2.0 * self.half_gap)
    }

    /// Point at angle `t` past the gap direction, relative to the center.
    fn at(&self, t: f64) -> Point {
        let (s, c) = t.sin_cos();
        (self.gap_dir * c + self.gap_dir.perp() * s) * self.radius
    }

    /// Endpoints relative to the center, at `theta_min` and `theta_max`.
    fn endpoints_rel(&self) -> (Point, Point) {
        (self.ends[0], self.ends[1])
    }

    /// Whether direction `v` (from the center) points into the closed arc.
    fn spans(&self, v: Point) -> bool {
        let phi = self.gap_dir.cross(v).atan2(self.gap_dir.dot(v));
        phi.abs() >= self.half_gap
    }

    fn nearest_rel(&self, v: Point) -> Point {
        let n = v.norm();
        if n == 0.0 {
            return self.gap_dir * (-self.radius);
        }
        if self.spans(v) {
            return v * (self.radius / n);
        }
        let (e0, e1) = self.endpoints_rel();
        if (v - e1).norm() < (v - e0).norm() {
            e1
        } else {
            e0
        }
    }

    fn sample_points(&self, k: usize) -> Vec<Point> {
        let span = TAU - 2.0 * self.half_gap;
        (0..k)
            .map(|i| self.center + self.at(self.half_gap + span * i as f64 / (k - 1) as f64))
            .collect()
    }
}

fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let (p1, p2, q1, q2) = (s.a(), s.b(), t.a(), t.b());
    let o = |a: Point, b: Point, c: Point| (b - a).cross(c - a);
    let d1 = o(q1, q2, p1);
    let d2 = o(q1, q2, p2);
    let d3 = o(p1, p2, q1);
    let d4 = o(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Touching / collinear overlap.
    s.distance(q1) == 0.0 || s.distance(q2) == 0.0 || t.distance(p1) == 0.0 || t.distance(p2) == 0.0
}

/// A geometric primitive removed from the ambient disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    /// Closed disk.
    Disk { center: Point, radius: f64 },
    Segment(Segment),
    Arc(Arc),
    Polygon(Polygon),
}

impl Obstacle {
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidObstacle(format!(
                "disk needs a finite center and positive radius, got radius {radius}"
            )));
        }
        Ok(Obstacle::Disk { center, radius })
    }

    pub fn segment(a: Point, b: Point) -> Result<Self> {
        Segment::new(a, b).map(Obstacle::Segment)
    }

    pub fn arc(center: Point, radius: f64, theta_min: f64, theta_max: f64) -> Result<Self> {
        Arc::new(center, radius, theta_min, theta_max).map(Obstacle::Arc)
    }

    pub fn polygon(vertices: Vec<Point>, filled: bool) -> Result<Self> {
        Polygon::new(vertices, filled).map(Obstacle::Polygon)
    }

    /// Reference point for local coordinates.
    pub fn anchor(&self) -> Point {
        match self {
            Obstacle::Disk { center, .. } => *center,
            Obstacle::Arc(a) => a.center,
            Obstacle::Segment(s) => s.mid,
            Obstacle::Polygon(p) => p.centroid,
        }
    }

    /// Radius of the smallest anchor-centered disk containing the obstacle.
    pub fn scale(&self) -> f64 {
        match self {
            Obstacle::Disk { radius, .. } => *radius,
            Obstacle::Arc(a) => a.radius,
            Obstacle::Segment(s) => s.half,
            Obstacle::Polygon(p) => p
                .vertices
                .iter()
                .map(|v| v.dist(p.centroid))
                .fold(0.0, f64::max),
        }
    }

    /// Distance from `anchor + v` to the obstacle.
    pub fn distance_rel(&self, v: Point) -> f64 {
        match self {
            Obstacle::Disk { radius, .. } => (v.norm() - radius).max(0.0),
            Obstacle::Segment(s) => s.distance_rel(v),
            Obstacle::Arc(a) => (v - a.nearest_rel(v)).norm(),
            Obstacle::Polygon(p) => {
                if p.filled && p.encloses_rel(v) {
                    0.0
                } else {
                    p.distance_rel(v)
                }
            }
        }
    }

    /// Nearest obstacle point to `anchor + v`, relative to the anchor.
    pub fn nearest_rel(&self, v: Point) -> Point {
        match self {
            Obstacle::Disk { radius, .. } => {
                let n = v.norm();
                if n == 0.0 {
                    Point::new(*radius, 0.0)
                } else {
                    v * (radius / n)
                }
            }
            Obstacle::Segment(s) => s.nearest_rel(v),
            Obstacle::Arc(a) => a.nearest_rel(v),
            Obstacle::Polygon(p) => p.nearest_rel(v),
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.distance_rel(p - self.anchor())
    }

    pub fn nearest(&self, p: Point) -> Point {
        self.anchor() + self.nearest_rel(p - self.anchor())
    }

    /// Whether `p` lies in the removed set (the closed obstacle).
    pub fn covers(&self, p: Point) -> bool {
        self.distance(p) == 0.0
    }

    /// Range `[min, max]` of `|y - x|` over points `y` of the obstacle.
    /// The obstacle is connected, so every value in between is attained.
    pub fn radial_range(&self, x: Point) -> (f64, f64) {
        let dmin = self.distance(x);
        let dmax = match self {
            Obstacle::Disk { center, radius } => x.dist(*center) + radius,
            Obstacle::Segment(s) => x.dist(s.a()).max(x.dist(s.b())),
            Obstacle::Arc(a) => {
                let rel = a.center - x;
                if rel.norm() == 0.0 || a.spans(rel) {
                    rel.norm() + a.radius
                } else {
                    let (e0, e1) = a.endpoints_rel();
                    (rel + e0).norm().max((rel + e1).norm())
                }
            }
            Obstacle::Polygon(p) => p.vertices.iter().map(|v| x.dist(*v)).fold(0.0, f64::max),
        };
        (dmin, dmax)
    }

    /// `k` points spread along the obstacle's curve (its outline for disks).
    pub fn sample_points(&self, k: usize) -> Vec<Point> {
        let k = k.max(2);
        match self {
            Obstacle::Disk { center, radius } => (0..k)
                .map(|i| *center + Point::polar(*radius, TAU * i as f64 / k as f64))
                .collect(),
            Obstacle::Segment(s) => (0..k)
                .map(|i| {
                    let t = -1.0 + 2.0 * i as f64 / (k - 1) as f64;
                    s.mid + s.dir * (t * s.half)
                })
                .collect(),
            Obstacle::Arc(a) => a.sample_points(k),
            Obstacle::Polygon(p) => {
                let n = p.vertices.len();
                let lengths: Vec<f64> = (0..n).map(|i| 2.0 * p.edges[i].half).collect();
                let total: f64 = lengths.iter().sum();
                (0..k)
                    .map(|i| {
                        let mut s = total * i as f64 / k as f64;
                        let mut e = 0;
                        while e + 1 < n && s > lengths[e] {
                            s -= lengths[e];
                            e += 1;
                        }
                        let a = p.vertices[e];
                        let b = p.vertices[(e + 1) % n];
                        a + (b - a) * (s / lengths[e]).min(1.0)
                    })
                    .collect()
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Obstacle::Disk { .. } => "disk",
            Obstacle::Segment(_) => "segment",
            Obstacle::Arc(_) => "arc",
            Obstacle::Polygon(_) => "polygon",
        }
    }
}
