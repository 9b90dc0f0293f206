//! Interior approximations of domains by unions of grid cells.
//!
//! Cells live on a lattice anchored at the origin: cell `(i, j)` is the
//! square `[i h, (i + 1) h] x [j h, (j + 1) h]`, so halving `h` splits every
//! cell into four. A cell passes a clearance threshold when its center lies
//! inside the domain at least that far from the boundary.

mod region_walk;

use std::collections::VecDeque;
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

pub use region_walk::RegionWalker;

pub type Cell = (i64, i64);

/// Cell containing `p` on the lattice of spacing `h`.
pub fn cell_of(p: Point, h: f64) -> Cell {
    ((p.x / h).floor() as i64, (p.y / h).floor() as i64)
}

pub fn cell_center(c: Cell, h: f64) -> Point {
    Point::new((c.0 as f64 + 0.5) * h, (c.1 as f64 + 0.5) * h)
}

const NEIGHBORS_4: [Cell; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const NEIGHBORS_8: [Cell; 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// A rectangular block of lattice cells with row-major dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub h: f64,
    pub lo: Cell,
    pub width: usize,
    pub height: usize,
}

impl Lattice {
    /// Smallest block covering the given disks.
    pub fn covering(h: f64, disks: impl IntoIterator<Item = (Point, f64)>) -> Self {
        let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for (c, r) in disks {
            let a = cell_of(Point::new(c.x - r, c.y - r), h);
            let b = cell_of(Point::new(c.x + r, c.y + r), h);
            lo = (lo.0.min(a.0), lo.1.min(a.1));
            hi = (hi.0.max(b.0), hi.1.max(b.1));
        }
        Lattice {
            h,
            lo,
            width: (hi.0 - lo.0 + 1) as usize,
            height: (hi.1 - lo.1 + 1) as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, c: Cell) -> Option<usize> {
        let (di, dj) = (c.0 - self.lo.0, c.1 - self.lo.1);
        (di >= 0 && dj >= 0 && (di as usize) < self.width && (dj as usize) < self.height)
            .then(|| dj as usize * self.width + di as usize)
    }

    pub fn cell(&self, k: usize) -> Cell {
        (self.lo.0 + (k % self.width) as i64, self.lo.1 + (k / self.width) as i64)
    }

    /// Clearance of every cell center in `dom`: distance to the boundary
    /// for centers inside the domain, zero otherwise.
    pub fn clearance(&self, dom: &Domain) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|k| {
                let p = cell_center(self.cell(k), self.h);
                if dom.contains(p) {
                    dom.boundary_distance(p)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// 4-connected component of passing cells containing `start`.
    pub fn flood(&self, start: Cell, pass: impl Fn(usize) -> bool) -> Vec<Cell> {
        let Some(s) = self.index(start) else {
            return Vec::new();
        };
        if !pass(s) {
            return Vec::new();
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[s] = true;
        let mut out = Vec::new();
        while let Some(c) = queue.pop_front() {
            out.push(c);
            for d in NEIGHBORS_4 {
                let n = (c.0 + d.0, c.1 + d.1);
                if let Some(k) = self.index(n) {
                    if !seen[k] && pass(k) {
                        seen[k] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// A 4-connected union of closed lattice cells containing a marked cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRegion {
    pub origin: Point,
    pub h: f64,
    pub marked: Cell,
    /// Sorted, without duplicates.
    pub cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct RegionHeader {
    origin: Point,
    h: f64,
    marked: Cell,
}

impl GridRegion {
    pub fn new(h: f64, marked: Cell, mut cells: Vec<Cell>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        GridRegion {
            origin: Point::ORIGIN,
            h,
            marked,
            cells,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    /// Cells with at least one of their eight neighbours outside the region.
    pub fn boundary_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .copied()
            .filter(|c| NEIGHBORS_8.iter().any(|d| !self.contains_cell((c.0 + d.0, c.1 + d.1))))
            .collect()
    }

    pub fn is_4_connected(&self) -> bool {
        if self.cells.is_empty() {
            return false;
        }
        let lattice = Lattice::covering(
            self.h,
            self.cells.iter().map(|&c| (cell_center(c, self.h), self.h)),
        );
        let mut mask = vec![false; lattice.len()];
        for &c in &self.cells {
            mask[lattice.index(c).expect("covered")] = true;
        }
        lattice.flood(self.marked, |k| mask[k]).len() == self.cells.len()
    }

    pub fn area(&self) -> f64 {
        self.cells.len() as f64 * self.h * self.h
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header = RegionHeader {
            origin: self.origin,
            h: self.h,
            marked: self.marked,
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j"])?;
        for c in &self.cells {
            w.write_record([c.0.to_string(), c.1.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let bad = |reason: String| Error::Format {
            path: "<region csv>".into(),
            reason,
        };
        let json = first
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| bad("missing `# {...}` header line".into()))?;
        let header: RegionHeader = serde_json::from_str(json.trim())?;
        let mut rdr = csv::Reader::from_reader(reader);
        let mut cells = Vec::new();
        for rec in rdr.deserialize::<(i64, i64)>() {
            cells.push(rec?);
        }
        let mut r = GridRegion::new(header.h, header.marked, cells);
        r.origin = header.origin;
        Ok(r)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

fn check_grid(delta: f64, h: f64) -> Result<()> {
    if !(delta > 0.0 && h > 0.0 && h <= delta / 4.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < h <= delta / 4, got h = {h}, delta = {delta}"
        )));
    }
    Ok(())
}

/// Component containing `w`'s cell of all cells whose centers have
/// clearance at least `delta / 2` in `dom`.
pub fn interior_region(dom: &Domain, w: Point, delta: f64, h: f64) -> Result<GridRegion> {
    check_grid(delta, h)?;
    if !dom.contains(w) {
        return Err(Error::PointOutsideDomain(w));
    }
    let lattice = Lattice::covering(h, [(dom.ambient_center(), dom.ambient_radius())]);
    let field = lattice.clearance(dom);
    region_from_field(&lattice, w, |k| field[k] >= delta / 2.0)
}

pub(crate) fn region_from_field(lattice: &Lattice, w: Point, pass: impl Fn(usize) -> bool) -> Result<GridRegion> {
    let start = cell_of(w, lattice.h);
    let cells = lattice.flood(start, pass);
    if cells.is_empty() {
        return Err(Error::EmptyRegion(format!(
            "the cell of {w} does not meet the clearance threshold"
        )));
    }
    Ok(GridRegion::new(lattice.h, start, cells))
}

/// Clearance fields of a limit domain and a finite sequence on one lattice,
/// with running minima over every tail of the sequence.
pub struct GridFamily {
    pub lattice: Lattice,
    pub limit: Vec<f64>,
    pub members: Vec<Vec<f64>>,
    /// `tail_min[k]` = cellwise minimum over `members[k..]`.
    pub tail_min: Vec<Vec<f64>>,
}

impl GridFamily {
    pub fn new(limit: &Domain, seq: &[Domain], h: f64) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::InvalidArgument("domain sequence is empty".into()));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        let lattice = Lattice::covering(
            h,
            std::iter::once(limit)
                .chain(seq)
                .map(|d| (d.ambient_center(), d.ambient_radius())),
        );
        let limit_field = lattice.clearance(limit);
        let members: Vec<Vec<f64>> = seq.iter().map(|d| lattice.clearance(d)).collect();
        let mut tail_min = vec![Vec::new(); members.len()];
        let mut acc = vec![f64::INFINITY; lattice.len()];
        for k in (0..members.len()).rev() {
            for (a, v) in acc.iter_mut().zip(&members[k]) {
                *a = a.min(*v);
            }
            tail_min[k] = acc.clone();
        }
        Ok(GridFamily {
            lattice,
            limit: limit_field,
            members,
            tail_min,
        })
    }

    /// Fields of a sequence alone; the limit field is unconstrained
    /// (infinite clearance everywhere).
    pub fn of_sequence(seq: &[Domain], h: f64) -> Result<Self> {
        let first = seq
            .first()
            .ok_or_else(|| Error::InvalidArgument("domain sequence is empty".into()))?;
        let mut family = Self::new(first, seq, h)?;
        family.limit.fill(f64::INFINITY);
        Ok(family)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// 0-based index of the latest tail start leaving at least `min_tail`
    /// members.
    pub fn last_tail(&self, min_tail: usize) -> usize {
        self.len().saturating_sub(min_tail.max(1))
    }
}

/// Outcome of the common interior approximation search at one `epsilon`.
/// Verdicts only see the supplied finite prefix of the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorApproxVerdict {
    pub epsilon: f64,
    /// 1-based position in the sequence where the accepted tail starts
    /// (or where the best failed attempt started).
    pub tail_start: usize,
    pub region: GridRegion,
    pub ok: bool,
    /// Largest upper bound, over boundary cells and checked domains, on the
    /// distance from a point of the cell to that domain's boundary.
    pub worst_boundary_gap: f64,
}

/// Searches the earliest tail of `seq` admitting a grid region that lies in
/// the limit and every tail member, contains `w`, and whose boundary cells
/// are within `epsilon` of all their boundaries.
pub fn common_interior_approximation(
    limit: &Domain,
    seq: &[Domain],
    w: Point,
    epsilon: f64,
    h: f64,
) -> Result<InteriorApproxVerdict> {
    check_grid(epsilon, h)?;
    if !limit.contains(w) {
        return Err(Error::PointOutsideDomain(w));
    }
    let family = GridFamily::new(limit, seq, h)?;
    common_interior_on(&family, w, epsilon)
}

/// [`common_interior_approximation`] on precomputed clearance fields.
pub fn common_interior_on(family: &GridFamily, w: Point, epsilon: f64) -> Result<InteriorApproxVerdict> {
    let lattice = &family.lattice;
    check_grid(epsilon, lattice.h)?;
    let slack = lattice.h * FRAC_1_SQRT_2;
    let mut best: Option<InteriorApproxVerdict> = None;
    let mut last_err = None;
    for k in 0..family.len() {
        let tail = &family.tail_min[k];
        let threshold = epsilon / 2.0;
        let region = match region_from_field(lattice, w, |c| family.limit[c] >= threshold && tail[c] >= threshold) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let mut worst: f64 = 0.0;
        for c in region.boundary_cells() {
            let idx = lattice.index(c).expect("region lies on the lattice");
            worst = worst.max(family.limit[idx]);
            for m in &family.members[k..] {
                worst = worst.max(m[idx]);
            }
        }
        let gap = worst + slack;
        let verdict = InteriorApproxVerdict {
            epsilon,
            tail_start: k + 1,
            region,
            ok: gap < epsilon,
            worst_boundary_gap: gap,
        };
        if verdict.ok {
            return Ok(verdict);
        }
        if best.as_ref().map_or(true, |b| verdict.worst_boundary_gap < b.worst_boundary_gap) {
            best = Some(verdict);
        }
    }
    best.ok_or_else(|| last_err.expect("at least one tail was tried"))
}

/// Whether the common interior verdicts for basepoints `w` and `w2` agree.
pub fn basepoint_transfer_check(
    limit: &Domain,
    seq: &[Domain],
    w: Point,
    w2: Point,
    epsilon: f64,
    h: f64,
) -> Result<bool> {
    for p in [w, w2] {
        if !limit.contains(p) {
            return Err(Error::PointOutsideDomain(p));
        }
    }
    let family = GridFamily::new(limit, seq, h)?;
    let ok = |p| common_interior_on(&family, p, epsilon).map(|v| v.ok).or_else(empty_is_false);
    Ok(ok(w)? == ok(w2)?)
}

pub(crate) fn empty_is_false(e: Error) -> Result<bool> {
    match e {
        Error::EmptyRegion(_) => Ok(false),
        other => Err(other),
    }
}
