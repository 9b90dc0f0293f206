use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Obstacle, Point};
use crate::sampler::{derive_seed, obstacle_hits, Estimate, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeurlingResult {
    /// Harmonic measure of the set from `z` in the disk minus the set.
    pub lhs: Estimate,
    /// Harmonic measure of the projected set from `-|z|`.
    pub rhs: Estimate,
    pub holds: bool,
}

/// Radial intervals `[min |w|, max |w|]` of the obstacles, merged and sorted.
pub fn circular_projection(set: &[Obstacle]) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = set.iter().map(|o| o.radial_range(Point::ORIGIN)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

fn obstacle_mass(dom: &Domain, start: Point, cfg: &WalkConfig) -> Result<Estimate> {
    let (hits, walks) = obstacle_hits(dom, start, cfg)?;
    Ok(Estimate::from_count(hits, walks))
}

/// Monte Carlo comparison of the set's harmonic measure from `z` against
/// that of its circular projection laid on the positive real axis, seen
/// from `-|z|`.
pub fn beurling_check(set: &[Obstacle], z: Point, cfg: &WalkConfig) -> Result<BeurlingResult> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("the set needs at least one obstacle".into()));
    }
    if set.iter().any(|o| o.distance(Point::ORIGIN) == 0.0) {
        return Err(Error::InvalidObstacle("the set must avoid the origin".into()));
    }
    let dom = Domain::new(Point::ORIGIN, 1.0, set.to_vec(), "beurling")?;
    if !dom.contains(z) {
        return Err(Error::PointOutsideDomain(z));
    }
    let projected: Vec<Obstacle> = circular_projection(set)
        .into_iter()
        .filter(|(lo, hi)| hi > lo && *lo < 1.0)
        .map(|(lo, hi)| Obstacle::segment(Point::new(lo, 0.0), Point::new(hi.min(1.0), 0.0)))
        .collect::<Result<_>>()?;
    let lhs = obstacle_mass(&dom, z, &cfg.with_seed(derive_seed(cfg.seed, 1)))?;
    let rhs = if projected.is_empty() {
        Estimate::from_count(0, cfg.n_samples)
    } else {
        let star = Domain::new(Point::ORIGIN, 1.0, projected, "beurling-projection")?;
        obstacle_mass(&star, Point::new(-z.norm(), 0.0), &cfg.with_seed(derive_seed(cfg.seed, 2)))?
    };
    let se = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt();
    Ok(BeurlingResult {
        lhs,
        rhs,
        holds: lhs.value >= rhs.value - 2.0 * se,
    })
}
