use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Obstacle, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessOptions {
    /// Points sampled along each obstacle.
    pub samples_per_obstacle: usize,
    /// Radii `diam * 2^-j` for `j` in `0..levels`.
    pub levels: u32,
    /// Largest ring ratio a pass tolerates.
    pub threshold: f64,
}

impl Default for PerfectnessOptions {
    fn default() -> Self {
        PerfectnessOptions {
            samples_per_obstacle: 16,
            levels: 48,
            threshold: 16.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingWitness {
    pub center: Point,
    pub inner: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessEstimate {
    /// Largest ratio `C` of an annulus `r <= |y - x| < C r` about a point of
    /// the set that misses the set while some of it lies outside.
    pub sup_ratio: f64,
    pub witness: Option<RingWitness>,
    pub pass: bool,
}

/// Ratio of the widest empty annulus about `x` with inner radius `r`,
/// given the radial ranges of every obstacle seen from `x`.
fn ring_ratio(ranges: &[(f64, f64)], r: f64) -> Option<f64> {
    let mut ratio = f64::INFINITY;
    let mut escapes = false;
    for &(lo, hi) in ranges {
        if hi >= r {
            escapes = true;
            ratio = ratio.min(lo.max(r) / r);
        }
    }
    escapes.then_some(ratio)
}

/// Searches dyadic radii about sampled points of `set` for separating ring
/// domains, and reports the largest ratio found.
pub fn estimate_uniform_perfectness(set: &[Obstacle], opts: &PerfectnessOptions) -> Result<PerfectnessEstimate> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("the set needs at least one obstacle".into()));
    }
    let points: Vec<Point> = set.iter().flat_map(|o| o.sample_points(opts.samples_per_obstacle)).collect();
    let diam = points
        .iter()
        .flat_map(|&x| set.iter().map(move |o| o.radial_range(x).1))
        .fold(0.0, f64::max);
    if !(diam > 0.0) {
        return Err(Error::InvalidArgument("the set is a single point".into()));
    }
    let mut best: Option<RingWitness> = None;
    for &x in &points {
        let ranges: Vec<(f64, f64)> = set.iter().map(|o| o.radial_range(x)).collect();
        for j in 0..opts.levels {
            let r = diam * 0.5f64.powi(j as i32);
            if let Some(ratio) = ring_ratio(&ranges, r) {
                if best.map_or(true, |b| ratio > b.ratio) {
                    best = Some(RingWitness {
                        center: x,
                        inner: r,
                        ratio,
                    });
                }
            }
        }
    }
    let sup_ratio = best.map_or(1.0, |b| b.ratio);
    Ok(PerfectnessEstimate {
        sup_ratio,
        witness: best,
        pass: sup_ratio < opts.threshold,
    })
}
