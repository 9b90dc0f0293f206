use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{derive_seed, first_hit_tail_probability, WalkConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegularityOptions {
    /// Boundary points per domain that probes are grown from.
    pub boundary_points: usize,
    /// Probe directions around each boundary point.
    pub directions: usize,
    /// Halvings of `epsilon` tried after the first candidate `delta`.
    pub max_halvings: u32,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions {
            boundary_points: 32,
            directions: 8,
            max_halvings: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    pub delta: f64,
    pub epsilon_found: Option<f64>,
    /// Smallest local mass seen at the accepted level, or at the last level
    /// tried when none was accepted.
    pub min_local_mass: f64,
    /// Probe points at that level.
    pub sample_points: usize,
}

/// Boundary points of `dom`: the ambient circle and each obstacle share
/// the budget round-robin.
fn boundary_samples(dom: &Domain, budget: usize) -> Vec<Point> {
    let parts = dom.obstacles().len() + 1;
    let per = (budget / parts).max(2);
    let (c, r) = (dom.ambient_center(), dom.ambient_radius());
    let mut out: Vec<Point> = (0..per)
        .map(|i| c + Point::polar(r, TAU * i as f64 / per as f64))
        .collect();
    for o in dom.obstacles() {
        out.extend(o.sample_points(per));
    }
    out
}

fn probes(dom: &Domain, epsilon: f64, opts: &RegularityOptions) -> Vec<Point> {
    let mut out = Vec::new();
    for b in boundary_samples(dom, opts.boundary_points) {
        for j in 0..opts.directions {
            let z = b + Point::polar(epsilon / 2.0, TAU * (j as f64 + 0.5) / opts.directions as f64);
            if !dom.contains(z) {
                continue;
            }
            let d = dom.boundary_distance(z);
            if d > 0.0 && d < epsilon {
                out.push(z);
            }
        }
    }
    out
}

/// Scans `epsilon = delta, delta/2, ...` for the first level at which every
/// probe `z` within `epsilon` of a member's boundary puts harmonic mass above
/// `1 - delta` (by two standard errors) on the boundary within `delta` of `z`.
pub fn estimate_uniform_regularity(
    seq: &[Domain],
    delta: f64,
    cfg: &WalkConfig,
    opts: &RegularityOptions,
) -> Result<RegularityEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if seq.is_empty() {
        return Err(Error::InvalidArgument("domain sequence is empty".into()));
    }
    let mut last = RegularityEstimate {
        delta,
        epsilon_found: None,
        min_local_mass: 1.0,
        sample_points: 0,
    };
    for level in 0..=opts.max_halvings {
        let epsilon = delta * 0.5f64.powi(level as i32);
        let mut worst = f64::INFINITY;
        let mut accepted = true;
        let mut count = 0;
        for (k, dom) in seq.iter().enumerate() {
            for (i, z) in probes(dom, epsilon, opts).into_iter().enumerate() {
                let seed = derive_seed(derive_seed(cfg.seed, level as u64), ((k as u64) << 32) | i as u64);
                let tail = first_hit_tail_probability(dom, z, delta, &cfg.with_seed(seed))?;
                let local = 1.0 - tail.value;
                worst = worst.min(local);
                if local - 2.0 * tail.stderr <= 1.0 - delta {
                    accepted = false;
                }
                count += 1;
            }
        }
        last = RegularityEstimate {
            delta,
            epsilon_found: None,
            min_local_mass: if count == 0 { 1.0 } else { worst },
            sample_points: count,
        };
        if accepted && count > 0 {
            last.epsilon_found = Some(epsilon);
            return Ok(last);
        }
    }
    Ok(last)
}
