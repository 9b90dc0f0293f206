use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{walk_rng, Atom, EmpiricalMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleMethod {
    /// Systematic resampling along a Hilbert-curve ordering of the atoms: one
    /// uniform offset, then evenly spaced picks through the cumulative
    /// weights. Nearby output atoms come from nearby input atoms, which keeps
    /// the transport error of the resampling step far below that of
    /// independent draws.
    #[default]
    Systematic,
    /// Independent draws proportional to weight.
    Multinomial,
}

const HILBERT_ORDER: u32 = 16;

/// Position of cell `(x, y)` along the Hilbert curve filling a
/// `2^16 x 2^16` grid.
pub fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << HILBERT_ORDER;
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Resamples `mu` to `n` atoms of equal weight, preserving total mass.
/// Deterministic given `seed`.
pub fn subsample(mu: &EmpiricalMeasure, n: usize, seed: u64, method: ResampleMethod) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("resample size must be positive".into()));
    }
    if mu.is_empty() {
        return Err(Error::InvalidArgument("cannot resample an empty measure".into()));
    }
    let total = mu.total_weight();
    let mut rng = walk_rng(seed, u64::MAX);
    let atoms = mu.atoms();
    let picks: Vec<usize> = match method {
        ResampleMethod::Systematic => {
            let order = hilbert_order(atoms);
            let offset: f64 = rng.gen();
            let step = total / n as f64;
            let mut picks = Vec::with_capacity(n);
            let mut cum = 0.0;
            let mut k = 0;
            for &i in &order {
                cum += atoms[i].weight;
                while k < n && (k as f64 + offset) * step < cum {
                    picks.push(i);
                    k += 1;
                }
            }
            // Rounding in the running sum can leave the last pick short.
            let last = *order.last().expect("non-empty");
            picks.resize(n, last);
            picks
        }
        ResampleMethod::Multinomial => {
            let mut cum = Vec::with_capacity(atoms.len());
            let mut acc = 0.0;
            for a in atoms {
                acc += a.weight;
                cum.push(acc);
            }
            (0..n)
                .map(|_| {
                    let u = rng.gen::<f64>() * acc;
                    cum.partition_point(|&c| c <= u).min(atoms.len() - 1)
                })
                .collect()
        }
    };
    let w = total / n as f64;
    Ok(EmpiricalMeasure::from_parts(
        picks
            .into_iter()
            .map(|i| Atom {
                point: atoms[i].point,
                weight: w,
            })
            .collect(),
        total,
        None,
        mu.is_degenerate(),
    ))
}

fn hilbert_order(atoms: &[Atom]) -> Vec<usize> {
    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for a in atoms {
        lo_x = lo_x.min(a.point.x);
        lo_y = lo_y.min(a.point.y);
        hi_x = hi_x.max(a.point.x);
        hi_y = hi_y.max(a.point.y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y);
    let cells = f64::from((1u32 << HILBERT_ORDER) - 1);
    let scale = if span > 0.0 { cells / span } else { 0.0 };
    let mut keyed: Vec<(u64, usize)> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let x = ((a.point.x - lo_x) * scale).round() as u32;
            let y = ((a.point.y - lo_y) * scale).round() as u32;
            (hilbert_index(x, y), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn hilbert_visits_every_cell_once_at_small_order() {
        // Top-level quadrant order of the curve: (0,0), (0,1), (1,1), (1,0).
        let h = 1u32 << (HILBERT_ORDER - 1);
        let q: Vec<u64> = [(0, 0), (0, h), (h, h), (h, 0)]
            .iter()
            .map(|&(x, y)| hilbert_index(x, y) / (u64::from(h) * u64::from(h)))
            .collect();
        assert_eq!(q, [0, 1, 2, 3]);
        // Consecutive indices are grid neighbours.
        let mut by_index: Vec<(u64, (u32, u32))> = (0..64u32)
            .flat_map(|x| (0..64u32).map(move |y| (x, y)))
            .map(|(x, y)| (hilbert_index(x, y), (x, y)))
            .collect();
        by_index.sort();
        let sub: Vec<_> = by_index.iter().filter(|(d, _)| *d < 4096).collect();
        assert_eq!(sub.len(), 4096);
        for w in sub.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            assert_eq!(a.0.abs_diff(b.0) + a.1.abs_diff(b.1), 1);
        }
    }

    #[test]
    fn point_mass_gives_copies() {
        let p = EmpiricalMeasure::point_mass(Point::new(0.3, 0.4));
        for method in [ResampleMethod::Systematic, ResampleMethod::Multinomial] {
            let s = subsample(&p, 17, 5, method).unwrap();
            assert_eq!(s.len(), 17);
            assert!(s.atoms().iter().all(|a| a.point == Point::new(0.3, 0.4)));
            assert!((s.total_weight() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_input_of_same_size_is_a_permutation() {
        let pts: Vec<Point> = (0..100).map(|i| Point::polar(1.0, i as f64 * 0.0628)).collect();
        let mu = EmpiricalMeasure::uniform(&pts).unwrap();
        for seed in 0..20 {
            let s = subsample(&mu, 100, seed, ResampleMethod::Systematic).unwrap();
            let mut got: Vec<(u64, u64)> = s.atoms().iter().map(|a| (a.point.x.to_bits(), a.point.y.to_bits())).collect();
            let mut want: Vec<(u64, u64)> = pts.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
            got.sort();
            want.sort();
            assert_eq!(got, want, "seed {seed}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let pts: Vec<Point> = (0..50).map(|i| Point::new(i as f64, (i * i) as f64)).collect();
        let mu = EmpiricalMeasure::uniform(&pts).unwrap();
        for method in [ResampleMethod::Systematic, ResampleMethod::Multinomial] {
            assert_eq!(subsample(&mu, 20, 9, method).unwrap(), subsample(&mu, 20, 9, method).unwrap());
        }
    }
}
