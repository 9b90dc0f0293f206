//! Brownian first-hit sampling by walk-on-spheres.

mod measure;
mod walk;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPart, Point};

pub use measure::{Atom, EmpiricalMeasure, SampleMeta};
pub(crate) use walk::mobius_exit;

pub type WalkRng = ChaCha8Rng;

/// Random stream of walk `index` under master seed `seed`.
pub fn walk_rng(seed: u64, index: u64) -> WalkRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a tag into a seed (splitmix64 finalizer), for deriving independent
/// seeds for replicates, family members and so on.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkConfig {
    /// Absorption shell width, in the same units as the domain.
    pub eps_stop: f64,
    pub max_steps: u64,
    pub seed: u64,
    pub n_samples: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            eps_stop: 1e-6,
            max_steps: 1_000_000,
            seed: 0,
            n_samples: 100_000,
        }
    }
}

impl WalkConfig {
    /// Defaults scaled to a domain of the given ambient radius.
    pub fn for_radius(radius: f64) -> Self {
        WalkConfig {
            eps_stop: 1e-6 * radius,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        WalkConfig { seed, ..self }
    }

    pub fn with_samples(self, n_samples: usize) -> Self {
        WalkConfig { n_samples, ..self }
    }

    pub fn validate(&self, length_scale: f64) -> Result<()> {
        if !(self.eps_stop > 0.0 && self.eps_stop < length_scale) {
            return Err(Error::InvalidArgument(format!(
                "eps_stop must lie in (0, {length_scale}), got {}",
                self.eps_stop
            )));
        }
        if self.max_steps < 1000 {
            return Err(Error::InvalidArgument(format!(
                "max_steps must be at least 1000, got {}",
                self.max_steps
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkEnd {
    /// Absorbed at a boundary point. Regions without named parts report
    /// [`BoundaryPart::Ambient`].
    Hit {
        point: Point,
        part: BoundaryPart,
        steps: u64,
    },
    TimedOut {
        steps: u64,
    },
}

impl WalkEnd {
    pub fn point(&self) -> Option<Point> {
        match self {
            WalkEnd::Hit { point, .. } => Some(*point),
            WalkEnd::TimedOut { .. } => None,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            WalkEnd::Hit { steps, .. } | WalkEnd::TimedOut { steps } => *steps,
        }
    }
}

/// Anything a single absorbed Brownian path can be simulated in.
pub trait FirstHit: Sync {
    fn check_start(&self, start: Point) -> Result<()>;

    /// Typical size of the region, used to validate `eps_stop`.
    fn length_scale(&self) -> f64;

    fn first_hit(&self, start: Point, cfg: &WalkConfig, rng: &mut WalkRng) -> WalkEnd;
}

/// Runs `cfg.n_samples` walks from `start`, returned in walk-index order.
pub fn run_walks<B: FirstHit + ?Sized>(region: &B, start: Point, cfg: &WalkConfig) -> Result<Vec<WalkEnd>> {
    cfg.validate(region.length_scale())?;
    region.check_start(start)?;
    Ok((0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_rng(cfg.seed, i);
            region.first_hit(start, cfg, &mut rng)
        })
        .collect())
}

/// Empirical harmonic measure of `region` seen from `start`.
pub fn sample_harmonic_measure<B: FirstHit + ?Sized>(
    region: &B,
    start: Point,
    cfg: &WalkConfig,
) -> Result<EmpiricalMeasure> {
    let ends = run_walks(region, start, cfg)?;
    Ok(measure_from_walks(&ends, cfg))
}

/// Collects hit points into a measure with weight `1 / n_samples` each.
pub fn measure_from_walks(ends: &[WalkEnd], cfg: &WalkConfig) -> EmpiricalMeasure {
    let n = ends.len();
    let w = 1.0 / n as f64;
    let atoms: Vec<Atom> = ends
        .iter()
        .filter_map(|e| e.point())
        .map(|point| Atom { point, weight: w })
        .collect();
    let hits = atoms.len();
    let degenerate = n > 0 && ends.iter().all(|e| e.steps() == 0 && e.point().is_some());
    EmpiricalMeasure::from_parts(
        atoms,
        hits as f64 / n as f64,
        Some(SampleMeta {
            seed: cfg.seed,
            eps_stop: cfg.eps_stop,
            n_samples: n,
            timed_out: n - hits,
        }),
        degenerate,
    )
}

/// Monte Carlo estimate of a probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_count(successes: usize, n: usize) -> Self {
        let p = successes as f64 / n as f64;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }
}

/// Probability that the path from `start` is absorbed at distance at least
/// `eta` from `start`. Timed-out walks count as not reaching the boundary.
pub fn first_hit_tail_probability<B: FirstHit + ?Sized>(
    region: &B,
    start: Point,
    eta: f64,
    cfg: &WalkConfig,
) -> Result<Estimate> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
    }
    let ends = run_walks(region, start, cfg)?;
    let far = ends
        .iter()
        .filter_map(|e| e.point())
        .filter(|p| p.dist(start) >= eta)
        .count();
    Ok(Estimate::from_count(far, ends.len()))
}

/// Number of walks from `start` absorbed on an obstacle, out of all walks.
pub fn obstacle_hits<B: FirstHit + ?Sized>(region: &B, start: Point, cfg: &WalkConfig) -> Result<(usize, usize)> {
    let ends = run_walks(region, start, cfg)?;
    let hits = ends
        .iter()
        .filter(|e| {
            matches!(
                e,
                WalkEnd::Hit {
                    part: BoundaryPart::Obstacle(_),
                    ..
                }
            )
        })
        .count();
    Ok((hits, ends.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Obstacle};
    use std::f64::consts::{PI, TAU};

    fn cfg(n: usize, seed: u64) -> WalkConfig {
        WalkConfig::default().with_samples(n).with_seed(seed)
    }

    /// Composite Simpson rule.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn poisson(w: Point, theta: f64) -> f64 {
        (1.0 - w.dot(w)) / (TAU * (Point::polar(1.0, theta) - w).dot(Point::polar(1.0, theta) - w))
    }

    #[test]
    fn center_of_disk_is_uniform_on_16_arcs() {
        let m = sample_harmonic_measure(&Domain::unit_disk(), Point::ORIGIN, &cfg(100_000, 1)).unwrap();
        let mut counts = [0usize; 16];
        for a in m.atoms() {
            let t = a.point.angle().rem_euclid(TAU);
            counts[((t / TAU * 16.0) as usize).min(15)] += 1;
        }
        let expect = m.len() as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // Upper 1e-3 quantile of chi-square with 15 degrees of freedom.
        assert!(chi2 < 37.697, "chi2 = {chi2}");
        assert_eq!(m.total_weight(), 1.0);
    }

    #[test]
    fn off_center_half_disk_mass_matches_poisson_quadrature() {
        let w = Point::new(0.5, 0.0);
        let exact = simpson(|t| poisson(w, t), -PI / 2.0, PI / 2.0, 20_000);
        assert!((simpson(|t| poisson(w, t), -PI, PI, 20_000) - 1.0).abs() < 1e-12);
        let m = sample_harmonic_measure(&Domain::unit_disk(), w, &cfg(100_000, 2)).unwrap();
        let est = m.mass_where(|p| p.x > 0.0);
        let se = (exact * (1.0 - exact) / 100_000.0).sqrt();
        assert!((est - exact).abs() < 3.0 * se, "{est} vs {exact} (se {se})");
    }

    #[test]
    fn start_inside_shell_is_point_mass() {
        let d = Domain::unit_disk();
        let w = Point::new(1.0 - 1e-8, 0.0);
        let m = sample_harmonic_measure(&d, w, &cfg(50, 3)).unwrap();
        assert!(m.is_degenerate());
        assert_eq!(m.total_weight(), 1.0);
        assert!(m.atoms().iter().all(|a| a.point.dist(Point::new(1.0, 0.0)) < 1e-15));
    }

    #[test]
    fn start_outside_is_rejected() {
        let r = sample_harmonic_measure(&Domain::unit_disk(), Point::new(2.0, 0.0), &cfg(10, 0));
        assert!(matches!(r, Err(Error::PointOutsideDomain(_))));
    }

    #[test]
    fn tail_probability_near_boundary_matches_far_arc() {
        let y = Point::new(0.99, 0.0);
        let est = first_hit_tail_probability(&Domain::unit_disk(), y, 0.5, &cfg(20_000, 4)).unwrap();
        // |e^{it} - y| >= 0.5 beyond the angle where the chord reaches 0.5.
        let t0 = ((1.0 + 0.99f64 * 0.99 - 0.25) / (2.0 * 0.99)).acos();
        let exact = 2.0 * simpson(|t| poisson(y, t), t0, PI, 20_000);
        assert!(est.value < 0.35);
        assert!((est.value - exact).abs() < 4.0 * est.stderr.max(1e-4), "{} vs {exact}", est.value);
    }

    #[test]
    fn tail_probability_limits() {
        let d = Domain::unit_disk();
        let y = Point::new(0.2, 0.1);
        assert_eq!(first_hit_tail_probability(&d, y, 4.0, &cfg(2000, 5)).unwrap().value, 0.0);
        assert_eq!(first_hit_tail_probability(&d, y, 1e-9, &cfg(2000, 5)).unwrap().value, 1.0);
    }

    #[test]
    fn atoms_lie_on_boundary_and_runs_repeat() {
        let d = Domain::new(
            Point::ORIGIN,
            1.0,
            vec![
                Obstacle::segment(Point::new(0.2, 0.0), Point::new(0.9, 0.0)).unwrap(),
                Obstacle::arc(Point::new(-0.3, 0.2), 0.2, 0.5, 5.5).unwrap(),
            ],
            "mixed",
        )
        .unwrap();
        let c = cfg(5000, 6);
        let a = sample_harmonic_measure(&d, Point::new(0.0, -0.4), &c).unwrap();
        let b = sample_harmonic_measure(&d, Point::new(0.0, -0.4), &c).unwrap();
        assert_eq!(a, b);
        for at in a.atoms() {
            assert!(d.boundary_distance(at.point) <= 1e-12, "{}", at.point);
        }
        let meta = a.meta().unwrap();
        assert_eq!(a.len() + meta.timed_out, meta.n_samples);
    }

    #[test]
    fn timed_out_walks_drop_mass_exactly() {
        let d = Domain::unit_disk();
        let c = WalkConfig {
            eps_stop: 1e-300,
            max_steps: 1000,
            ..cfg(400, 7)
        };
        let m = sample_harmonic_measure(&d, Point::ORIGIN, &c).unwrap();
        let meta = *m.meta().unwrap();
        assert_eq!(m.len() + meta.timed_out, 400);
        assert!((m.total_weight() + m.mass_deficit() - 1.0).abs() < 1e-15);

        let ends: Vec<WalkEnd> = (0..7u64)
            .map(|i| match i % 3 {
                0 => WalkEnd::TimedOut { steps: 1000 },
                _ => WalkEnd::Hit {
                    point: Point::new(1.0, 0.0),
                    part: BoundaryPart::Ambient,
                    steps: i,
                },
            })
            .collect();
        let m = measure_from_walks(&ends, &c);
        assert_eq!(m.meta().unwrap().timed_out, 3);
        assert_eq!(m.total_weight() + m.mass_deficit(), 1.0);
        assert!((m.atoms().iter().map(|a| a.weight).sum::<f64>() - m.total_weight()).abs() < 1e-15);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|t| derive_seed(42, t)).collect();
        assert_eq!(s.len(), 1000);
    }
}
