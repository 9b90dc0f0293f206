use std::f64::consts::TAU;

use crate::convergence::CheckSettings;
use crate::error::{Error, Result};
use crate::geometry::{Arc, Domain, Obstacle, Point, Segment};
use crate::sampler::obstacle_hits;
use crate::scenarios::calibration::{calibrate_radius, CalibrationConfig, CalibrationResult};
use crate::scenarios::LimitSpec;

/// Fixed parts of a generated scenario.
pub struct Layout {
    pub limits: Vec<LimitSpec>,
    pub basepoints: Vec<Point>,
    pub settings: CheckSettings,
}

/// A parameterized family of domains, indexed by `n`.
pub trait Generator: Send + Sync {
    fn name(&self) -> &str;

    fn default_n_max(&self) -> u32;

    /// Indices generated for `n_max`, checking its bounds.
    fn indices(&self, n_max: u32) -> Result<Vec<u32>>;

    /// Member `n`, with its calibrated radius when the family has one.
    fn member(&self, n: u32, radius: Option<f64>) -> Result<Domain>;

    /// Calibrated radius for member `n`; `None` for families without a
    /// free parameter.
    fn calibrate(&self, _n: u32, _cfg: &CalibrationConfig) -> Result<Option<CalibrationResult>> {
        Ok(None)
    }

    fn layout(&self) -> Result<Layout>;
}

fn limit(name: &str, domain: &Domain, checkers: &[&str]) -> LimitSpec {
    LimitSpec {
        name: name.to_string(),
        domain: crate::geometry::DomainSpec::from_domain(domain),
        checkers: checkers.iter().map(|c| c.to_string()).collect(),
    }
}

fn from_two(n_max: u32, upper: Option<u32>) -> Result<Vec<u32>> {
    if n_max < 2 || upper.is_some_and(|u| n_max > u) {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in [2, {}], got {n_max}",
            upper.map_or("inf".to_string(), |u| u.to_string())
        )));
    }
    Ok((2..=n_max).collect())
}

fn needs_radius(radius: Option<f64>, n: u32) -> Result<f64> {
    match radius {
        Some(r) if r > 0.0 && r.is_finite() => Ok(r),
        _ => Err(Error::InvalidArgument(format!("member {n} needs a positive calibrated radius"))),
    }
}

/// Disks of radius `1 - 1/n` exhausting the unit disk.
pub struct ShrinkingDisks;

impl Generator for ShrinkingDisks {
    fn name(&self) -> &str {
        "shrinking-disks"
    }

    fn default_n_max(&self) -> u32 {
        8
    }

    fn indices(&self, n_max: u32) -> Result<Vec<u32>> {
        from_two(n_max, None)
    }

    fn member(&self, n: u32, _radius: Option<f64>) -> Result<Domain> {
        Ok(Domain::disk(Point::ORIGIN, 1.0 - 1.0 / f64::from(n))?.with_label(format!("disk-{n}")))
    }

    fn layout(&self) -> Result<Layout> {
        Ok(Layout {
            limits: vec![limit("unit-disk", &Domain::unit_disk(), &["kernel", "interior", "measure"])],
            basepoints: vec![Point::ORIGIN, Point::new(0.3, 0.0)],
            settings: CheckSettings::default(),
        })
    }
}

/// The unit disk minus a nearly closed circle of radius `r_n` about `1/2`,
/// open toward the origin through a gap of half-angle `r_n`.
pub struct SlitCircle;

impl SlitCircle {
    pub const CENTER: Point = Point { x: 0.5, y: 0.0 };
    pub const CEILING: f64 = 0.1;

    pub fn arc(r: f64) -> Result<Obstacle> {
        Ok(Obstacle::Arc(Arc::with_gap(Self::CENTER, r, Point::new(-1.0, 0.0), r)?))
    }
}

impl Generator for SlitCircle {
    fn name(&self) -> &str {
        "slit-circle"
    }

    fn default_n_max(&self) -> u32 {
        6
    }

    fn indices(&self, n_max: u32) -> Result<Vec<u32>> {
        from_two(n_max, Some(30))
    }

    fn member(&self, n: u32, radius: Option<f64>) -> Result<Domain> {
        let r = needs_radius(radius, n)?;
        if r > Self::CEILING {
            return Err(Error::InvalidArgument(format!("arc radius {r} exceeds {}", Self::CEILING)));
        }
        Domain::new(Point::ORIGIN, 1.0, vec![Self::arc(r)?], format!("slit-circle-{n}"))
    }

    fn calibrate(&self, n: u32, cfg: &CalibrationConfig) -> Result<Option<CalibrationResult>> {
        let target = 0.5f64.powi(n as i32);
        let res = calibrate_radius(n, target, Self::CEILING, cfg, |r, walk| {
            let dom = self.member(n, Some(r))?;
            Ok(vec![obstacle_hits(&dom, Point::ORIGIN, walk)?])
        })?;
        Ok(Some(res))
    }

    fn layout(&self) -> Result<Layout> {
        let settings = CheckSettings {
            epsilon_ladder: vec![0.1],
            ..CheckSettings::default()
        };
        Ok(Layout {
            limits: vec![limit("unit-disk", &Domain::unit_disk(), &["measure"])],
            basepoints: vec![Point::ORIGIN, Self::CENTER],
            settings,
        })
    }
}

/// The unit disk minus `2^n` radial segments of half-length `r_n` centered
/// on the circle of radius `1/2 + 2^-n`.
pub struct RadialTeeth;

impl RadialTeeth {
    pub const MAX_N: u32 = 8;

    pub fn teeth(n: u32, r: f64) -> Result<Vec<Obstacle>> {
        let count = 1u32 << n;
        let mid = 0.5 + 0.5f64.powi(n as i32);
        (0..count)
            .map(|k| {
                let theta = TAU * f64::from(k) / f64::from(count);
                Ok(Obstacle::Segment(Segment::centered(Point::polar(mid, theta), theta, r)?))
            })
            .collect()
    }

    /// Largest admissible half-length: a quarter of the gap to radius 1/2.
    pub fn ceiling(n: u32) -> f64 {
        0.5f64.powi(n as i32 + 2)
    }

    /// Points where the hitting mass must stay below target: the basepoint
    /// and the edges of the annulus around the teeth, on a tooth and
    /// halfway between two.
    pub fn probes(n: u32) -> Vec<Point> {
        let inner = 0.5 + 0.5f64.powi(n as i32 + 1);
        let outer = 0.5 + 0.5f64.powi(n as i32 - 1);
        let half_step = TAU / f64::from(1u32 << (n + 1));
        let mut out = vec![Point::ORIGIN];
        for radius in [inner, outer] {
            for theta in [0.0, half_step] {
                out.push(Point::polar(radius, theta));
            }
        }
        out
    }
}

impl Generator for RadialTeeth {
    fn name(&self) -> &str {
        "radial-teeth"
    }

    fn default_n_max(&self) -> u32 {
        6
    }

    fn indices(&self, n_max: u32) -> Result<Vec<u32>> {
        from_two(n_max, Some(Self::MAX_N))
    }

    fn member(&self, n: u32, radius: Option<f64>) -> Result<Domain> {
        let r = needs_radius(radius, n)?;
        if n < 2 || n > Self::MAX_N {
            return Err(Error::InvalidArgument(format!("radial-teeth needs 2 <= n <= {}", Self::MAX_N)));
        }
        if r > Self::ceiling(n) {
            return Err(Error::InvalidArgument(format!("tooth half-length {r} exceeds {}", Self::ceiling(n))));
        }
        Domain::new(Point::ORIGIN, 1.0, Self::teeth(n, r)?, format!("radial-teeth-{n}"))
    }

    fn calibrate(&self, n: u32, cfg: &CalibrationConfig) -> Result<Option<CalibrationResult>> {
        let target = 0.5f64.powi(n as i32);
        let res = calibrate_radius(n, target, Self::ceiling(n), cfg, |r, walk| {
            let dom = self.member(n, Some(r))?;
            Self::probes(n)
                .into_iter()
                .filter(|&z| dom.contains(z))
                .map(|z| obstacle_hits(&dom, z, walk))
                .collect()
        })?;
        Ok(Some(res))
    }

    fn layout(&self) -> Result<Layout> {
        let settings = CheckSettings {
            epsilon_ladder: vec![0.1],
            ..CheckSettings::default()
        };
        Ok(Layout {
            limits: vec![
                limit("unit-disk", &Domain::unit_disk(), &["measure"]),
                limit("half-disk", &Domain::disk(Point::ORIGIN, 0.5)?, &["interior"]),
            ],
            basepoints: vec![Point::ORIGIN, Point::new(0.25, 0.0)],
            settings,
        })
    }
}
