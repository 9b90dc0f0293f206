use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{derive_seed, WalkConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub walks: usize,
    pub iterations: u32,
    /// Smallest radius tried; radii below it are not representable in a
    /// useful way.
    pub floor: f64,
    /// Normal quantile for the Wilson interval.
    pub z: f64,
    pub seed: u64,
    pub eps_stop: f64,
    /// Keep the floor radius, marked uncertified, when even it misses the
    /// target.
    pub allow_uncalibrated: bool,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            walks: 20_000,
            iterations: 20,
            floor: 1e-300,
            z: 1.96,
            seed: 0,
            eps_stop: 1e-6,
            allow_uncalibrated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub n: u32,
    pub r_n: f64,
    /// Worst observed mass over the probes.
    pub achieved_mass: f64,
    pub target: f64,
    /// Distance from `achieved_mass` to the upper Wilson bound.
    pub ci_halfwidth: f64,
    /// Whether `achieved_mass + ci_halfwidth < target`, as opposed to an
    /// accepted floor radius.
    #[serde(default = "yes")]
    pub certified: bool,
}

fn yes() -> bool {
    true
}

impl CalibrationResult {
    pub fn meets_target(&self) -> bool {
        self.achieved_mass + self.ci_halfwidth < self.target
    }
}

/// Wilson score interval `(lower, upper)` for `successes` out of `n`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct Evaluation {
    r: f64,
    mass: f64,
    upper: f64,
}

/// Bisects `log10 r` in `[floor, ceiling]` for the largest radius whose
/// worst probe mass stays below `target` with confidence. `probe_hits(r,
/// cfg)` returns `(hits, walks)` for every probe; all evaluations share one
/// seed so the comparison between radii uses common random numbers.
pub fn calibrate_radius(
    n: u32,
    target: f64,
    ceiling: f64,
    cfg: &CalibrationConfig,
    probe_hits: impl Fn(f64, &WalkConfig) -> Result<Vec<(usize, usize)>>,
) -> Result<CalibrationResult> {
    if !(cfg.floor > 0.0 && cfg.floor < ceiling) {
        return Err(Error::InvalidArgument(format!(
            "calibration floor {} must lie in (0, {ceiling})",
            cfg.floor
        )));
    }
    let walk = WalkConfig {
        eps_stop: cfg.eps_stop,
        seed: derive_seed(cfg.seed, u64::from(n)),
        n_samples: cfg.walks,
        ..WalkConfig::default()
    };
    let eval = |r: f64| -> Result<Evaluation> {
        let mut worst = Evaluation {
            r,
            mass: 0.0,
            upper: 0.0,
        };
        for (hits, walks) in probe_hits(r, &walk)? {
            let (_, upper) = wilson_interval(hits, walks, cfg.z);
            if upper > worst.upper {
                worst.mass = hits as f64 / walks as f64;
                worst.upper = upper;
            }
        }
        Ok(worst)
    };
    let result = |e: &Evaluation, certified: bool| CalibrationResult {
        n,
        r_n: e.r,
        achieved_mass: e.mass,
        target,
        ci_halfwidth: e.upper - e.mass,
        certified,
    };

    let top = eval(ceiling)?;
    if top.upper < target {
        return Ok(result(&top, true));
    }
    let bottom = eval(cfg.floor)?;
    if bottom.upper >= target {
        if cfg.allow_uncalibrated {
            return Ok(result(&bottom, false));
        }
        return Err(Error::CalibrationFailed {
            n,
            mass: bottom.mass,
            ci: bottom.upper - bottom.mass,
            target,
        });
    }
    let (mut lo, mut hi) = (cfg.floor.log10(), ceiling.log10());
    let mut best = bottom;
    for _ in 0..cfg.iterations {
        let mid = 0.5 * (lo + hi);
        let e = eval(10f64.powf(mid))?;
        if e.upper < target {
            lo = mid;
            best = e;
        } else {
            hi = mid;
        }
    }
    Ok(result(&best, true))
}
