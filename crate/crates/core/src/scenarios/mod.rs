//! Scenario files: a family of domains, its limits and basepoints, and the
//! checker settings, plus generators for the shipped families.

mod calibration;
mod generators;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{checker_registry, run_checker, CheckContext, CheckSettings, ConvergenceReport};
use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainSpec, Point};
use crate::registry::Registry;
use crate::sampler::derive_seed;

pub use calibration::{calibrate_radius, wilson_interval, CalibrationConfig, CalibrationResult};
pub use generators::{Generator, Layout, RadialTeeth, ShrinkingDisks, SlitCircle};

/// Name of the pseudo-generator whose members are listed explicitly.
pub const EXPLICIT: &str = "explicit";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub generator: String,
    pub members: Vec<MemberSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub name: String,
    pub domain: DomainSpec,
    pub checkers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub family: FamilySpec,
    pub limits: Vec<LimitSpec>,
    pub basepoints: Vec<Point>,
    pub seed: u64,
    pub settings: CheckSettings,
    #[serde(default)]
    pub calibration: Vec<CalibrationResult>,
}

pub fn generator_registry() -> Registry<dyn Generator> {
    let mut r: Registry<dyn Generator> = Registry::new("generator");
    r.register("shrinking-disks", Box::new(ShrinkingDisks));
    r.register("slit-circle", Box::new(SlitCircle));
    r.register("radial-teeth", Box::new(RadialTeeth));
    r
}

/// Builds a scenario from a registered generator, calibrating members
/// concurrently.
pub fn generate(name: &str, n_max: Option<u32>, seed: u64, cfg: &CalibrationConfig) -> Result<Scenario> {
    let registry = generator_registry();
    let generator = registry.get(name)?;
    let indices = generator.indices(n_max.unwrap_or_else(|| generator.default_n_max()))?;
    let cfg = CalibrationConfig {
        seed: derive_seed(seed, 0xCA1B),
        ..cfg.clone()
    };
    let calibration: Vec<Option<CalibrationResult>> = indices
        .par_iter()
        .map(|&n| generator.calibrate(n, &cfg))
        .collect::<Result<_>>()?;
    let members = indices
        .iter()
        .zip(&calibration)
        .map(|(&n, c)| MemberSpec {
            n,
            radius: c.map(|c| c.r_n),
            domain: None,
        })
        .collect();
    let layout = generator.layout()?;
    let mut settings = layout.settings;
    settings.measure.walk.seed = seed;
    let scenario = Scenario {
        name: name.to_string(),
        family: FamilySpec {
            generator: name.to_string(),
            members,
        },
        limits: layout.limits,
        basepoints: layout.basepoints,
        seed,
        settings,
        calibration: calibration.into_iter().flatten().collect(),
    };
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(j) => Error::Format {
                path: path.to_path_buf(),
                reason: j.to_string(),
            },
            e => e,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn indices(&self) -> Vec<u32> {
        self.family.members.iter().map(|m| m.n).collect()
    }

    /// Whether every member's radius carries a certified calibration.
    pub fn fully_calibrated(&self) -> bool {
        self.family.members.iter().all(|m| self.certified(m))
    }

    fn certified(&self, m: &MemberSpec) -> bool {
        m.radius.is_none()
            || self
                .calibration
                .iter()
                .any(|c| c.n == m.n && Some(c.r_n) == m.radius && c.certified)
    }

    /// The scenario cut back to its longest run of leading members with
    /// certified calibrations; `None` when the first member lacks one.
    pub fn certified_prefix(&self) -> Option<Scenario> {
        let keep = self.family.members.iter().take_while(|m| self.certified(m)).count();
        if keep == 0 {
            return None;
        }
        let mut s = self.clone();
        s.family.members.truncate(keep);
        let kept: Vec<u32> = s.indices();
        s.calibration.retain(|c| kept.contains(&c.n));
        Some(s)
    }

    pub fn members(&self) -> Result<Vec<Domain>> {
        let registry = generator_registry();
        let generator = if self.family.generator == EXPLICIT {
            None
        } else {
            Some(registry.get(&self.family.generator)?)
        };
        self.family
            .members
            .iter()
            .map(|m| match (&m.domain, generator) {
                (Some(spec), _) => spec.build(),
                (None, Some(g)) => g.member(m.n, m.radius),
                (None, None) => Err(Error::InvalidArgument(format!(
                    "explicit member {} has no domain",
                    m.n
                ))),
            })
            .collect()
    }

    pub fn limit_domains(&self) -> Result<Vec<Domain>> {
        self.limits.iter().map(|l| l.domain.build()).collect()
    }

    /// Checks the calibration certificates and that every basepoint lies in
    /// every limit and member.
    pub fn validate(&self) -> Result<()> {
        if self.family.members.is_empty() {
            return Err(Error::InvalidArgument(format!("scenario `{}` has no members", self.name)));
        }
        if self.basepoints.is_empty() {
            return Err(Error::InvalidArgument(format!("scenario `{}` has no basepoints", self.name)));
        }
        for c in &self.calibration {
            if c.certified && !c.meets_target() {
                return Err(Error::InvalidArgument(format!(
                    "calibration at n = {} claims a certificate it does not meet",
                    c.n
                )));
            }
        }
        let registry = checker_registry();
        for l in &self.limits {
            for c in &l.checkers {
                registry.get(c)?;
            }
        }
        let members = self.members()?;
        let limits = self.limit_domains()?;
        for &w in &self.basepoints {
            if let Some(d) = limits.iter().chain(&members).find(|d| !d.contains(w)) {
                return Err(Error::InvalidArgument(format!("basepoint {w} is not inside `{}`", d.label())));
            }
        }
        Ok(())
    }
}

/// Runs the selected checkers (all when `which` is empty) for every limit
/// and basepoint, in file order.
pub fn run_scenario(s: &Scenario, which: &[String]) -> Result<ConvergenceReport> {
    let registry = checker_registry();
    for name in which {
        registry.get(name)?;
    }
    let members = s.members()?;
    let limits = s.limit_domains()?;
    let indices = s.indices();
    let mut report = ConvergenceReport::new(&s.name);
    for (li, (spec, limit)) in s.limits.iter().zip(&limits).enumerate() {
        for (bi, &w) in s.basepoints.iter().enumerate() {
            let mut settings = s.settings.clone();
            settings.measure.walk.seed = derive_seed(s.seed, ((li as u64) << 32) | bi as u64);
            let ctx = CheckContext::new(limit, &spec.name, &members, &indices, w, &settings)?;
            for (name, checker) in registry.iter() {
                let wanted = which.is_empty() || which.iter().any(|c| c == name);
                if wanted && spec.checkers.iter().any(|c| c == name) {
                    report.outcomes.push(run_checker(checker, &ctx));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_disks() -> Scenario {
        let mut s = generate("shrinking-disks", Some(4), 7, &CalibrationConfig::default()).unwrap();
        s.settings.epsilon_ladder = vec![0.3];
        s.settings.measure.n_atoms = 128;
        s.settings.measure.replicates = 2;
        s.settings.measure.walk.n_samples = 2000;
        s
    }

    #[test]
    fn json_round_trip() {
        let s = small_disks();
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.indices(), vec![2, 3, 4]);
        assert!(back.fully_calibrated());
    }

    #[test]
    fn forged_certificate_is_rejected() {
        let mut s = generate("slit-circle", Some(2), 1, &CalibrationConfig {
            walks: 2000,
            iterations: 6,
            ..CalibrationConfig::default()
        })
        .unwrap();
        s.calibration[0].achieved_mass = 1.0;
        assert!(Scenario::from_json(&s.to_json().unwrap()).is_err());
    }

    #[test]
    fn certified_prefix_stops_at_first_gap() {
        let mut s = generate("slit-circle", Some(4), 1, &CalibrationConfig {
            walks: 2000,
            iterations: 6,
            ..CalibrationConfig::default()
        })
        .unwrap();
        assert_eq!(s.certified_prefix().unwrap(), s);
        s.calibration[1].certified = false;
        assert!(!s.fully_calibrated());
        let p = s.certified_prefix().unwrap();
        assert_eq!(p.indices(), vec![2]);
        assert_eq!(p.calibration.len(), 1);
        s.calibration[0].certified = false;
        assert!(s.certified_prefix().is_none());
    }

    #[test]
    fn basepoints_must_be_inside_members() {
        let mut s = small_disks();
        s.basepoints.push(Point::new(0.6, 0.0));
        assert!(s.validate().is_err());
    }

    #[test]
    fn explicit_members() {
        let mut s = small_disks();
        s.family.generator = EXPLICIT.into();
        assert!(s.members().is_err());
        for m in &mut s.family.members {
            m.domain = Some(DomainSpec::from_domain(&ShrinkingDisks.member(m.n, None).unwrap()));
        }
        assert_eq!(s.members().unwrap().len(), 3);
    }

    #[test]
    fn run_is_deterministic_and_filters_checkers() {
        let s = small_disks();
        let a = run_scenario(&s, &["kernel".into(), "measure".into()]).unwrap();
        let b = run_scenario(&s, &["kernel".into(), "measure".into()]).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_csv(&mut x).unwrap();
        b.write_csv(&mut y).unwrap();
        assert_eq!(x, y);
        assert!(a.outcomes.iter().all(|o| o.checker != "interior"));
        assert_eq!(a.outcomes.len(), 4);
        assert!(run_scenario(&s, &["bogus".into()]).is_err());
    }
}
