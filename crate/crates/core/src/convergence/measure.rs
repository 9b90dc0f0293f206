use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::sampler::{derive_seed, sample_harmonic_measure, EmpiricalMeasure, WalkConfig};
use crate::transport::{discretize_reference, subsample, w1_distance, ReferenceKind, ResampleMethod};

/// Largest allowed difference between the timed-out fractions of two
/// measures being compared.
pub const DEFICIT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureOptions {
    pub walk: WalkConfig,
    pub n_atoms: usize,
    pub replicates: usize,
    pub tolerance: f64,
    pub resample: ResampleMethod,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            walk: WalkConfig::default(),
            n_atoms: 2048,
            replicates: 5,
            tolerance: 0.05,
            resample: ResampleMethod::Systematic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    /// 1-based position in the sequence.
    pub position: usize,
    /// Mean W1 over replicates.
    pub w1: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub replicates: Vec<f64>,
    pub n_atoms: usize,
    /// Mean timed-out fraction of the member's walks.
    pub mass_deficit: f64,
    /// Mean mass the member's measure puts within `1e-3` ambient radii of
    /// the limit's boundary.
    pub limit_boundary_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVerdict {
    pub rows: Vec<MeasureRow>,
    /// Each step rises by at most twice the combined standard error.
    pub non_increasing: bool,
    pub final_below_tolerance: bool,
}

impl MeasureVerdict {
    pub fn converging(&self) -> bool {
        self.non_increasing && self.final_below_tolerance
    }
}

/// Reference measure of `limit` seen from `w`: equal-weight Poisson
/// quantiles on an obstacle-free disk, a sampled measure otherwise.
fn limit_measure(limit: &Domain, w: Point, opts: &MeasureOptions, rep_seed: u64) -> Result<EmpiricalMeasure> {
    if limit.obstacles().is_empty() {
        discretize_reference(limit, ReferenceKind::PoissonQuantiles { basepoint: w }, opts.n_atoms)
    } else {
        let cfg = opts.walk.with_seed(derive_seed(rep_seed, 0));
        sample_harmonic_measure(limit, w, &cfg)
    }
}

fn prepared(m: &EmpiricalMeasure, opts: &MeasureOptions, seed: u64) -> Result<EmpiricalMeasure> {
    if m.is_empty() {
        return Err(Error::MassMismatch {
            left: 0.0,
            right: 1.0,
        });
    }
    let r = if m.len() == opts.n_atoms && m.total_weight() == 1.0 {
        m.clone()
    } else {
        subsample(m, opts.n_atoms, seed, opts.resample)?
    };
    Ok(r.renormalized(1.0))
}

/// W1 between each member's harmonic measure at `w` and the limit's, with
/// replicate-based standard errors.
pub fn check_measure_convergence(
    limit: &Domain,
    seq: &[Domain],
    w: Point,
    opts: &MeasureOptions,
) -> Result<MeasureVerdict> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("domain sequence is empty".into()));
    }
    if opts.replicates < 2 {
        return Err(Error::InvalidArgument("need at least two replicates for a standard error".into()));
    }
    if !limit.contains(w) {
        return Err(Error::PointOutsideDomain(w));
    }
    let near = 1e-3 * limit.ambient_radius();
    let mut per_rep: Vec<Vec<(f64, f64, f64)>> = Vec::with_capacity(opts.replicates);
    for rep in 0..opts.replicates {
        let rep_seed = derive_seed(opts.walk.seed, rep as u64);
        let reference = limit_measure(limit, w, opts, rep_seed)?;
        let reference_deficit = reference.mass_deficit();
        let reference = prepared(&reference, opts, derive_seed(rep_seed, u64::MAX))?;
        let mut row = Vec::with_capacity(seq.len());
        for (k, dom) in seq.iter().enumerate() {
            let seed = derive_seed(rep_seed, k as u64 + 1);
            let m = sample_harmonic_measure(dom, w, &opts.walk.with_seed(seed))?;
            if (m.mass_deficit() - reference_deficit).abs() > DEFICIT_TOLERANCE {
                return Err(Error::MassMismatch {
                    left: m.total_weight(),
                    right: 1.0 - reference_deficit,
                });
            }
            let boundary_mass = m.mass_where(|p| limit.boundary_distance(p) <= near);
            let deficit = m.mass_deficit();
            let m = prepared(&m, opts, derive_seed(seed, u64::MAX))?;
            let (cost, _) = w1_distance(&m, &reference)?;
            row.push((cost, deficit, boundary_mass));
        }
        per_rep.push(row);
    }
    let reps = opts.replicates as f64;
    let rows: Vec<MeasureRow> = (0..seq.len())
        .map(|k| {
            let values: Vec<f64> = per_rep.iter().map(|r| r[k].0).collect();
            let mean = values.iter().sum::<f64>() / reps;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0);
            MeasureRow {
                position: k + 1,
                w1: mean,
                stderr: (var / reps).sqrt(),
                replicates: values,
                n_atoms: opts.n_atoms,
                mass_deficit: per_rep.iter().map(|r| r[k].1).sum::<f64>() / reps,
                limit_boundary_mass: per_rep.iter().map(|r| r[k].2).sum::<f64>() / reps,
            }
        })
        .collect();
    let non_increasing = rows
        .windows(2)
        .all(|p| p[1].w1 <= p[0].w1 + 2.0 * (p[0].stderr.powi(2) + p[1].stderr.powi(2)).sqrt());
    let final_below_tolerance = rows.last().is_some_and(|r| r.w1 < opts.tolerance);
    Ok(MeasureVerdict {
        rows,
        non_increasing,
        final_below_tolerance,
    })
}
