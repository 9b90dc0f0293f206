//! Checkers for convergence of domain sequences and estimators for the
//! hypotheses that make the notions agree.

mod beurling;
mod candidate;
mod kernel;
mod measure;
mod perfectness;
mod regularity;
mod report;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::approximation::{common_interior_on, GridFamily};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::registry::Registry;

pub use beurling::{beurling_check, circular_projection, BeurlingResult};
pub use candidate::{extract_limit_candidate, LimitCandidate};
pub use kernel::{check_kernel_convergence, kernel_on, KernelOptions, KernelRung, KernelVerdict};
pub use measure::{check_measure_convergence, MeasureOptions, MeasureRow, MeasureVerdict, DEFICIT_TOLERANCE};
pub use perfectness::{estimate_uniform_perfectness, PerfectnessEstimate, PerfectnessOptions, RingWitness};
pub use regularity::{estimate_uniform_regularity, RegularityEstimate, RegularityOptions};
pub use report::{CheckOutcome, ConvergenceReport, ReportRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckSettings {
    pub grid_h: f64,
    pub epsilon_ladder: Vec<f64>,
    pub kernel: KernelOptions,
    pub measure: MeasureOptions,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            grid_h: 0.005,
            epsilon_ladder: vec![0.3, 0.15],
            kernel: KernelOptions::default(),
            measure: MeasureOptions::default(),
        }
    }
}

/// One limit, one basepoint and a finite sequence, with the grid fields
/// shared between the grid-based checkers.
pub struct CheckContext<'a> {
    pub limit: &'a Domain,
    pub limit_name: &'a str,
    pub seq: &'a [Domain],
    /// Family index of each member, for reporting.
    pub indices: &'a [u32],
    pub w: Point,
    pub settings: &'a CheckSettings,
    family: OnceLock<GridFamily>,
}

impl<'a> CheckContext<'a> {
    pub fn new(
        limit: &'a Domain,
        limit_name: &'a str,
        seq: &'a [Domain],
        indices: &'a [u32],
        w: Point,
        settings: &'a CheckSettings,
    ) -> Result<Self> {
        if seq.len() != indices.len() {
            return Err(Error::InvalidArgument("one index per sequence member is required".into()));
        }
        if seq.is_empty() {
            return Err(Error::InvalidArgument("domain sequence is empty".into()));
        }
        Ok(CheckContext {
            limit,
            limit_name,
            seq,
            indices,
            w,
            settings,
            family: OnceLock::new(),
        })
    }

    pub fn family(&self) -> Result<&GridFamily> {
        if let Some(f) = self.family.get() {
            return Ok(f);
        }
        let f = GridFamily::new(self.limit, self.seq, self.settings.grid_h)?;
        Ok(self.family.get_or_init(|| f))
    }

    fn index_at(&self, position: usize) -> u32 {
        self.indices[position - 1]
    }

    fn row(&self, checker: &str, n: Option<u32>, metric: &str, value: f64) -> ReportRow {
        ReportRow {
            checker: checker.to_string(),
            limit: self.limit_name.to_string(),
            basepoint: self.w.to_string(),
            n,
            metric: metric.to_string(),
            value,
            stderr: None,
            ok: None,
            note: String::new(),
        }
    }
}

/// A convergence notion that can be tested on a [`CheckContext`].
pub trait Checker: Send + Sync {
    fn name(&self) -> &str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome>;
}

pub fn checker_registry() -> Registry<dyn Checker> {
    let mut r: Registry<dyn Checker> = Registry::new("checker");
    r.register("kernel", Box::new(KernelChecker));
    r.register("interior", Box::new(InteriorChecker));
    r.register("measure", Box::new(MeasureChecker));
    r
}

/// Runs one checker, turning an error into a failed outcome with a marker
/// row so partial reports stay complete.
pub fn run_checker(checker: &dyn Checker, ctx: &CheckContext) -> CheckOutcome {
    match checker.run(ctx) {
        Ok(o) => o,
        Err(e) => {
            let mut row = ctx.row(checker.name(), None, "error", f64::NAN);
            row.ok = Some(false);
            row.note = e.to_string();
            CheckOutcome {
                checker: checker.name().to_string(),
                limit: ctx.limit_name.to_string(),
                basepoint: ctx.w,
                passed: false,
                summary: format!("error: {e}"),
                rows: vec![row],
            }
        }
    }
}

pub struct KernelChecker;

impl Checker for KernelChecker {
    fn name(&self) -> &str {
        "kernel"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        if !ctx.limit.contains(ctx.w) {
            return Err(Error::PointOutsideDomain(ctx.w));
        }
        let v = kernel_on(ctx.family()?, ctx.w, &ctx.settings.kernel)?;
        let mut rows = Vec::new();
        for rung in &v.rungs {
            let mut row = ctx.row(
                "kernel",
                rung.tail_start.map(|p| ctx.index_at(p)),
                &format!("compact_m{}", rung.m),
                rung.tail_start.map_or(f64::NAN, |p| p as f64),
            );
            row.ok = Some(rung.tail_start.is_some());
            if rung.vacuous {
                row.note = "vacuous".into();
            }
            rows.push(row);
        }
        let mut row = ctx.row("kernel", None, "excess_cells", v.excess_cells as f64);
        row.ok = Some(v.limit_is_maximal);
        rows.push(row);
        Ok(CheckOutcome {
            checker: "kernel".into(),
            limit: ctx.limit_name.to_string(),
            basepoint: ctx.w,
            passed: v.ok(),
            summary: format!(
                "compacts absorbed: {}, limit maximal: {} ({} excess cells)",
                v.absorbs_compacts, v.limit_is_maximal, v.excess_cells
            ),
            rows,
        })
    }
}

pub struct InteriorChecker;

impl Checker for InteriorChecker {
    fn name(&self) -> &str {
        "interior"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        if !ctx.limit.contains(ctx.w) {
            return Err(Error::PointOutsideDomain(ctx.w));
        }
        let family = ctx.family()?;
        let mut rows = Vec::new();
        let mut passed = true;
        let mut parts = Vec::new();
        for &eps in &ctx.settings.epsilon_ladder {
            let row = match common_interior_on(family, ctx.w, eps) {
                Ok(v) => {
                    let mut row = ctx.row("interior", Some(ctx.index_at(v.tail_start)), "boundary_gap", v.worst_boundary_gap);
                    row.ok = Some(v.ok);
                    row.note = format!("epsilon={eps} cells={}", v.region.len());
                    row
                }
                Err(e @ Error::EmptyRegion(_)) => {
                    let mut row = ctx.row("interior", None, "boundary_gap", f64::NAN);
                    row.ok = Some(false);
                    row.note = format!("epsilon={eps} {e}");
                    row
                }
                Err(e) => return Err(e),
            };
            let ok = row.ok == Some(true);
            passed &= ok;
            parts.push(format!("eps {eps}: {}", if ok { "ok" } else { "not ok" }));
            rows.push(row);
        }
        Ok(CheckOutcome {
            checker: "interior".into(),
            limit: ctx.limit_name.to_string(),
            basepoint: ctx.w,
            passed,
            summary: parts.join(", "),
            rows,
        })
    }
}

pub struct MeasureChecker;

impl Checker for MeasureChecker {
    fn name(&self) -> &str {
        "measure"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let opts = &ctx.settings.measure;
        let v = match check_measure_convergence(ctx.limit, ctx.seq, ctx.w, opts) {
            Ok(v) => v,
            Err(e @ Error::MassMismatch { .. }) => {
                let mut row = ctx.row("measure", None, "mass_mismatch", f64::NAN);
                row.ok = Some(false);
                row.note = e.to_string();
                return Ok(CheckOutcome {
                    checker: "measure".into(),
                    limit: ctx.limit_name.to_string(),
                    basepoint: ctx.w,
                    passed: false,
                    summary: format!("not converging ({e})"),
                    rows: vec![row],
                });
            }
            Err(e) => return Err(e),
        };
        let mut rows = Vec::new();
        for r in &v.rows {
            let n = Some(ctx.index_at(r.position));
            let mut row = ctx.row("measure", n, "w1", r.w1);
            row.stderr = Some(r.stderr);
            row.ok = Some(r.w1 < opts.tolerance);
            row.note = format!("atoms={} replicates={}", r.n_atoms, r.replicates.len());
            rows.push(row);
            rows.push(ctx.row("measure", n, "mass_deficit", r.mass_deficit));
            rows.push(ctx.row("measure", n, "limit_boundary_mass", r.limit_boundary_mass));
        }
        let last = v.rows.last().expect("sequence is non-empty");
        Ok(CheckOutcome {
            checker: "measure".into(),
            limit: ctx.limit_name.to_string(),
            basepoint: ctx.w,
            passed: v.converging(),
            summary: format!(
                "{} (final W1 {:.4} +- {:.4}, trend non-increasing: {})",
                if v.converging() { "converging" } else { "not converging" },
                last.w1,
                last.stderr,
                v.non_increasing
            ),
            rows,
        })
    }
}
