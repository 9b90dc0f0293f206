//! Wasserstein-1 distance between finitely supported measures.

mod hungarian;
mod reference;
mod resample;
mod ssp;

use std::io::Write;

use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::sampler::EmpiricalMeasure;

pub use hungarian::{assign, auction, Auction, Hungarian, AUCTION_RELATIVE_EPS};
pub use reference::{discretize_reference, ReferenceKind};
pub use resample::{hilbert_index, subsample, ResampleMethod};
pub use ssp::SuccessiveShortestPaths;

/// Default cap on atoms per side.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Total masses closer than this are renormalized instead of rejected.
pub const MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(source index, target index, mass)` with positive mass.
    pub pairs: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

impl TransportPlan {
    pub(crate) fn from_pairs(pairs: Vec<(usize, usize, f64)>, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Self {
        let cost = pairs
            .iter()
            .map(|&(i, j, m)| m * mu.atoms()[i].point.dist(nu.atoms()[j].point))
            .sum();
        TransportPlan { pairs, cost }
    }

    /// Largest deviation of the plan's marginals from the measures' weights.
    pub fn marginal_error(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
        let mut out: Vec<f64> = mu.atoms().iter().map(|a| a.weight).collect();
        let mut inn: Vec<f64> = nu.atoms().iter().map(|a| a.weight).collect();
        for &(i, j, m) in &self.pairs {
            out[i] -= m;
            inn[j] -= m;
        }
        out.iter().chain(&inn).fold(0.0, |acc, r| acc.max(r.abs()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["source_idx", "target_idx", "mass"])?;
        for &(i, j, m) in &self.pairs {
            w.write_record([i.to_string(), j.to_string(), m.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A discrete optimal transport algorithm.
pub trait TransportSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Rejects inputs the algorithm cannot handle, with
    /// [`Error::UnsupportedInput`].
    fn check(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<()>;

    /// Optimal plan between two measures of equal total mass.
    fn solve(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportPlan>;
}

/// The shipped solvers: `auction` and `hungarian` (equal counts, uniform
/// weights) and `ssp` (any weights). Automatic selection tries them in this
/// order.
pub fn solver_registry() -> Registry<dyn TransportSolver> {
    let mut r: Registry<dyn TransportSolver> = Registry::new("transport solver");
    r.register("auction", Box::new(Auction));
    r.register("hungarian", Box::new(Hungarian));
    r.register("ssp", Box::new(SuccessiveShortestPaths));
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct W1Options {
    pub size_cap: usize,
    /// Solver name; `None` picks the first registered solver that accepts
    /// the input.
    pub solver: Option<String>,
}

impl Default for W1Options {
    fn default() -> Self {
        W1Options {
            size_cap: DEFAULT_SIZE_CAP,
            solver: None,
        }
    }
}

/// Wasserstein-1 distance and an optimal plan, with default options.
pub fn w1_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<(f64, TransportPlan)> {
    w1_distance_with(mu, nu, &W1Options::default())
}

pub fn w1_distance_with(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    opts: &W1Options,
) -> Result<(f64, TransportPlan)> {
    for m in [mu, nu] {
        if m.len() > opts.size_cap {
            return Err(Error::SizeCap {
                atoms: m.len(),
                cap: opts.size_cap,
            });
        }
    }
    let (a, b) = (mu.total_weight(), nu.total_weight());
    if (a - b).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    if mu.is_empty() || nu.is_empty() {
        return Ok((
            0.0,
            TransportPlan {
                pairs: Vec::new(),
                cost: 0.0,
            },
        ));
    }
    let renormed;
    let nu = if a == b {
        nu
    } else {
        renormed = nu.renormalized(a);
        &renormed
    };
    let registry = solver_registry();
    let plan = match &opts.solver {
        Some(name) => registry.get(name)?.solve(mu, nu)?,
        None => {
            let solver = registry
                .iter()
                .map(|(_, s)| s)
                .find(|s| s.check(mu, nu).is_ok())
                .expect("ssp accepts every input");
            solver.solve(mu, nu)?
        }
    };
    Ok((plan.cost, plan))
}

pub(crate) fn cost_matrix(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Vec<f64> {
    let mut c = Vec::with_capacity(mu.len() * nu.len());
    for a in mu.atoms() {
        for b in nu.atoms() {
            c.push(a.point.dist(b.point));
        }
    }
    c
}
