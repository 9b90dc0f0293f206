use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::approximation::{cell_of, GridFamily};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub h: f64,
    /// Compacts `K_m` use clearance `1 / (2m)` in the limit.
    pub ladder: Vec<u32>,
    /// Shortest tail (in members) that may witness "for all n large enough".
    pub min_tail: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            h: 0.005,
            ladder: vec![1, 2, 3],
            min_tail: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRung {
    pub m: u32,
    /// `K_m` is empty (its threshold exceeds the clearance at the basepoint).
    pub vacuous: bool,
    /// 1-based position from which every member contains `K_m`.
    pub tail_start: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelVerdict {
    /// Every compact of the ladder is eventually inside the members.
    pub absorbs_compacts: bool,
    /// The grid kernel of the sequence lies in the limit up to one cell.
    pub limit_is_maximal: bool,
    pub rungs: Vec<KernelRung>,
    /// Kernel cells farther than one cell from the limit.
    pub excess_cells: usize,
}

impl KernelVerdict {
    pub fn ok(&self) -> bool {
        self.absorbs_compacts && self.limit_is_maximal
    }
}

/// Grid test of kernel convergence of `seq` to `limit` with the constant
/// basepoint `w`, on the supplied finite prefix.
pub fn check_kernel_convergence(limit: &Domain, seq: &[Domain], w: Point, opts: &KernelOptions) -> Result<KernelVerdict> {
    if !limit.contains(w) {
        return Err(Error::PointOutsideDomain(w));
    }
    let family = GridFamily::new(limit, seq, opts.h)?;
    kernel_on(&family, w, opts)
}

pub fn kernel_on(family: &GridFamily, w: Point, opts: &KernelOptions) -> Result<KernelVerdict> {
    let lattice = &family.lattice;
    let h = lattice.h;
    if opts.ladder.iter().any(|&m| m == 0 || (1.0 / m as f64) < 4.0 * h) {
        return Err(Error::InvalidArgument(format!(
            "every ladder rung m needs h <= 1/(4m); h = {h}"
        )));
    }
    // A closed cell lies inside a domain when its center clears the boundary
    // by more than half a diagonal.
    let inside = h * FRAC_1_SQRT_2;
    let last = family.last_tail(opts.min_tail);
    let start = cell_of(w, h);

    let mut rungs = Vec::new();
    for &m in &opts.ladder {
        let threshold = 0.5 / m as f64;
        let compact = lattice.flood(start, |k| family.limit[k] >= threshold);
        if compact.is_empty() {
            rungs.push(KernelRung {
                m,
                vacuous: true,
                tail_start: Some(1),
            });
            continue;
        }
        let idx: Vec<usize> = compact.iter().map(|&c| lattice.index(c).expect("on lattice")).collect();
        let tail_start = (0..=last)
            .find(|&k| idx.iter().all(|&i| family.tail_min[k][i] > inside))
            .map(|k| k + 1);
        rungs.push(KernelRung {
            m,
            vacuous: false,
            tail_start,
        });
    }
    let absorbs_compacts = rungs.iter().all(|r| r.tail_start.is_some());

    // Components are nested in the tail start, so the union over tails is
    // the component for the latest admissible tail.
    let kernel = lattice.flood(start, |k| family.tail_min[last][k] > inside);
    let in_limit = |c: (i64, i64)| lattice.index(c).is_some_and(|k| family.limit[k] > 0.0);
    let excess_cells = kernel
        .iter()
        .filter(|c| !(-1..=1).any(|di| (-1..=1).any(|dj| in_limit((c.0 + di, c.1 + dj)))))
        .count();
    Ok(KernelVerdict {
        absorbs_compacts,
        limit_is_maximal: excess_cells == 0,
        rungs,
        excess_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(r: f64) -> Domain {
        Domain::disk(Point::ORIGIN, r).unwrap()
    }

    fn shrinking() -> Vec<Domain> {
        (2..=8).map(|n| disk(1.0 - 1.0 / n as f64)).collect()
    }

    #[test]
    fn exhaustion_converges_to_unit_disk() {
        let v = check_kernel_convergence(&Domain::unit_disk(), &shrinking(), Point::ORIGIN, &KernelOptions::default()).unwrap();
        assert!(v.absorbs_compacts && v.limit_is_maximal, "{v:?}");
        // K_3 has radius about 5/6 and first fits inside radius 1 - 1/n at n = 7.
        assert_eq!(v.rungs[2].tail_start, Some(6));
    }

    #[test]
    fn half_disk_limit_is_not_maximal() {
        let v = check_kernel_convergence(&disk(0.5), &shrinking(), Point::ORIGIN, &KernelOptions::default()).unwrap();
        assert!(v.absorbs_compacts);
        assert!(!v.limit_is_maximal);
        assert!(v.excess_cells > 0);
    }

    #[test]
    fn oscillation_breaks_absorption() {
        let seq: Vec<Domain> = (0..7).map(|k| if k % 2 == 0 { disk(0.5) } else { Domain::unit_disk() }).collect();
        let v = check_kernel_convergence(&Domain::unit_disk(), &seq, Point::ORIGIN, &KernelOptions::default()).unwrap();
        assert!(!v.absorbs_compacts);
        assert!(v.rungs.iter().any(|r| r.tail_start.is_none()));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let opts = KernelOptions {
            h: 0.1,
            ..KernelOptions::default()
        };
        assert!(check_kernel_convergence(&Domain::unit_disk(), &shrinking(), Point::ORIGIN, &opts).is_err());
    }
}
