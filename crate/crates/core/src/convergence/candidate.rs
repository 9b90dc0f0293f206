use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::approximation::{region_from_field, GridFamily, GridRegion};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCandidate {
    /// One region per level, on grids of spacing `r0 * 2^-(l+2)`.
    pub chain: Vec<GridRegion>,
    /// Union of the chain on the finest grid.
    pub mask: GridRegion,
}

/// Builds the increasing chain of cell unions around `w` whose
/// `r0 * 2^-(l+1)` neighbourhoods lie in every member of the last `min_tail`
/// members of `seq`.
pub fn extract_limit_candidate(
    seq: &[Domain],
    w: Point,
    r0: f64,
    levels: u32,
    min_tail: usize,
) -> Result<LimitCandidate> {
    if !(r0 > 0.0) || levels == 0 {
        return Err(Error::InvalidArgument("need r0 > 0 and at least one level".into()));
    }
    if seq.is_empty() {
        return Err(Error::InvalidArgument("domain sequence is empty".into()));
    }
    let tail = seq.len().saturating_sub(min_tail.max(1));
    if let Some(d) = seq[tail..].iter().find(|d| d.boundary_distance(w) <= 2.0 * r0) {
        return Err(Error::InvalidArgument(format!(
            "basepoint is within 2 r0 of the boundary of `{}`",
            d.label()
        )));
    }
    let mut chain = Vec::with_capacity(levels as usize);
    for l in 0..levels {
        let h = r0 * 0.5f64.powi(l as i32 + 2);
        let reach = r0 * 0.5f64.powi(l as i32 + 1);
        let family = GridFamily::of_sequence(seq, h)?;
        let field = &family.tail_min[family.last_tail(min_tail)];
        chain.push(region_from_field(&family.lattice, w, |k| field[k] >= reach + h * FRAC_1_SQRT_2)?);
    }
    let finest = chain.last().expect("levels >= 1");
    let mut cells: BTreeSet<(i64, i64)> = finest.cells.iter().copied().collect();
    for region in &chain[..chain.len() - 1] {
        let split = (region.h / finest.h).round() as i64;
        for &(i, j) in &region.cells {
            for a in 0..split {
                for b in 0..split {
                    cells.insert((i * split + a, j * split + b));
                }
            }
        }
    }
    let mask = GridRegion::new(finest.h, finest.marked, cells.into_iter().collect());
    Ok(LimitCandidate { chain, mask })
}
