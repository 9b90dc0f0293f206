use crate::error::{Error, Result};
use crate::sampler::EmpiricalMeasure;
use crate::transport::{cost_matrix, TransportPlan, TransportSolver};

/// Jonker-Volgenant assignment for equal-count, equal-weight inputs. Exact,
/// O(n^3) time, dense cost matrix.
pub struct Hungarian;

/// Epsilon-scaling auction for equal-count, equal-weight inputs. The cost
/// is within `AUCTION_RELATIVE_EPS` times the largest distance of optimal;
/// much faster than [`Hungarian`] when many atoms nearly coincide.
pub struct Auction;

/// Final bidding increment relative to the largest pairwise distance.
pub const AUCTION_RELATIVE_EPS: f64 = 1e-13;

/// Relative spread of weights still treated as uniform.
const UNIFORM_TOLERANCE: f64 = 1e-9;

fn uniform_weight(m: &EmpiricalMeasure) -> Option<f64> {
    let first = m.atoms().first()?.weight;
    m.atoms()
        .iter()
        .all(|a| (a.weight - first).abs() <= UNIFORM_TOLERANCE * first)
        .then_some(first)
}

fn check_matching(solver: &str, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<()> {
    let reject = |reason: &str| {
        Err(Error::UnsupportedInput {
            solver: solver.into(),
            reason: reason.into(),
        })
    };
    if mu.len() != nu.len() {
        return reject("atom counts differ");
    }
    if uniform_weight(mu).is_none() || uniform_weight(nu).is_none() {
        return reject("weights are not uniform");
    }
    Ok(())
}

fn matching_plan(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    solve: impl FnOnce(&[f64], usize) -> Vec<usize>,
) -> TransportPlan {
    let n = mu.len();
    let mass = mu.total_weight() / n as f64;
    let cost = cost_matrix(mu, nu);
    let assignment = solve(&cost, n);
    let pairs = assignment.iter().enumerate().map(|(i, &j)| (i, j, mass)).collect();
    TransportPlan::from_pairs(pairs, mu, nu)
}

impl TransportSolver for Hungarian {
    fn name(&self) -> &'static str {
        "hungarian"
    }

    fn check(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<()> {
        check_matching(self.name(), mu, nu)
    }

    fn solve(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportPlan> {
        self.check(mu, nu)?;
        Ok(matching_plan(mu, nu, assign))
    }
}

impl TransportSolver for Auction {
    fn name(&self) -> &'static str {
        "auction"
    }

    fn check(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<()> {
        check_matching(self.name(), mu, nu)
    }

    fn solve(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportPlan> {
        self.check(mu, nu)?;
        Ok(matching_plan(mu, nu, |cost, n| {
            let max = cost.iter().fold(0.0f64, |a, &c| a.max(c));
            auction(cost, n, (max * AUCTION_RELATIVE_EPS).max(f64::MIN_POSITIVE))
        }))
    }
}

/// Minimum-cost perfect matching on a dense `n x n` row-major cost matrix;
/// returns the column assigned to each row.
///
/// Jonker-Volgenant: column reduction and augmenting row reduction build a
/// large partial matching with feasible prices, then shortest augmenting
/// paths place the remaining rows.
pub fn assign(cost: &[f64], n: usize) -> Vec<usize> {
    const FREE: usize = usize::MAX;
    if n == 0 {
        return Vec::new();
    }
    let c = |i: usize, j: usize| cost[i * n + j];
    let mut v = vec![0.0; n];
    let mut col_of = vec![FREE; n];
    let mut row_of = vec![FREE; n];

    // Column reduction.
    let mut matches = vec![0u32; n];
    for j in (0..n).rev() {
        let mut imin = 0;
        for i in 1..n {
            if c(i, j) < c(imin, j) {
                imin = i;
            }
        }
        v[j] = c(imin, j);
        matches[imin] += 1;
        if matches[imin] == 1 {
            col_of[imin] = j;
            row_of[j] = imin;
        } else if v[j] < v[col_of[imin]] {
            let j1 = col_of[imin];
            col_of[imin] = j;
            row_of[j] = imin;
            row_of[j1] = FREE;
        }
    }

    // Reduction transfer.
    let mut free = Vec::new();
    for i in 0..n {
        match matches[i] {
            0 => free.push(i),
            1 => {
                let j1 = col_of[i];
                let min = (0..n).filter(|&j| j != j1).map(|j| c(i, j) - v[j]).fold(f64::INFINITY, f64::min);
                if min.is_finite() {
                    v[j1] -= min;
                }
            }
            _ => {}
        }
    }

    // Augmenting row reduction, twice, with a step budget: stopping early
    // keeps every matched row on a cheapest column.
    let mut budget = 16 * n;
    for _ in 0..2 {
        let pending = std::mem::take(&mut free);
        let mut stack: Vec<usize> = pending.into_iter().rev().collect();
        while let Some(i) = stack.pop() {
            if budget == 0 {
                free.push(i);
                continue;
            }
            budget -= 1;
            let (mut j1, mut j2) = (0, FREE);
            let mut umin = c(i, 0) - v[0];
            let mut usub = f64::INFINITY;
            for j in 1..n {
                let h = c(i, j) - v[j];
                if h < usub {
                    if h >= umin {
                        usub = h;
                        j2 = j;
                    } else {
                        usub = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            let mut i0 = row_of[j1];
            let strict = umin < usub;
            if strict {
                v[j1] -= usub - umin;
            } else if i0 != FREE && j2 != FREE {
                j1 = j2;
                i0 = row_of[j2];
            }
            col_of[i] = j1;
            row_of[j1] = i;
            if i0 != FREE {
                col_of[i0] = FREE;
                if strict {
                    stack.push(i0);
                } else {
                    free.push(i0);
                }
            }
        }
    }

    // Shortest augmenting paths for the rows still free.
    let mut d = vec![0.0; n];
    let mut pred = vec![0usize; n];
    let mut cols: Vec<usize> = Vec::with_capacity(n);
    for &start in &free {
        cols.clear();
        cols.extend(0..n);
        for j in 0..n {
            d[j] = c(start, j) - v[j];
            pred[j] = start;
        }
        // cols[..low] are scanned, cols[low..up] sit at distance `min`.
        let (mut low, mut up) = (0, 0);
        let mut min = 0.0;
        let mut scanned;
        let end = 'search: loop {
            if up == low {
                scanned = low;
                min = d[cols[up]];
                up += 1;
                for k in up..n {
                    let j = cols[k];
                    let h = d[j];
                    if h <= min {
                        if h < min {
                            up = low;
                            min = h;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                }
                for &j in &cols[low..up] {
                    if row_of[j] == FREE {
                        break 'search j;
                    }
                }
            }
            let j1 = cols[low];
            low += 1;
            let i = row_of[j1];
            let h = c(i, j1) - v[j1] - min;
            let mut k = up;
            while k < n {
                let j = cols[k];
                let reduced = c(i, j) - v[j] - h;
                if reduced < d[j] {
                    pred[j] = i;
                    if reduced == min {
                        if row_of[j] == FREE {
                            d[j] = reduced;
                            scanned = low;
                            break 'search j;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                    d[j] = reduced;
                }
                k += 1;
            }
        };
        for &j in &cols[..scanned] {
            v[j] += d[j] - min;
        }
        let mut j = end;
        loop {
            let i = pred[j];
            row_of[j] = i;
            let prev = col_of[i];
            col_of[i] = j;
            if i == start {
                break;
            }
            j = prev;
        }
    }
    col_of
}

/// Forward auction with epsilon scaling; the total cost is within
/// `n * eps_final` of optimal.
pub fn auction(cost: &[f64], n: usize, eps_final: f64) -> Vec<usize> {
    const FREE: usize = usize::MAX;
    if n <= 1 {
        return vec![0; n];
    }
    let max = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    if max == 0.0 {
        return (0..n).collect();
    }
    let mut prices = vec![0.0; n];
    let mut eps = (max / 4.0).max(eps_final);
    let mut owner = vec![FREE; n];
    let mut col_of = vec![FREE; n];
    loop {
        owner.fill(FREE);
        col_of.fill(FREE);
        let mut queue: Vec<usize> = (0..n).rev().collect();
        while let Some(i) = queue.pop() {
            let row = &cost[i * n..(i + 1) * n];
            let (mut best, mut second, mut bj) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for (j, (&c, &p)) in row.iter().zip(&prices).enumerate() {
                let val = -c - p;
                if val > best {
                    second = best;
                    best = val;
                    bj = j;
                } else if val > second {
                    second = val;
                }
            }
            prices[bj] += best - second + eps;
            let prev = owner[bj];
            if prev != FREE {
                col_of[prev] = FREE;
                queue.push(prev);
            }
            owner[bj] = i;
            col_of[i] = bj;
        }
        if eps <= eps_final {
            break;
        }
        eps = (eps / 5.0).max(eps_final);
    }
    col_of
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrix() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = assign(&cost, 3);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i * 3 + j]).sum();
        assert_eq!(total, 5.0);
    }

    fn total(cost: &[f64], n: usize, a: &[usize]) -> f64 {
        a.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum()
    }

    fn brute_force(cost: &[f64], n: usize) -> f64 {
        fn go(cost: &[f64], n: usize, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if row == n {
                *best = best.min(acc);
                return;
            }
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    go(cost, n, row + 1, used, acc + cost[row * n + j], best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(cost, n, 0, &mut vec![false; n], 0.0, &mut best);
        best
    }

    fn is_permutation(a: &[usize]) -> bool {
        let mut seen = vec![false; a.len()];
        a.iter().all(|&j| j < a.len() && !std::mem::replace(&mut seen[j], true))
    }

    #[test]
    fn both_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=7 {
            for round in 0..20 {
                let cost: Vec<f64> = (0..n * n)
                    .map(|_| if round % 4 == 0 { rng.gen_range(0..3) as f64 } else { rng.gen::<f64>() })
                    .collect();
                let best = brute_force(&cost, n);
                let a = assign(&cost, n);
                let b = auction(&cost, n, 1e-12);
                assert!(is_permutation(&a) && is_permutation(&b));
                assert!((total(&cost, n, &a) - best).abs() < 1e-12, "n = {n}");
                assert!(total(&cost, n, &b) - best < n as f64 * 1e-12 + 1e-15, "n = {n}");
            }
        }
    }

    #[test]
    fn degenerate_rows() {
        let n = 50;
        // Identical rows, then rows that differ only in the last few bits.
        let same: Vec<f64> = (0..n * n).map(|k| (k % n) as f64).collect();
        let near: Vec<f64> = (0..n * n).map(|k| 1.0 + (k % n) as f64 * 1e-15 + (k / n) as f64 * 1e-16).collect();
        for cost in [same, near] {
            let a = assign(&cost, n);
            let b = auction(&cost, n, 1e-14);
            assert!(is_permutation(&a) && is_permutation(&b));
            assert!((total(&cost, n, &a) - total(&cost, n, &b)).abs() < 1e-11);
        }
        assert_eq!(auction(&[0.0; 4], 2, 1e-12), vec![0, 1]);
    }
}
