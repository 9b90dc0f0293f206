use crate::error::Result;
use crate::sampler::EmpiricalMeasure;
use crate::transport::{cost_matrix, TransportPlan, TransportSolver};

/// Successive shortest paths (Dijkstra with potentials) on the complete
/// bipartite transport network. Handles arbitrary positive weights; each
/// augmentation exhausts a supply, a demand or a reverse edge, so the run
/// time is O((m + n) m n) on typical inputs.
pub struct SuccessiveShortestPaths;

impl TransportSolver for SuccessiveShortestPaths {
    fn name(&self) -> &'static str {
        "ssp"
    }

    fn check(&self, _mu: &EmpiricalMeasure, _nu: &EmpiricalMeasure) -> Result<()> {
        Ok(())
    }

    fn solve(&self, mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<TransportPlan> {
        let (m, n) = (mu.len(), nu.len());
        let cost = cost_matrix(mu, nu);
        let mut supply: Vec<f64> = mu.atoms().iter().map(|a| a.weight).collect();
        let mut demand: Vec<f64> = nu.atoms().iter().map(|a| a.weight).collect();
        let negligible = 1e-14 * mu.total_weight().max(nu.total_weight());
        let mut flow = vec![0.0; m * n];
        // Node potentials: sources 0..m, sinks m..m+n.
        let mut pot = vec![0.0; m + n];
        let mut dist = vec![0.0; m + n];
        let mut done = vec![false; m + n];
        // Predecessor of a sink is a source; of a source, a sink (reverse edge).
        let mut pred = vec![usize::MAX; m + n];

        loop {
            if supply.iter().all(|&s| s <= negligible) || demand.iter().all(|&d| d <= negligible) {
                break;
            }
            dist.fill(f64::INFINITY);
            done.fill(false);
            pred.fill(usize::MAX);
            for i in 0..m {
                if supply[i] > negligible {
                    dist[i] = 0.0;
                }
            }
            let mut target = None;
            loop {
                let mut best = f64::INFINITY;
                let mut node = usize::MAX;
                for (k, &d) in dist.iter().enumerate() {
                    if !done[k] && d < best {
                        best = d;
                        node = k;
                    }
                }
                if node == usize::MAX {
                    break;
                }
                done[node] = true;
                if node >= m && demand[node - m] > negligible {
                    target = Some(node);
                    break;
                }
                if node < m {
                    let row = &cost[node * n..(node + 1) * n];
                    for j in 0..n {
                        let t = m + j;
                        if done[t] {
                            continue;
                        }
                        let nd = best + row[j] + pot[node] - pot[t];
                        if nd < dist[t] {
                            dist[t] = nd;
                            pred[t] = node;
                        }
                    }
                } else {
                    let j = node - m;
                    for i in 0..m {
                        if done[i] || flow[i * n + j] <= negligible {
                            continue;
                        }
                        let nd = best - cost[i * n + j] + pot[node] - pot[i];
                        if nd < dist[i] {
                            dist[i] = nd;
                            pred[i] = node;
                        }
                    }
                }
            }
            let Some(sink) = target else { break };
            let reach = dist[sink];
            for k in 0..m + n {
                // Reduced costs stay non-negative with distances capped at the
                // target's, since unsettled nodes lie at least that far.
                pot[k] += dist[k].min(reach);
            }
            // Bottleneck along the path.
            let mut push = demand[sink - m];
            let mut node = sink;
            loop {
                let p = pred[node];
                if p == usize::MAX {
                    push = push.min(supply[node]);
                    break;
                }
                if node < m {
                    push = push.min(flow[node * n + (p - m)]);
                }
                node = p;
            }
            let mut node = sink;
            loop {
                let p = pred[node];
                if p == usize::MAX {
                    supply[node] -= push;
                    break;
                }
                if node >= m {
                    flow[p * n + (node - m)] += push;
                } else {
                    flow[node * n + (p - m)] -= push;
                }
                node = p;
            }
            demand[sink - m] -= push;
        }

        let mut pairs = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let f = flow[i * n + j];
                if f > negligible {
                    pairs.push((i, j, f));
                }
            }
        }
        Ok(TransportPlan::from_pairs(pairs, mu, nu))
    }
}
