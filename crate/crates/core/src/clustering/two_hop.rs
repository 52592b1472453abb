use super::Clustering;
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;

/// Two-hop clustering with cluster size cap `floor(kappa (d + 1))`.
///
/// Scanning units in ascending order, every 2-hop ball lying wholly among
/// the unassigned units becomes a cluster. The units left over are cut into
/// consecutive chunks of the cap size. A ball larger than the cap (only
/// possible when `kappa` understates the growth constant) is skipped so the
/// cap always holds.
pub fn two_hop_clustering(graph: &InterferenceGraph, kappa: f64) -> Result<Clustering> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::invalid(format!(
            "kappa must be a finite value >= 1, got {kappa}"
        )));
    }
    let n = graph.n();
    let cap = ((kappa * (graph.max_degree() + 1) as f64).floor() as usize).max(1);
    let mut free = vec![true; n];
    let mut clusters = Vec::new();
    for v in 0..n {
        if !free[v] {
            continue;
        }
        let ball = graph.ball(v, 2)?;
        if ball.len() <= cap && ball.iter().all(|&u| free[u]) {
            for &u in &ball {
                free[u] = false;
            }
            clusters.push(ball);
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&u| free[u]).collect();
    clusters.extend(rest.chunks(cap).map(<[usize]>::to_vec));
    Clustering::new(n, clusters)
}
