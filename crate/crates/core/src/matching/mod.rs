//! Matchings on the undirected skeleton with symmetrized weights
//! `u_ij = v_ij + v_ji`.

mod blossom;
mod decompose;

pub use decompose::{decompose_into_matchings, MatchingDecomposition};

use crate::graph::InterferenceGraph;

/// Above this many units the exact solver is replaced by greedy matching.
pub const DEFAULT_EXACT_THRESHOLD: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Sorted pairs `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of symmetrized weights over `pairs`.
    pub weight: f64,
    /// False when the greedy fallback produced the matching.
    pub exact: bool,
}

impl Matching {
    fn from_pairs(mut pairs: Vec<(usize, usize, f64)>, exact: bool) -> Self {
        pairs.sort_by_key(|&(i, j, _)| (i, j));
        let weight = pairs.iter().map(|p| p.2).sum();
        let pairs = pairs.into_iter().map(|(i, j, _)| (i, j)).collect();
        Self { pairs, weight, exact }
    }

    /// True when no unit occurs in two pairs.
    pub fn is_valid(&self, n: usize) -> bool {
        let mut used = vec![false; n];
        self.pairs.iter().all(|&(i, j)| {
            if i == j || i >= n || j >= n || used[i] || used[j] {
                return false;
            }
            used[i] = true;
            used[j] = true;
            true
        })
    }
}

/// Maximum-weight matching with the default exactness threshold.
pub fn max_weight_matching(graph: &InterferenceGraph) -> Matching {
    max_weight_matching_with_threshold(graph, DEFAULT_EXACT_THRESHOLD)
}

pub fn max_weight_matching_with_threshold(graph: &InterferenceGraph, exact_threshold: usize) -> Matching {
    let candidates: Vec<(usize, usize, f64)> = graph.undirected_edges().into_iter().filter(|e| e.2 > 0.0).collect();
    if graph.n() > exact_threshold {
        return greedy_matching(graph.n(), &candidates);
    }
    let mate = blossom::solve(graph.n(), &candidates);
    let pairs = candidates.into_iter().filter(|&(i, j, _)| mate[i] == Some(j)).collect();
    let matching = Matching::from_pairs(pairs, true);
    debug_assert!(matching.is_valid(graph.n()));
    matching
}

/// Heaviest edge first; ties go to the smaller pair.
fn greedy_matching(n: usize, candidates: &[(usize, usize, f64)]) -> Matching {
    let mut order: Vec<&(usize, usize, f64)> = candidates.iter().collect();
    order.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for &&(i, j, w) in &order {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j, w));
        }
    }
    Matching::from_pairs(pairs, false)
}

/// Maximum-cardinality matching over an unweighted edge list.
pub(crate) fn max_cardinality_matching(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let weighted: Vec<(usize, usize, f64)> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
    let mate = blossom::solve(n, &weighted);
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(i, j)| mate[i] == Some(j))
        .map(|&(i, j)| (i.min(j), i.max(j)))
        .collect();
    out.sort_unstable();
    out
}
