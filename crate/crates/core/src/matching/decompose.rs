use std::collections::BTreeSet;

use super::max_cardinality_matching;
use crate::graph::InterferenceGraph;

/// Edge-disjoint matchings covering every undirected edge once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingDecomposition {
    /// Each layer is a set of pairs `(i, j)` with `i < j`.
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl MatchingDecomposition {
    /// Symmetrized weight carried by layer `k`.
    pub fn layer_weight(&self, graph: &InterferenceGraph, k: usize) -> f64 {
        self.layers[k]
            .iter()
            .map(|&(i, j)| graph.weight(i, j).unwrap_or(0.0) + graph.weight(j, i).unwrap_or(0.0))
            .sum()
    }

    pub fn max_layer_weight(&self, graph: &InterferenceGraph) -> f64 {
        (0..self.layers.len())
            .map(|k| self.layer_weight(graph, k))
            .fold(0.0, f64::max)
    }
}

/// Peels matchings off the residual edge set, always covering every vertex
/// of maximum residual degree, so the maximum degree drops each round.
///
/// A round takes a maximum matching inside the max-degree set `U`, pairs
/// leftover `U` vertices with distinct outside neighbors in ascending id
/// order, and finally matches the still-uncovered `U` vertices into the rest
/// of the graph with a bipartite matching. Those leftovers form an
/// independent set whose members all have maximum degree, so Hall's
/// condition gives them a perfect matching whenever that degree is at
/// least two.
pub fn decompose_into_matchings(graph: &InterferenceGraph) -> MatchingDecomposition {
    let n = graph.n();
    let mut residual: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| graph.skeleton_neighbors(i).iter().copied().collect())
        .collect();
    let remove = |residual: &mut Vec<BTreeSet<usize>>, i: usize, j: usize| {
        residual[i].remove(&j);
        residual[j].remove(&i);
    };
    let mut layers = Vec::new();

    loop {
        let top = residual.iter().map(BTreeSet::len).max().unwrap_or(0);
        if top == 0 {
            break;
        }
        let in_u: Vec<bool> = residual.iter().map(|s| s.len() == top).collect();
        let inside: Vec<(usize, usize)> = (0..n)
            .filter(|&i| in_u[i])
            .flat_map(|i| residual[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .filter(|&(_, j)| in_u[j])
            .collect();

        let mut layer = max_cardinality_matching(n, &inside);
        let mut covered = vec![false; n];
        for &(i, j) in &layer {
            covered[i] = true;
            covered[j] = true;
        }
        for u in 0..n {
            if !in_u[u] || covered[u] {
                continue;
            }
            if let Some(&w) = residual[u].iter().find(|&&w| !in_u[w] && !covered[w]) {
                covered[u] = true;
                covered[w] = true;
                layer.push((u.min(w), u.max(w)));
            }
        }
        for &(i, j) in &layer {
            remove(&mut residual, i, j);
        }
        layer.sort_unstable();
        if !layer.is_empty() {
            layers.push(layer);
        }

        let leftover: Vec<usize> = (0..n).filter(|&u| in_u[u] && !covered[u]).collect();
        if !leftover.is_empty() {
            let cross: Vec<(usize, usize)> = leftover
                .iter()
                .flat_map(|&u| residual[u].iter().map(move |&w| (u, w)))
                .collect();
            let mut extra = max_cardinality_matching(n, &cross);
            for &(i, j) in &extra {
                remove(&mut residual, i, j);
            }
            extra.sort_unstable();
            if !extra.is_empty() {
                layers.push(extra);
            }
        }
    }
    MatchingDecomposition { layers }
}
