//! Directed, weighted interference graphs.
//!
//! An edge `(i, j)` with weight `v_ij` means that unit `i`'s outcome moves by
//! `gamma * v_ij` when unit `j` is treated. Out-neighborhoods `N_i` are stored
//! contiguously so that per-unit queries are a slice lookup. Hop distances
//! (balls, growth constant, degree) are taken on the undirected skeleton.

mod generate;

pub use generate::{generate_cycle, generate_rgg, RggParams, WeightRule};

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::outcome::{outcome_bounds, OutcomeModel};

/// One directed interference edge: `unit` is influenced by `neighbor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub unit: usize,
    pub neighbor: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    n: usize,
    /// Sorted by `(unit, neighbor)`.
    edges: Vec<Edge>,
    /// `edges[offsets[i]..offsets[i + 1]]` is `N_i`.
    offsets: Vec<usize>,
    /// Undirected skeleton, each list sorted ascending.
    skeleton: Vec<Vec<usize>>,
}

impl InterferenceGraph {
    /// Builds a graph from `(i, j, v_ij)` triples.
    ///
    /// Self-loops, duplicate pairs, out-of-range ids and non-finite weights
    /// are rejected; use [`ValidationReport::check_edges`] to list them
    /// without failing.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|(unit, neighbor, weight)| Edge { unit, neighbor, weight })
            .collect();
        let structural: Vec<Violation> = ValidationReport::check_edges(n, &edges)
            .violations
            .into_iter()
            .filter(Violation::is_structural)
            .collect();
        if let Some(v) = structural.first() {
            return Err(Error::InvalidGraph(v.to_string()));
        }
        edges.sort_by_key(|e| (e.unit, e.neighbor));

        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.unit + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }

        let mut skeleton = vec![Vec::new(); n];
        for e in &edges {
            skeleton[e.unit].push(e.neighbor);
            skeleton[e.neighbor].push(e.unit);
        }
        for adj in &mut skeleton {
            adj.sort_unstable();
            adj.dedup();
        }

        Ok(Self {
            n,
            edges,
            offsets,
            skeleton,
        })
    }

    /// A graph with `n` units and no interference.
    pub fn empty(n: usize) -> Self {
        Self::new(n, std::iter::empty()).expect("edgeless graph is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Out-neighborhood `N_i` with weights.
    pub fn neighbors(&self, i: usize) -> &[Edge] {
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Undirected skeleton neighbors of `i`, ascending.
    pub fn skeleton_neighbors(&self, i: usize) -> &[usize] {
        &self.skeleton[i]
    }

    /// Weight `v_ij`, or `None` when `(i, j)` is not an edge.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let row = self.neighbors(i);
        row.binary_search_by_key(&j, |e| e.neighbor).ok().map(|k| row[k].weight)
    }

    /// `sum_i sum_{j in N_i} v_ij`.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Maximum degree `d` on the undirected skeleton.
    pub fn max_degree(&self) -> usize {
        self.skeleton.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `a = max_i sum_j max(v_ij, 0)`.
    pub fn max_positive_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.neighbors(i).iter().map(|e| e.weight.max(0.0)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Unordered pairs `{i, j}` (`i < j`) joined by at least one directed
    /// edge, with symmetrized weight `v_ij + v_ji` (a missing direction
    /// contributes zero). Sorted by pair.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, adj) in self.skeleton.iter().enumerate() {
            for &j in adj.iter().filter(|&&j| j > i) {
                let w = self.weight(i, j).unwrap_or(0.0) + self.weight(j, i).unwrap_or(0.0);
                out.push((i, j, w));
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        ValidationReport::check_edges(self.n, &self.edges)
    }

    /// Copy with each unit's weights scaled down so that `sum_j |v_ij| <= 1`.
    /// Rows already within the bound are left untouched.
    pub fn rescaled_rows(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let range = self.offsets[i]..self.offsets[i + 1];
            let abs_sum: f64 = out.edges[range.clone()].iter().map(|e| e.weight.abs()).sum();
            if abs_sum > 1.0 {
                for e in &mut out.edges[range] {
                    e.weight /= abs_sum;
                }
            }
        }
        out
    }

    /// Same topology with new weights, given in `edges()` order.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::LengthMismatch {
                what: "edge weights",
                expected: self.edges.len(),
                actual: weights.len(),
            });
        }
        let mut out = self.clone();
        for (e, &w) in out.edges.iter_mut().zip(weights) {
            e.weight = w;
        }
        Ok(out)
    }

    fn check_unit(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::UnitOutOfRange { unit: v, n: self.n });
        }
        Ok(())
    }

    /// Hop-distance layer sizes from `v`: entry `r` is the number of units
    /// exactly `r` hops away, truncated after `max_radius` when given.
    fn layer_sizes(&self, v: usize, max_radius: Option<usize>, dist: &mut [usize]) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut touched = vec![v];
        dist[v] = 0;
        let mut layers = vec![1usize];
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if max_radius.is_some_and(|r| du >= r) {
                continue;
            }
            for &w in &self.skeleton[u] {
                if dist[w] == UNSEEN {
                    dist[w] = du + 1;
                    touched.push(w);
                    if layers.len() <= du + 1 {
                        layers.push(0);
                    }
                    layers[du + 1] += 1;
                    queue.push_back(w);
                }
            }
        }
        for u in touched {
            dist[u] = UNSEEN;
        }
        layers
    }

    /// `B_r(v)`: units within `r` hops of `v` on the undirected skeleton,
    /// ascending.
    pub fn ball(&self, v: usize, r: usize) -> Result<Vec<usize>> {
        self.check_unit(v)?;
        let mut seen = vec![false; self.n];
        seen[v] = true;
        let mut frontier = vec![v];
        let mut out = vec![v];
        for _ in 0..r {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.skeleton[u] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend_from_slice(&next);
            frontier = next;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Restricted-growth constant: the largest `|B_{r+1}(v)| / |B_r(v)|` over
    /// all units and radii `1 <= r < r_max` (no cap when `r_max` is `None`).
    /// Radius zero is excluded so that `|B_2| <= kappa (d + 1)`.
    ///
    /// Disconnected graphs need no special handling: balls never leave a
    /// component, so the result is the maximum over components.
    pub fn growth_constant(&self, r_max: Option<usize>) -> f64 {
        (0..self.n)
            .into_par_iter()
            .map_init(
                || vec![usize::MAX; self.n],
                |dist, v| {
                    let layers = self.layer_sizes(v, r_max, dist);
                    let mut ball = layers[0];
                    let mut best = 1.0f64;
                    for r in 1..layers.len() {
                        let next = ball + layers[r];
                        if r > 1 && r_max.is_none_or(|cap| r - 1 < cap) {
                            best = best.max(next as f64 / ball as f64);
                        }
                        ball = next;
                    }
                    best
                },
            )
            .reduce(|| 1.0, f64::max)
    }
}

/// Summary statistics used to parameterize clustering and bounds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GraphStats {
    pub max_degree: usize,
    pub growth_constant: f64,
    /// Tight outcome bounds `(Y_L, Y_M)` when a model is supplied.
    pub outcome_bounds: Option<(f64, f64)>,
}

impl GraphStats {
    pub fn compute(graph: &InterferenceGraph, model: Option<&OutcomeModel>, r_max: Option<usize>) -> Result<Self> {
        let outcome_bounds = model.map(|m| outcome_bounds(graph, m)).transpose()?;
        Ok(Self {
            max_degree: graph.max_degree(),
            growth_constant: graph.growth_constant(r_max),
            outcome_bounds,
        })
    }
}

/// A single violated modeling assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnitOutOfRange { unit: usize, neighbor: usize },
    SelfLoop { unit: usize },
    DuplicateEdge { unit: usize, neighbor: usize },
    NonFiniteWeight { unit: usize, neighbor: usize },
    RowAbsSumExceeded { unit: usize, sum: f64 },
    NegativeTotal { total: f64 },
}

impl Violation {
    /// Violations that make the edge list unusable as a graph, as opposed to
    /// weight-normalization assumptions that are only reported.
    pub fn is_structural(&self) -> bool {
        !matches!(
            self,
            Violation::RowAbsSumExceeded { .. } | Violation::NegativeTotal { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitOutOfRange { unit, neighbor } => {
                write!(f, "edge ({unit}, {neighbor}) references a unit out of range")
            }
            Violation::SelfLoop { unit } => write!(f, "self-loop on unit {unit}"),
            Violation::DuplicateEdge { unit, neighbor } => {
                write!(f, "duplicate edge ({unit}, {neighbor})")
            }
            Violation::NonFiniteWeight { unit, neighbor } => {
                write!(f, "edge ({unit}, {neighbor}) has a non-finite weight")
            }
            Violation::RowAbsSumExceeded { unit, sum } => {
                write!(f, "unit {unit} weight sum {sum} > 1")
            }
            Violation::NegativeTotal { total } => write!(f, "global weight sum {total} < 0"),
        }
    }
}

/// Every violated modeling assumption of an edge list. Report-only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check_edges(n: usize, edges: &[Edge]) -> Self {
        let mut violations = Vec::new();
        let mut row_abs = vec![0.0f64; n];
        let mut total = 0.0;
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for e in edges {
            if e.unit >= n || e.neighbor >= n {
                violations.push(Violation::UnitOutOfRange {
                    unit: e.unit,
                    neighbor: e.neighbor,
                });
                continue;
            }
            if e.unit == e.neighbor {
                violations.push(Violation::SelfLoop { unit: e.unit });
            }
            if !e.weight.is_finite() {
                violations.push(Violation::NonFiniteWeight {
                    unit: e.unit,
                    neighbor: e.neighbor,
                });
                continue;
            }
            pairs.push((e.unit, e.neighbor));
            row_abs[e.unit] += e.weight.abs();
            total += e.weight;
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                violations.push(Violation::DuplicateEdge {
                    unit: w[0].0,
                    neighbor: w[0].1,
                });
            }
        }
        // A small slack keeps exactly-normalized rows (e.g. 1/3 + 1/3 + 1/3)
        // from being flagged through rounding.
        for (unit, &sum) in row_abs.iter().enumerate() {
            if sum > 1.0 + 1e-12 {
                violations.push(Violation::RowAbsSumExceeded { unit, sum });
            }
        }
        if total < 0.0 {
            violations.push(Violation::NegativeTotal { total });
        }
        Self { violations }
    }
}
