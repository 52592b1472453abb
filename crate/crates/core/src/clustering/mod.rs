//! Partitions of the unit set and the statistics that drive the variance
//! bounds.

mod greedy;
mod two_hop;
mod weight_invariant;

pub use greedy::greedy_clustering;
pub(crate) use greedy::MergeState;
pub use two_hop::two_hop_clustering;
pub use weight_invariant::{
    sample_clustering, weight_invariant_law, weight_invariant_law_default, RandomClusteringLaw, DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;

/// A partition of `0..n` into non-empty clusters.
///
/// Clusters are stored in canonical form: members ascending, clusters
/// ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clustering {
    clusters: Vec<Vec<usize>>,
    #[serde(skip)]
    assignment: Vec<usize>,
}

impl Clustering {
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut clusters: Vec<Vec<usize>> = clusters
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        if clusters.iter().any(Vec::is_empty) {
            return Err(Error::NotAPartition("empty cluster".into()));
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        let mut assignment = vec![usize::MAX; n];
        for (k, c) in clusters.iter().enumerate() {
            for &i in c {
                if i >= n {
                    return Err(Error::UnitOutOfRange { unit: i, n });
                }
                if assignment[i] != usize::MAX {
                    return Err(Error::NotAPartition(format!("unit {i} appears twice")));
                }
                assignment[i] = k;
            }
        }
        if let Some(i) = assignment.iter().position(|&k| k == usize::MAX) {
            return Err(Error::NotAPartition(format!("unit {i} is not assigned")));
        }
        Ok(Self { clusters, assignment })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            clusters: (0..n).map(|i| vec![i]).collect(),
            assignment: (0..n).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        if n == 0 {
            return Self::singletons(0);
        }
        Self {
            clusters: vec![(0..n).collect()],
            assignment: vec![0; n],
        }
    }

    /// Builds a clustering from a label per unit; labels need not be dense.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        Self::new(labels.len(), groups.into_values().collect())
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Number of clusters.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster(&self, k: usize) -> &[usize] {
        &self.clusters[k]
    }

    pub fn cluster_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.assignment
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub(crate) fn check_matches(&self, graph: &InterferenceGraph) -> Result<()> {
        if self.n() != graph.n() {
            return Err(Error::NotAPartition(format!(
                "clustering covers {} units but the graph has {}",
                self.n(),
                graph.n()
            )));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Clustering {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            clusters: Vec<Vec<usize>>,
        }
        let raw = Raw::deserialize(de)?;
        let n = raw.clusters.iter().map(Vec::len).sum();
        Clustering::new(n, raw.clusters).map_err(serde::de::Error::custom)
    }
}

/// Partition statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub n: usize,
    /// `sum_k |C_k|^2 / n^2`.
    pub eta: f64,
    /// `sum_{k != l} D_kl D_lk / n^2`.
    pub delta: f64,
    /// Total weight over within-cluster weight; NaN when the latter is zero.
    pub rho: f64,
    pub within_weight: f64,
    pub total_weight: f64,
    pub max_cluster_size: usize,
}

impl PartitionStats {
    pub fn compute(graph: &InterferenceGraph, clustering: &Clustering) -> Result<Self> {
        clustering.check_matches(graph)?;
        let n = graph.n();
        let nf = n as f64;
        let eta = clustering
            .clusters
            .iter()
            .map(|c| (c.len() * c.len()) as f64)
            .sum::<f64>()
            / (nf * nf);

        let mut within = 0.0;
        let mut cross: Vec<(usize, usize, f64)> = Vec::new();
        for e in graph.edges() {
            let (k, l) = (clustering.cluster_of(e.unit), clustering.cluster_of(e.neighbor));
            if k == l {
                within += e.weight;
            } else {
                cross.push((k, l, e.weight));
            }
        }
        cross.sort_by_key(|a| (a.0, a.1));
        let mut blocks: Vec<((usize, usize), f64)> = Vec::new();
        for (k, l, v) in cross {
            match blocks.last_mut() {
                Some((key, sum)) if *key == (k, l) => *sum += v,
                _ => blocks.push(((k, l), v)),
            }
        }
        let lookup = |key: (usize, usize)| {
            blocks
                .binary_search_by(|probe| probe.0.cmp(&key))
                .map(|idx| blocks[idx].1)
                .unwrap_or(0.0)
        };
        let delta_sum: f64 = blocks.iter().map(|&((k, l), d)| d * lookup((l, k))).sum();

        let total = graph.total_weight();
        let rho = if within == 0.0 { f64::NAN } else { total / within };
        Ok(Self {
            n,
            eta,
            delta: delta_sum / (nf * nf),
            rho,
            within_weight: within,
            total_weight: total,
            max_cluster_size: clustering.max_cluster_size(),
        })
    }

    /// Same statistics with `rho` replaced, as for randomized clusterings.
    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// The `delta <= max_k |C_k| / n` bound.
    pub fn delta_bound(&self) -> f64 {
        self.max_cluster_size as f64 / self.n as f64
    }
}
