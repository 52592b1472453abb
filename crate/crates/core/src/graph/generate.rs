//! Synthetic instance generators: random geometric graphs with optional
//! long-range links, and `(d, kappa)`-cycle networks.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::InterferenceGraph;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// How interference weights are assigned to the directed edges of a
/// generated topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum WeightRule {
    /// i.i.d. `U(-1/r, 2/r)` where `r` is the generator's nominal degree
    /// (`r0 + r1` for geometric graphs, `2(kappa - 1) + 2d` for cycles).
    #[default]
    ScaledUniform,
    /// `v_ij = 1 / |N_i|`.
    InverseDegree,
    /// i.i.d. `U(low, high)`.
    Uniform {
        low: f64,
        high: f64,
    },
    Constant {
        value: f64,
    },
}

impl WeightRule {
    fn assign<R: Rng>(
        self,
        pairs: &[(usize, usize)],
        out_degree: &[usize],
        nominal_degree: f64,
        rng: &mut R,
    ) -> Vec<(usize, usize, f64)> {
        pairs
            .iter()
            .map(|&(i, j)| {
                let w = match self {
                    WeightRule::ScaledUniform => {
                        let r = nominal_degree;
                        rng.random_range(-1.0 / r..2.0 / r)
                    }
                    WeightRule::InverseDegree => 1.0 / out_degree[i] as f64,
                    WeightRule::Uniform { low, high } => {
                        if low < high {
                            rng.random_range(low..high)
                        } else {
                            low
                        }
                    }
                    WeightRule::Constant { value } => value,
                };
                (i, j, w)
            })
            .collect()
    }
}

/// Parameters of the random geometric graph model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RggParams {
    pub n: usize,
    /// Limiting expected number of geometric neighbors.
    pub r0: f64,
    /// Long-range links drawn per unit.
    pub r1: usize,
    #[serde(default)]
    pub weights: WeightRule,
    /// Scale rows so that `sum_j |v_ij| <= 1` after drawing weights.
    #[serde(default)]
    pub rescale: bool,
}

impl RggParams {
    pub fn new(n: usize, r0: f64, r1: usize) -> Self {
        Self {
            n,
            r0,
            r1,
            weights: WeightRule::ScaledUniform,
            rescale: false,
        }
    }
}

/// Random geometric graph on `[0, sqrt(n)]^2`.
///
/// Units closer than `sqrt(r0 / pi)` are linked; every unit then links to
/// `r1` distinct units outside that radius, chosen uniformly. Each undirected
/// link yields both directed edges, and each directed edge gets its own
/// weight. Deterministic for a fixed seed.
pub fn generate_rgg(params: &RggParams, seed: u64) -> Result<InterferenceGraph> {
    let RggParams { n, r0, r1, .. } = *params;
    if n == 0 {
        return Err(Error::invalid("rgg needs n >= 1"));
    }
    if !(r0.is_finite() && r0 >= 0.0) || r0 + r1 as f64 <= 0.0 {
        return Err(Error::invalid(format!(
            "rgg needs r0 >= 0 and r0 + r1 > 0 (got r0 = {r0}, r1 = {r1})"
        )));
    }

    let mut rng = stream_rng(seed, 0, Stream::Topology);
    let side = (n as f64).sqrt();
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect();

    let radius = (r0 / std::f64::consts::PI).sqrt();
    let mut geometric: Vec<Vec<usize>> = vec![Vec::new(); n];
    if radius > 0.0 {
        // Bucket points into cells of side `radius`; neighbors lie in the
        // surrounding 3x3 block.
        let cells = ((side / radius).ceil() as usize).max(1);
        let cell_of = |x: f64| ((x / radius) as usize).min(cells - 1);
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
        for (i, &(x, y)) in points.iter().enumerate() {
            grid[cell_of(x) * cells + cell_of(y)].push(i);
        }
        let r2 = radius * radius;
        for (i, &(x, y)) in points.iter().enumerate() {
            let (cx, cy) = (cell_of(x), cell_of(y));
            for gx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                for gy in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
                    for &j in &grid[gx * cells + gy] {
                        if j == i {
                            continue;
                        }
                        let (dx, dy) = (points[j].0 - x, points[j].1 - y);
                        if dx * dx + dy * dy <= r2 {
                            geometric[i].push(j);
                        }
                    }
                }
            }
        }
        for adj in &mut geometric {
            adj.sort_unstable();
        }
    }

    let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, adj) in geometric.iter().enumerate() {
        for &j in adj.iter().filter(|&&j| j > i) {
            links.insert((i, j));
        }
    }

    if r1 > 0 {
        let mut far_rng = stream_rng(seed, 1, Stream::Topology);
        for i in 0..n {
            let eligible = n - 1 - geometric[i].len();
            let mut chosen: BTreeSet<usize> = BTreeSet::new();
            if eligible <= r1 {
                chosen.extend((0..n).filter(|&j| j != i && geometric[i].binary_search(&j).is_err()));
            } else {
                while chosen.len() < r1 {
                    let j = far_rng.random_range(0..n);
                    if j != i && geometric[i].binary_search(&j).is_err() {
                        chosen.insert(j);
                    }
                }
            }
            for j in chosen {
                links.insert((i.min(j), i.max(j)));
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = links.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
    pairs.sort_unstable();
    let mut out_degree = vec![0usize; n];
    for &(i, _) in &pairs {
        out_degree[i] += 1;
    }
    let mut weight_rng = stream_rng(seed, 0, Stream::Weights);
    let edges = params
        .weights
        .assign(&pairs, &out_degree, r0 + r1 as f64, &mut weight_rng);
    let graph = InterferenceGraph::new(n, edges)?;
    Ok(if params.rescale { graph.rescaled_rows() } else { graph })
}

/// `(d, kappa)`-cycle: unit `i` links to `i +- 1, .., i +- (kappa - 1)` and
/// to `i +- kappa, i +- 2 kappa, .., i +- d kappa` (all mod `n`).
///
/// `seed` only matters for randomized weight rules.
pub fn generate_cycle(n: usize, d: usize, kappa: usize, weights: WeightRule, seed: u64) -> Result<InterferenceGraph> {
    if kappa < 1 || kappa > d {
        return Err(Error::invalid(format!(
            "cycle needs 1 <= kappa <= d (got d = {d}, kappa = {kappa})"
        )));
    }
    if n <= 2 * d * kappa {
        return Err(Error::invalid(format!(
            "cycle needs n > 2 d kappa = {} (got n = {n})",
            2 * d * kappa
        )));
    }
    let mut pairs = Vec::new();
    let mut out_degree = vec![0usize; n];
    for i in 0..n {
        let offsets = (1..kappa).chain((1..=d).map(|m| m * kappa));
        let mut nbrs: Vec<usize> = offsets.flat_map(|k| [(i + k) % n, (i + n - k % n) % n]).collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        out_degree[i] = nbrs.len();
        pairs.extend(nbrs.into_iter().map(|j| (i, j)));
    }
    let nominal = (2 * (kappa - 1) + 2 * d) as f64;
    let mut rng = stream_rng(seed, 0, Stream::Weights);
    InterferenceGraph::new(n, weights.assign(&pairs, &out_degree, nominal, &mut rng))
}
