//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use netmix::clustering::Clustering;
use netmix::graph::InterferenceGraph;
use netmix::outcome::OutcomeModel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Directed edges present with probability `density`, weights `U(low, high)`,
/// optionally rescaled so every row has absolute sum at most one.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    low: f64,
    high: f64,
    rescale: bool,
) -> InterferenceGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                edges.push((i, j, rng.random_range(low..high)));
            }
        }
    }
    let g = InterferenceGraph::new(n, edges).unwrap();
    if rescale {
        g.rescaled_rows()
    } else {
        g
    }
}

/// Uniform labels in `0..m`, empty clusters dropped.
pub fn random_clustering(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Clustering {
    let mut clusters = vec![Vec::new(); m];
    for i in 0..n {
        clusters[rng.random_range(0..m)].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    Clustering::new(n, clusters).unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng, n: usize) -> OutcomeModel {
    let alpha = (0..n).map(|_| rng.random_range(4.0..6.0)).collect();
    let beta = (0..n).map(|_| rng.random_range(-0.5..1.5)).collect();
    OutcomeModel::new(alpha, beta, rng.random_range(0.2..1.5)).unwrap()
}

pub fn total_weight(g: &InterferenceGraph) -> f64 {
    g.edges().iter().map(|e| e.weight).sum()
}

pub fn within_weight(g: &InterferenceGraph, clusters: &[Vec<usize>]) -> f64 {
    let label = labels(g.n(), clusters);
    g.edges()
        .iter()
        .filter(|e| label[e.unit] == label[e.neighbor])
        .map(|e| e.weight)
        .sum()
}

pub fn labels(n: usize, clusters: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for (k, c) in clusters.iter().enumerate() {
        for &i in c {
            label[i] = k;
        }
    }
    label
}

pub fn mean_beta(m: &OutcomeModel) -> f64 {
    m.beta.iter().sum::<f64>() / m.beta.len() as f64
}

/// `Y_i = alpha_i + z_i beta_i + gamma sum_j v_ij z_j`.
pub fn outcomes(g: &InterferenceGraph, m: &OutcomeModel, z: &[bool]) -> Vec<f64> {
    let mut y: Vec<f64> = (0..g.n())
        .map(|i| m.alpha[i] + if z[i] { m.beta[i] } else { 0.0 })
        .collect();
    for e in g.edges() {
        if z[e.neighbor] {
            y[e.unit] += m.gamma * e.weight;
        }
    }
    y
}

/// Smallest and largest achievable outcome over all units.
pub fn outcome_range(g: &InterferenceGraph, m: &OutcomeModel) -> (f64, f64) {
    let n = g.n();
    let mut lo: Vec<f64> = (0..n).map(|i| m.alpha[i] + m.beta[i].min(0.0)).collect();
    let mut hi: Vec<f64> = (0..n).map(|i| m.alpha[i] + m.beta[i].max(0.0)).collect();
    for e in g.edges() {
        let s = m.gamma * e.weight;
        lo[e.unit] += s.min(0.0);
        hi[e.unit] += s.max(0.0);
    }
    (
        lo.into_iter().fold(f64::INFINITY, f64::min),
        hi.into_iter().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// `(eta, delta)` from first principles.
pub fn eta_delta(g: &InterferenceGraph, clusters: &[Vec<usize>]) -> (f64, f64) {
    let n = g.n() as f64;
    let m = clusters.len();
    let label = labels(g.n(), clusters);
    let mut d = vec![vec![0.0; m]; m];
    for e in g.edges() {
        d[label[e.unit]][label[e.neighbor]] += e.weight;
    }
    let mut delta = 0.0;
    for k in 0..m {
        for l in 0..m {
            if k != l {
                delta += d[k][l] * d[l][k];
            }
        }
    }
    let eta = clusters.iter().map(|c| (c.len() * c.len()) as f64).sum::<f64>();
    (eta / (n * n), delta / (n * n))
}

/// Every outcome of the design with its probability: each cluster takes the
/// cluster arm (one coin) or the unit arm (one coin per unit) with
/// probability 1/2 each, or always the cluster arm when `cluster_only`.
pub fn design_law(clusters: &[Vec<usize>], n: usize, p: f64, cluster_only: bool) -> Vec<(f64, Vec<bool>, Vec<bool>)> {
    let mut law = vec![(1.0, vec![false; n], vec![false; n])];
    let arm = if cluster_only { 1.0 } else { 0.5 };
    for c in clusters {
        let mut next = Vec::new();
        for (pr, w, z) in &law {
            for treat in [false, true] {
                let (mut w2, mut z2) = (w.clone(), z.clone());
                for &i in c {
                    w2[i] = true;
                    z2[i] = treat;
                }
                next.push((pr * arm * if treat { p } else { 1.0 - p }, w2, z2));
            }
            if cluster_only {
                continue;
            }
            for bits in 0u32..1 << c.len() {
                let (w2, mut z2) = (w.clone(), z.clone());
                let mut q = pr * arm;
                for (b, &i) in c.iter().enumerate() {
                    z2[i] = bits >> b & 1 == 1;
                    q *= if z2[i] { p } else { 1.0 - p };
                }
                next.push((q, w2, z2));
            }
        }
        law = next;
    }
    law
}

fn ht(z: bool, p: f64) -> f64 {
    if z {
        1.0 / p
    } else {
        -1.0 / (1.0 - p)
    }
}

/// `rho tau_c - (rho - 1) tau_b`.
pub fn mixed_tau(y: &[f64], w: &[bool], z: &[bool], p: f64, rho: f64) -> f64 {
    let n = y.len() as f64;
    let (mut c, mut b) = (0.0, 0.0);
    for i in 0..y.len() {
        let t = ht(z[i], p) * y[i];
        if w[i] {
            c += t;
        } else {
            b += t;
        }
    }
    rho * 2.0 * c / n - (rho - 1.0) * 2.0 * b / n
}

pub fn ht_tau(y: &[f64], z: &[bool], p: f64) -> f64 {
    y.iter().zip(z).map(|(y, &z)| ht(z, p) * y).sum::<f64>() / y.len() as f64
}

/// Exact mean and variance of an estimator under the enumerated law.
pub fn exact_moments(law: &[(f64, Vec<bool>, Vec<bool>)], estimate: impl Fn(&[bool], &[bool]) -> f64) -> (f64, f64) {
    let values: Vec<(f64, f64)> = law.iter().map(|(pr, w, z)| (*pr, estimate(w, z))).collect();
    let mean: f64 = values.iter().map(|(pr, v)| pr * v).sum();
    let var: f64 = values.iter().map(|(pr, v)| pr * (v - mean).powi(2)).sum();
    (mean, var)
}
