use rand::Rng;

use super::Clustering;
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;
use crate::rng::{stream_rng, Stream};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

/// Randomized clustering into pairs and singletons whose co-cluster
/// probability is the same for every edge.
///
/// Each undirected edge `e` draws `X_e ~ Beta(omega_e, 1)` and becomes a
/// cluster when it beats every edge sharing a vertex with it. With `omega`
/// the Perron vector of `M = I + A(line graph)`, an edge wins with
/// probability `omega_e / (M omega)_e = 1 / lambda*`.
///
/// When the edge set splits into components with different spectral radii,
/// each edge also faces a phantom competitor of parameter
/// `lambda* omega_e - (M omega)_e`, which lifts every component to the
/// common winning probability `1 / lambda*`. The phantom also absorbs the
/// residual of the power iteration, taking `lambda*` as the largest ratio
/// `(M omega)_e / omega_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomClusteringLaw {
    n: usize,
    edges: Vec<(usize, usize)>,
    edge_scores: Vec<f64>,
    phantom: Vec<f64>,
    lambda_star: f64,
    incident: Vec<Vec<usize>>,
    iterations: usize,
}

impl RandomClusteringLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Undirected edges `(i, j)`, `i < j`, in the order of `edge_scores`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_scores(&self) -> &[f64] {
        &self.edge_scores
    }

    pub fn lambda_star(&self) -> f64 {
        self.lambda_star
    }

    /// The estimator multiplier for this law.
    pub fn rho(&self) -> f64 {
        self.lambda_star
    }

    /// Probability that any given edge forms a cluster.
    pub fn coclustering_probability(&self) -> f64 {
        1.0 / self.lambda_star
    }

    pub fn phantom_scores(&self) -> &[f64] {
        &self.phantom
    }

    /// Total power-iteration steps over all components.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `(M omega)_e`.
    pub fn closed_sum(&self, e: usize) -> f64 {
        let (i, j) = self.edges[e];
        self.incident[i]
            .iter()
            .chain(&self.incident[j])
            .map(|&f| self.edge_scores[f])
            .sum::<f64>()
            - self.edge_scores[e]
    }
}

pub fn weight_invariant_law_default(graph: &InterferenceGraph) -> Result<RandomClusteringLaw> {
    weight_invariant_law(graph, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
}

pub fn weight_invariant_law(
    graph: &InterferenceGraph,
    tolerance: f64,
    max_iterations: usize,
) -> Result<RandomClusteringLaw> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = graph.n();
    let edges: Vec<(usize, usize)> = graph.undirected_edges().into_iter().map(|(i, j, _)| (i, j)).collect();
    let mut incident = vec![Vec::new(); n];
    for (e, &(i, j)) in edges.iter().enumerate() {
        incident[i].push(e);
        incident[j].push(e);
    }
    if edges.is_empty() {
        return Ok(RandomClusteringLaw {
            n,
            edges,
            edge_scores: Vec::new(),
            phantom: Vec::new(),
            lambda_star: 1.0,
            incident,
            iterations: 0,
        });
    }

    let apply = |x: &[f64], e: usize| -> f64 {
        let (i, j) = edges[e];
        incident[i].iter().chain(&incident[j]).map(|&f| x[f]).sum::<f64>() - x[e]
    };

    let mut omega = vec![0.0; edges.len()];
    let mut iterations = 0;
    for component in edge_components(n, &edges, &incident) {
        let mut x = vec![0.0; edges.len()];
        for &e in &component {
            x[e] = 1.0;
        }
        let mut lambda = f64::NAN;
        let mut converged = false;
        for _ in 0..max_iterations {
            iterations += 1;
            let y: Vec<f64> = component.iter().map(|&e| apply(&x, e)).collect();
            // Upper Collatz-Wielandt value; it converges at the rate of the
            // vector itself, unlike a norm ratio.
            let next = component.iter().zip(&y).map(|(&e, v)| v / x[e]).fold(0.0, f64::max);
            let norm_y: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (&e, v) in component.iter().zip(&y) {
                x[e] = v / norm_y;
            }
            if (next - lambda).abs() < tolerance * next {
                converged = true;
                break;
            }
            lambda = next;
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations: max_iterations,
            });
        }
        let top = component.iter().map(|&e| x[e]).fold(0.0, f64::max);
        for &e in &component {
            omega[e] = x[e] / top;
        }
    }
    if omega.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Degenerate("edge score vector is not strictly positive".into()));
    }

    let closed: Vec<f64> = (0..edges.len()).map(|e| apply(&omega, e)).collect();
    let lambda_star = closed.iter().zip(&omega).map(|(c, w)| c / w).fold(0.0, f64::max);
    let phantom = closed
        .iter()
        .zip(&omega)
        .map(|(c, w)| (lambda_star * w - c).max(0.0))
        .collect();
    Ok(RandomClusteringLaw {
        n,
        edges,
        edge_scores: omega,
        phantom,
        lambda_star,
        incident,
        iterations,
    })
}

/// Edge ids grouped by connected component of the skeleton.
fn edge_components(n: usize, edges: &[(usize, usize)], incident: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || incident[start].is_empty() {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            for &e in &incident[v] {
                let (i, j) = edges[e];
                let w = if i == v { j } else { i };
                if i == v {
                    comp.push(e);
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// One draw from the law, reproducible from `seed`.
pub fn sample_clustering(law: &RandomClusteringLaw, seed: u64) -> Clustering {
    let mut rng = stream_rng(seed, 0, Stream::Clustering);
    // ln X_e for X_e = U^(1 / omega_e); 1 - U avoids ln 0.
    let keys: Vec<f64> = law
        .edge_scores
        .iter()
        .map(|&w| (1.0 - rng.random::<f64>()).ln() / w)
        .collect();
    let phantom_keys: Vec<f64> = law
        .phantom
        .iter()
        .map(|&phi| {
            let u = 1.0 - rng.random::<f64>();
            if phi > 0.0 {
                u.ln() / phi
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let beats = |e: usize, f: usize| keys[e] > keys[f] || (keys[e] == keys[f] && e < f);
    let mut labels: Vec<usize> = (0..law.n).collect();
    for (e, &(i, j)) in law.edges.iter().enumerate() {
        if keys[e] <= phantom_keys[e] {
            continue;
        }
        let wins = law.incident[i]
            .iter()
            .chain(&law.incident[j])
            .all(|&f| f == e || beats(e, f));
        if wins {
            labels[j] = i;
        }
    }
    Clustering::from_labels(&labels).expect("winning edges are vertex-disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn co_frequency(law: &RandomClusteringLaw, draws: u64) -> Vec<f64> {
        let mut hits = vec![0u64; law.edges.len()];
        for s in 0..draws {
            let c = sample_clustering(law, s);
            assert!(c.max_cluster_size() <= 2);
            for (e, &(i, j)) in law.edges.iter().enumerate() {
                if c.cluster_of(i) == c.cluster_of(j) {
                    hits[e] += 1;
                }
            }
        }
        hits.iter().map(|&h| h as f64 / draws as f64).collect()
    }

    fn assert_within_3se(freq: &[f64], prob: f64, draws: u64) {
        let se = (prob * (1.0 - prob) / draws as f64).sqrt();
        for f in freq {
            assert!((f - prob).abs() <= 3.0 * se, "frequency {f} vs {prob} (se {se})");
        }
    }

    #[test]
    fn single_edge_always_pairs() {
        let g = InterferenceGraph::new(2, [(0, 1, 0.3)]).unwrap();
        let law = weight_invariant_law_default(&g).unwrap();
        assert_eq!(law.lambda_star(), 1.0);
        for s in 0..50 {
            assert_eq!(sample_clustering(&law, s).clusters(), &[vec![0, 1]]);
        }
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let law = weight_invariant_law_default(&InterferenceGraph::empty(4)).unwrap();
        assert_eq!(sample_clustering(&law, 1), Clustering::singletons(4));
    }

    #[test]
    fn path_and_triangle_eigenvalues() {
        let path = InterferenceGraph::new(3, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let law = weight_invariant_law_default(&path).unwrap();
        assert_eq!(law.lambda_star(), 2.0);
        assert_within_3se(&co_frequency(&law, 20_000), 0.5, 20_000);

        let tri = InterferenceGraph::new(3, [(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5)]).unwrap();
        let law = weight_invariant_law_default(&tri).unwrap();
        assert_eq!(law.lambda_star(), 3.0);
        assert_within_3se(&co_frequency(&law, 20_000), 1.0 / 3.0, 20_000);
    }

    #[test]
    fn disconnected_components_share_the_probability() {
        // A triangle next to a lone edge.
        let g = InterferenceGraph::new(5, [(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.2), (3, 4, 0.9)]).unwrap();
        let law = weight_invariant_law_default(&g).unwrap();
        assert_eq!(law.lambda_star(), 3.0);
        assert_within_3se(&co_frequency(&law, 30_000), 1.0 / 3.0, 30_000);
    }

    #[test]
    fn eigenpair_and_weight_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        // A spanning path keeps the graph connected.
        let mut edges: Vec<(usize, usize, f64)> = (0..19).map(|i| (i, i + 1, 0.05)).collect();
        for i in 0..20 {
            for j in i + 2..20 {
                if rng.random_bool(0.2) {
                    edges.push((i, j, rng.random_range(0.0..0.2)));
                }
            }
        }
        let g = InterferenceGraph::new(20, edges).unwrap();
        let law = weight_invariant_law_default(&g).unwrap();
        let reweighted: Vec<f64> = g.edges().iter().map(|_| rng.random_range(-0.1..0.1)).collect();
        let law2 = weight_invariant_law_default(&g.with_weights(&reweighted).unwrap()).unwrap();
        assert_eq!(law.lambda_star(), law2.lambda_star());
        assert_eq!(law.edge_scores(), law2.edge_scores());
        for e in 0..law.edges().len() {
            let ratio = law.closed_sum(e) / law.edge_scores()[e];
            assert!((ratio - law.lambda_star()).abs() <= 1e-8 * law.lambda_star());
            assert!(law.edge_scores()[e] > 0.0);
            let lifted = (law.closed_sum(e) + law.phantom_scores()[e]) / law.edge_scores()[e];
            assert!((lifted - law.lambda_star()).abs() <= 1e-12 * law.lambda_star());
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = InterferenceGraph::new(4, [(0, 1, 0.1), (1, 2, 0.1), (2, 3, 0.1), (1, 3, 0.1)]).unwrap();
        assert!(matches!(
            weight_invariant_law(&g, 1e-15, 2),
            Err(Error::NonConvergence { iterations: 2 })
        ));
    }
}
