//! Linear exposure outcome model
//! `Y_i(z) = alpha_i + z_i beta_i + gamma * sum_{j in N_i} v_ij z_j`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeModel {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

impl OutcomeModel {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::LengthMismatch {
                what: "beta",
                expected: alpha.len(),
                actual: beta.len(),
            });
        }
        if !gamma.is_finite() || alpha.iter().chain(&beta).any(|x| !x.is_finite()) {
            return Err(Error::invalid("outcome model parameters must be finite"));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn check_matches(&self, graph: &InterferenceGraph) -> Result<()> {
        if self.n() != graph.n() {
            return Err(Error::LengthMismatch {
                what: "outcome model",
                expected: graph.n(),
                actual: self.n(),
            });
        }
        Ok(())
    }

    pub fn mean_beta(&self) -> f64 {
        self.beta.iter().sum::<f64>() / self.n() as f64
    }

    /// `beta_bar + (gamma / n) * sum_i sum_j v_ij`: the all-treated versus
    /// all-control mean outcome gap.
    pub fn true_ate(&self, graph: &InterferenceGraph) -> f64 {
        self.mean_beta() + self.gamma * graph.total_weight() / self.n() as f64
    }

    /// Outcome of unit `i` under `z`.
    pub fn outcome(&self, graph: &InterferenceGraph, z: &[bool], i: usize) -> f64 {
        let spill: f64 = graph
            .neighbors(i)
            .iter()
            .filter(|e| z[e.neighbor])
            .map(|e| e.weight)
            .sum();
        self.alpha[i] + if z[i] { self.beta[i] } else { 0.0 } + self.gamma * spill
    }

    /// Tight range of `Y_i(z)` over all `z`: the own-treatment and each
    /// neighbor term can be switched independently, so each contributes its
    /// own minimum (resp. maximum).
    pub fn outcome_range(&self, graph: &InterferenceGraph, i: usize) -> (f64, f64) {
        let mut lo = self.alpha[i] + self.beta[i].min(0.0);
        let mut hi = self.alpha[i] + self.beta[i].max(0.0);
        for e in graph.neighbors(i) {
            let term = self.gamma * e.weight;
            lo += term.min(0.0);
            hi += term.max(0.0);
        }
        (lo, hi)
    }
}

/// `Y_i(z)` for every unit.
pub fn evaluate_outcomes(graph: &InterferenceGraph, model: &OutcomeModel, z: &[bool]) -> Result<Vec<f64>> {
    model.check_matches(graph)?;
    if z.len() != graph.n() {
        return Err(Error::LengthMismatch {
            what: "treatment vector",
            expected: graph.n(),
            actual: z.len(),
        });
    }
    Ok((0..graph.n()).map(|i| model.outcome(graph, z, i)).collect())
}

/// Tight achievable bounds `(Y_L, Y_M)` on every unit's outcome.
pub fn outcome_bounds(graph: &InterferenceGraph, model: &OutcomeModel) -> Result<(f64, f64)> {
    model.check_matches(graph)?;
    Ok((0..graph.n())
        .map(|i| model.outcome_range(graph, i))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        }))
}

/// How the spillover scale is set for a generated model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRule {
    /// `(gamma / n) * sum v = 0.5`, so that the true ATE is exactly 1.
    #[default]
    UnitAte,
    /// `gamma = 0.5 / sum v`.
    Literal,
}

/// Draws `alpha_i, beta_i ~ U(-1, 1)` and recenters them to means 5 and 0.5.
pub fn generate_outcome_model(graph: &InterferenceGraph, seed: u64, gamma_rule: GammaRule) -> Result<OutcomeModel> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::invalid("outcome model needs at least one unit"));
    }
    let total = graph.total_weight();
    if total == 0.0 {
        return Err(Error::invalid("total interference weight is zero; gamma is undefined"));
    }
    let mut rng = stream_rng(seed, 0, Stream::Model);
    let raw_alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let raw_beta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let recenter = |raw: Vec<f64>, target: f64| {
        let mean = raw.iter().sum::<f64>() / n as f64;
        raw.into_iter().map(|x| x + target - mean).collect::<Vec<_>>()
    };
    let gamma = match gamma_rule {
        GammaRule::UnitAte => 0.5 * n as f64 / total,
        GammaRule::Literal => 0.5 / total,
    };
    OutcomeModel::new(recenter(raw_alpha, 5.0), recenter(raw_beta, 0.5), gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rgg, RggParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_units() -> (InterferenceGraph, OutcomeModel) {
        let g = InterferenceGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let m = OutcomeModel::new(vec![2.0, 2.0], vec![1.0, 1.0], 0.5).unwrap();
        (g, m)
    }

    #[test]
    fn evaluate_examples() {
        let (g, m) = two_units();
        assert_eq!(evaluate_outcomes(&g, &m, &[true, true]).unwrap()[0], 3.5);
        assert_eq!(evaluate_outcomes(&g, &m, &[true, false]).unwrap()[0], 3.0);
        assert_eq!(evaluate_outcomes(&g, &m, &[false, true]).unwrap()[0], 2.5);
        assert!(evaluate_outcomes(&g, &m, &[true]).is_err());
    }

    #[test]
    fn range_example() {
        let g = InterferenceGraph::new(3, [(0, 1, -0.5), (0, 2, 0.5)]).unwrap();
        let m = OutcomeModel::new(vec![2.0; 3], vec![-1.0; 3], 1.0).unwrap();
        assert_eq!(m.outcome_range(&g, 0), (0.5, 2.5));
    }

    #[test]
    fn no_effects_bounds_are_alpha_range() {
        let g = InterferenceGraph::new(3, [(0, 1, 0.5), (2, 1, 0.5)]).unwrap();
        let m = OutcomeModel::new(vec![1.0, 4.0, -2.0], vec![0.0; 3], 0.0).unwrap();
        assert_eq!(outcome_bounds(&g, &m).unwrap(), (-2.0, 4.0));
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (InterferenceGraph, OutcomeModel) {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random_bool(0.4) {
                    edges.push((i, j, rng.random_range(-0.5..0.5)));
                }
            }
        }
        let g = InterferenceGraph::new(n, edges).unwrap();
        let m = OutcomeModel::new(
            (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            rng.random_range(-3.0..3.0),
        )
        .unwrap();
        (g, m)
    }

    fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    #[test]
    fn outcomes_match_naive_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(1..=50);
            let (g, m) = random_instance(&mut rng, n);
            let z: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let got = evaluate_outcomes(&g, &m, &z).unwrap();
            for i in 0..n {
                let mut y = m.alpha[i] + if z[i] { m.beta[i] } else { 0.0 };
                let mut spill = 0.0;
                for j in 0..n {
                    if let Some(v) = g.weight(i, j) {
                        spill += v * if z[j] { 1.0 } else { 0.0 };
                    }
                }
                y += m.gamma * spill;
                assert!((got[i] - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn bounds_equal_exhaustive_extremes_and_are_attained() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..40 {
            let n = if trial < 20 { 5 } else { rng.random_range(1..=12) };
            let (g, m) = random_instance(&mut rng, n);
            let (lo, hi) = outcome_bounds(&g, &m).unwrap();
            let mut seen_lo = f64::INFINITY;
            let mut seen_hi = f64::NEG_INFINITY;
            for z in all_assignments(n) {
                for y in evaluate_outcomes(&g, &m, &z).unwrap() {
                    seen_lo = seen_lo.min(y);
                    seen_hi = seen_hi.max(y);
                }
            }
            assert!((lo - seen_lo).abs() < 1e-12, "lo {lo} vs {seen_lo}");
            assert!((hi - seen_hi).abs() < 1e-12, "hi {hi} vs {seen_hi}");
        }
    }

    #[test]
    fn generated_model_is_recentered() {
        for seed in 0..5 {
            let g = generate_rgg(&RggParams::new(500, 4.0, 1), seed).unwrap();
            let m = generate_outcome_model(&g, seed, GammaRule::UnitAte).unwrap();
            let mean_alpha = m.alpha.iter().sum::<f64>() / 500.0;
            assert!((mean_alpha - 5.0).abs() < 1e-12);
            assert!((m.mean_beta() - 0.5).abs() < 1e-12);
            assert!((m.true_ate(&g) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_gamma_rule() {
        let g = generate_rgg(&RggParams::new(200, 4.0, 0), 1).unwrap();
        let m = generate_outcome_model(&g, 1, GammaRule::Literal).unwrap();
        assert!((m.gamma * g.total_weight() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_total_weight_is_rejected() {
        let g = InterferenceGraph::new(2, [(0, 1, 0.5), (1, 0, -0.5)]).unwrap();
        assert!(generate_outcome_model(&g, 0, GammaRule::UnitAte).is_err());
    }
}
