//! Closed-form variance bounds for the cluster-based and mixed designs, and
//! the surrogate objective minimized by greedy clustering.

use serde::{Deserialize, Serialize};

use crate::clustering::{Clustering, MergeState, PartitionStats};
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub eta: f64,
    pub delta: f64,
    pub rho: f64,
    /// Constant multiplying `rho^2 / (n p (1 - p))`.
    pub remainder_coefficient: f64,
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "treatment probability must lie in (0, 1), got {p}"
        )))
    }
}

pub(crate) fn check_outcome_range(y_l: f64, y_m: f64) -> Result<()> {
    if y_l > 0.0 && y_l <= y_m && y_m.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "outcome bounds need 0 < Y_L <= Y_M, got ({y_l}, {y_m})"
        )))
    }
}

fn check_gamma_sq(gamma_sq: f64) -> Result<()> {
    if gamma_sq >= 0.0 && gamma_sq.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "gamma^2 must be finite and non-negative, got {gamma_sq}"
        )))
    }
}

/// Coefficient of `rho^2 eta` in the mixed-design upper bound.
pub fn mixed_upper_coefficient(p: f64, y_l: f64, y_m: f64) -> f64 {
    (2.0 / (p * (1.0 - p)) + 1.0) * y_m * y_m - y_m * y_l - y_l * y_l
}

/// Coefficient of `rho^2 eta` in the mixed-design lower bound.
pub fn mixed_lower_coefficient(p: f64, y_l: f64, y_m: f64) -> f64 {
    2.0 / (p * (1.0 - p)) * y_l * y_l - 2.0 * y_m * y_m + y_m * y_l
}

/// Bounds on the variance of the cluster-based HT estimator.
pub fn bound_cluster_based(stats: &PartitionStats, p: f64, y_l: f64, y_m: f64, gamma_sq: f64) -> Result<BoundReport> {
    check_probability(p)?;
    check_outcome_range(y_l, y_m)?;
    check_gamma_sq(gamma_sq)?;
    let q = p * (1.0 - p);
    let spill = gamma_sq * stats.delta;
    Ok(BoundReport {
        lower: (y_l * y_l / q - y_m * y_m / 2.0) * stats.eta + spill,
        upper: ((1.0 / q + 2.0) * y_m * y_m - y_m * y_l) * stats.eta + spill,
        eta: stats.eta,
        delta: stats.delta,
        rho: stats.rho,
        remainder_coefficient: 0.0,
    })
}

/// Computable part of the bounds on the variance of the mixed estimator.
pub fn bound_mixed(
    stats: &PartitionStats,
    p: f64,
    y_l: f64,
    y_m: f64,
    gamma_sq: f64,
    remainder_coefficient: f64,
    n: usize,
) -> Result<BoundReport> {
    check_probability(p)?;
    check_outcome_range(y_l, y_m)?;
    check_gamma_sq(gamma_sq)?;
    if !stats.rho.is_finite() {
        return Err(Error::UndefinedRho);
    }
    if n == 0 || !remainder_coefficient.is_finite() {
        return Err(Error::invalid(
            "bound_mixed needs n >= 1 and a finite remainder coefficient",
        ));
    }
    let rho_sq = stats.rho * stats.rho;
    let shared = gamma_sq * rho_sq * stats.delta + remainder_coefficient * rho_sq / (n as f64 * p * (1.0 - p));
    Ok(BoundReport {
        lower: mixed_lower_coefficient(p, y_l, y_m) * rho_sq * stats.eta + shared,
        upper: mixed_upper_coefficient(p, y_l, y_m) * rho_sq * stats.eta + shared,
        eta: stats.eta,
        delta: stats.delta,
        rho: stats.rho,
        remainder_coefficient,
    })
}

/// The surrogate upper bound with `gamma^2` replaced by `((Y_M - Y_L) / a)^2`,
/// where `a` is the largest per-unit sum of positive weights. Infinite when
/// `rho` is undefined.
pub fn surrogate_a(stats: &PartitionStats, p: f64, y_l: f64, y_m: f64, a: f64) -> Result<f64> {
    check_probability(p)?;
    check_outcome_range(y_l, y_m)?;
    if !(a > 0.0) {
        return Err(Error::invalid("surrogate needs a > 0"));
    }
    if stats.rho.is_nan() {
        return Ok(f64::INFINITY);
    }
    let rho_sq = stats.rho * stats.rho;
    let gamma_sq = ((y_m - y_l) / a).powi(2);
    Ok(mixed_upper_coefficient(p, y_l, y_m) * rho_sq * stats.eta + gamma_sq * rho_sq * stats.delta.abs())
}

/// Change in the surrogate when clusters `k` and `l` are merged, evaluated
/// from the cross-weights of the two clusters alone.
pub fn merge_delta(
    graph: &InterferenceGraph,
    clustering: &Clustering,
    k: usize,
    l: usize,
    p: f64,
    y_l: f64,
    y_m: f64,
) -> Result<f64> {
    check_probability(p)?;
    check_outcome_range(y_l, y_m)?;
    if k == l || k >= clustering.len() || l >= clustering.len() {
        return Err(Error::invalid(format!(
            "merge needs two distinct cluster indices below {}, got ({k}, {l})",
            clustering.len()
        )));
    }
    let a = graph.max_positive_row_sum();
    if !(a > 0.0) {
        return Err(Error::invalid("surrogate needs a > 0"));
    }
    let state = MergeState::new(
        graph,
        clustering,
        mixed_upper_coefficient(p, y_l, y_m),
        ((y_m - y_l) / a).powi(2),
    )?;
    Ok(state.delta_a(state.local(k, l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stats(eta: f64, delta: f64, rho: f64) -> PartitionStats {
        PartitionStats {
            n: 10,
            eta,
            delta,
            rho,
            within_weight: 1.0,
            total_weight: rho,
            max_cluster_size: 1,
        }
    }

    #[test]
    fn cluster_based_example() {
        let b = bound_cluster_based(&stats(0.36, 0.0, 1.0), 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!((b.lower - 1.26).abs() < 1e-12);
        assert!((b.upper - 1.8).abs() < 1e-12);
        let with = bound_cluster_based(&stats(0.36, 0.7, 1.0), 0.5, 1.0, 2.0, 0.0).unwrap();
        let without = bound_cluster_based(&stats(0.36, 0.0, 1.0), 0.5, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(with.lower, without.lower);
        assert_eq!(with.upper, without.upper);
    }

    #[test]
    fn mixed_example() {
        let b = bound_mixed(&stats(1.0, 0.0, 1.0), 0.5, 1.0, 2.0, 1.0, 0.0, 10).unwrap();
        assert_eq!(b.upper, 33.0);
        let s = stats(0.2, 0.3, 1.5);
        let a = bound_mixed(&s, 0.5, 1.0, 2.0, 0.0, 0.0, 10).unwrap();
        let b = bound_mixed(&s.with_rho(1.5), 0.5, 1.0, 2.0, 0.0, 0.0, 10).unwrap();
        assert_eq!(a, b);
        assert!(bound_mixed(&stats(1.0, 0.0, f64::NAN), 0.5, 1.0, 2.0, 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn invalid_inputs() {
        let s = stats(0.5, 0.0, 1.0);
        assert!(bound_cluster_based(&s, 0.0, 1.0, 2.0, 1.0).is_err());
        assert!(bound_cluster_based(&s, 0.5, 2.0, 1.0, 1.0).is_err());
        assert!(bound_cluster_based(&s, 0.5, 0.0, 1.0, 1.0).is_err());
        assert!(bound_mixed(&s, 0.5, 1.0, 2.0, -1.0, 0.0, 10).is_err());
        assert!(surrogate_a(&s, 0.5, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn lower_never_exceeds_upper() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let yl = rng.random_range(0.01..5.0);
            let ym = yl + rng.random_range(0.0..5.0);
            let p = rng.random_range(0.01..0.99);
            let s = stats(
                rng.random_range(0.01..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.5..4.0),
            );
            let g2 = rng.random_range(0.0..3.0);
            let c = bound_cluster_based(&s, p, yl, ym, g2).unwrap();
            assert!(c.lower <= c.upper);
            let m = bound_mixed(&s, p, yl, ym, g2, 0.7, 50).unwrap();
            assert!(m.lower <= m.upper + 1e-9 * m.upper.abs());
        }
    }

    #[test]
    fn surrogate_matches_bound_terms() {
        let s = stats(0.4, 0.05, 1.3);
        let equal = surrogate_a(&s, 0.5, 2.0, 2.0, 1.0).unwrap();
        assert!((equal - mixed_upper_coefficient(0.5, 2.0, 2.0) * 1.69 * 0.4).abs() < 1e-12);
        let a = surrogate_a(&s, 0.5, 1.0, 3.0, 1.0).unwrap();
        let upper = bound_mixed(&s, 0.5, 1.0, 3.0, 4.0, 0.0, 10).unwrap().upper;
        assert!((a - upper).abs() < 1e-12);
    }

    #[test]
    fn surrogate_dominates_true_gamma() {
        use crate::outcome::{outcome_bounds, OutcomeModel};
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        while checked < 50 {
            let n = rng.random_range(3..12);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random_bool(0.4) {
                        edges.push((i, j, rng.random_range(-0.2..0.4)));
                    }
                }
            }
            let g = InterferenceGraph::new(n, edges).unwrap().rescaled_rows();
            let a = g.max_positive_row_sum();
            let model = OutcomeModel::new(
                (0..n).map(|_| rng.random_range(4.0..6.0)).collect(),
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
                rng.random_range(-2.0..2.0),
            )
            .unwrap();
            let (yl, ym) = outcome_bounds(&g, &model).unwrap();
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n / 2 + 1)).collect();
            let s = PartitionStats::compute(&g, &Clustering::from_labels(&labels).unwrap()).unwrap();
            if a == 0.0 || !s.rho.is_finite() || yl <= 0.0 {
                continue;
            }
            let sur = surrogate_a(&s, 0.5, yl, ym, a).unwrap();
            let mut truth = bound_mixed(&s, 0.5, yl, ym, model.gamma * model.gamma, 0.0, n)
                .unwrap()
                .upper;
            // The surrogate uses |delta|.
            truth += model.gamma * model.gamma * s.rho * s.rho * (s.delta.abs() - s.delta);
            assert!(sur >= truth - 1e-9 * truth.abs(), "{sur} < {truth}");
            checked += 1;
        }
    }

    #[test]
    fn merge_delta_signs() {
        let g = InterferenceGraph::empty(3);
        let c = Clustering::singletons(3);
        assert!(merge_delta(&g, &c, 0, 1, 0.5, 1.0, 2.0).is_err());

        let g = InterferenceGraph::new(3, [(0, 1, 0.4), (1, 0, 0.4)]).unwrap();
        let c = Clustering::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert!(merge_delta(&g, &c, 0, 1, 0.5, 1.0, 2.0).unwrap() > 0.0);
        assert!(merge_delta(&g, &c, 0, 0, 0.5, 1.0, 2.0).is_err());
        assert!(merge_delta(&g, &c, 0, 5, 0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn strong_cross_pair_merge_reduces_surrogate() {
        // Two weak within-pair links and strong mutual cross links.
        let g = InterferenceGraph::new(
            4,
            [
                (0, 1, 0.05),
                (1, 0, 0.05),
                (2, 3, 0.05),
                (3, 2, 0.05),
                (0, 2, 0.9),
                (2, 0, 0.9),
                (1, 3, 0.9),
                (3, 1, 0.9),
            ],
        )
        .unwrap();
        let c = Clustering::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let (p, yl, ym) = (0.5, 0.1, 10.0);
        let d = merge_delta(&g, &c, 0, 1, p, yl, ym).unwrap();
        let a = g.max_positive_row_sum();
        let before = surrogate_a(&PartitionStats::compute(&g, &c).unwrap(), p, yl, ym, a).unwrap();
        let after = surrogate_a(
            &PartitionStats::compute(&g, &Clustering::whole(4)).unwrap(),
            p,
            yl,
            ym,
            a,
        )
        .unwrap();
        assert!(d < 0.0);
        assert!((d - (after - before)).abs() < 1e-9 * before);
    }

    #[test]
    fn shifting_alpha_moves_bounds_only() {
        use crate::outcome::{outcome_bounds, OutcomeModel};
        let g = InterferenceGraph::new(4, [(0, 1, 0.3), (1, 2, 0.5), (3, 0, -0.2)]).unwrap();
        let c = Clustering::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let m1 = OutcomeModel::new(vec![3.0, 4.0, 5.0, 4.5], vec![0.5; 4], 1.0).unwrap();
        let mut m2 = m1.clone();
        m2.alpha.iter_mut().for_each(|a| *a += 2.0);
        let (l1, h1) = outcome_bounds(&g, &m1).unwrap();
        let (l2, h2) = outcome_bounds(&g, &m2).unwrap();
        assert!((l2 - l1 - 2.0).abs() < 1e-12 && (h2 - h1 - 2.0).abs() < 1e-12);
        let s = PartitionStats::compute(&g, &c).unwrap();
        let b1 = bound_cluster_based(&s, 0.5, l1, h1, 1.0).unwrap();
        let b2 = bound_cluster_based(&s, 0.5, l2, h2, 1.0).unwrap();
        assert_eq!((b1.eta, b1.delta, b1.rho), (b2.eta, b2.delta, b2.rho));
        assert_ne!(b1.upper, b2.upper);
    }
}
