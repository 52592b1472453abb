//! Horvitz-Thompson style estimators of the average treatment effect.
//!
//! Estimators see only realized outcomes; the model that generated them is
//! used by the exact-law helpers at the bottom, which serve as oracles.

use serde::Serialize;

use crate::bounds::check_probability;
use crate::clustering::{Clustering, PartitionStats};
use crate::design::Assignment;
use crate::error::{Error, Result};
use crate::graph::InterferenceGraph;
use crate::outcome::{evaluate_outcomes, OutcomeModel};

/// `z/p - (1 - z)/(1 - p)`.
pub fn ht_weight(z: bool, p: f64) -> f64 {
    if z {
        1.0 / p
    } else {
        -1.0 / (1.0 - p)
    }
}

fn check_lengths(outcomes: &[f64], assignment: &Assignment) -> Result<()> {
    if outcomes.len() != assignment.n() {
        return Err(Error::LengthMismatch {
            what: "outcomes versus assignment",
            expected: assignment.n(),
            actual: outcomes.len(),
        });
    }
    if outcomes.is_empty() {
        return Err(Error::invalid("no units to estimate from"));
    }
    Ok(())
}

/// `(1/n) sum_i t_i Y_i`.
pub fn ht_cluster_based(outcomes: &[f64], assignment: &Assignment) -> Result<f64> {
    check_probability(assignment.p)?;
    check_lengths(outcomes, assignment)?;
    let sum: f64 = outcomes
        .iter()
        .zip(&assignment.z)
        .map(|(y, &z)| ht_weight(z, assignment.p) * y)
        .sum();
    Ok(sum / outcomes.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateBreakdown {
    pub tau: f64,
    pub tau_c: f64,
    pub tau_b: f64,
    pub rho: f64,
    /// Per-unit contributions; their mean is `tau`.
    #[serde(rename = "L")]
    pub contributions: Vec<f64>,
}

/// Combined mixed-design estimate `rho tau_c - (rho - 1) tau_b`.
pub fn mixed_estimate(outcomes: &[f64], assignment: &Assignment, rho: f64) -> Result<EstimateBreakdown> {
    check_probability(assignment.p)?;
    check_lengths(outcomes, assignment)?;
    if !rho.is_finite() {
        return Err(Error::UndefinedRho);
    }
    let n = outcomes.len() as f64;
    let p = assignment.p;
    let (mut sum_c, mut sum_b) = (0.0, 0.0);
    let mut contributions = Vec::with_capacity(outcomes.len());
    for ((&y, &z), &w) in outcomes.iter().zip(&assignment.z).zip(&assignment.w_tilde) {
        let ty = ht_weight(z, p) * y;
        let wf = if w { 1.0 } else { 0.0 };
        if w {
            sum_c += ty;
        } else {
            sum_b += ty;
        }
        contributions.push(2.0 * (2.0 * rho * wf - rho - wf + 1.0) * ty);
    }
    let tau_c = 2.0 * sum_c / n;
    let tau_b = 2.0 * sum_b / n;
    Ok(EstimateBreakdown {
        tau: rho * tau_c - (rho - 1.0) * tau_b,
        tau_c,
        tau_b,
        rho,
        contributions,
    })
}

/// Total weight over within-cluster weight.
pub fn rho_fixed(graph: &InterferenceGraph, clustering: &Clustering) -> Result<f64> {
    let stats = PartitionStats::compute(graph, clustering)?;
    if stats.rho.is_finite() {
        Ok(stats.rho)
    } else {
        Err(Error::UndefinedRho)
    }
}

/// Mean and variance of an estimator under an exactly enumerated law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

const MAX_EXHAUSTIVE_UNITS: usize = 16;
const MAX_EXHAUSTIVE_OUTCOMES: f64 = (1u64 << 26) as f64;

/// Calls `visit(probability, w_tilde, z)` for every outcome of the mixed
/// design (or of the cluster-based design when `cluster_only`).
fn enumerate_law(
    clustering: &Clustering,
    p: f64,
    cluster_only: bool,
    visit: &mut dyn FnMut(f64, &[bool], &[bool]),
) -> Result<()> {
    let n = clustering.n();
    let count: f64 = clustering
        .clusters()
        .iter()
        .map(|c| {
            if cluster_only {
                2.0
            } else {
                2.0 + 2f64.powi(c.len() as i32)
            }
        })
        .product();
    if n > MAX_EXHAUSTIVE_UNITS || count > MAX_EXHAUSTIVE_OUTCOMES {
        return Err(Error::TooLarge(format!("{n} units, {count} outcomes")));
    }
    let mut w_tilde = vec![cluster_only; n];
    let mut z = vec![false; n];
    let arm_prob = if cluster_only { 1.0 } else { 0.5 };

    fn walk(
        k: usize,
        prob: f64,
        state: (&mut Vec<bool>, &mut Vec<bool>),
        ctx: (&Clustering, f64, bool, f64),
        visit: &mut dyn FnMut(f64, &[bool], &[bool]),
    ) {
        let (w_tilde, z) = state;
        let (clustering, p, cluster_only, arm_prob) = ctx;
        if k == clustering.len() {
            visit(prob, w_tilde, z);
            return;
        }
        let members = clustering.cluster(k);
        for treat in [false, true] {
            for &i in members {
                w_tilde[i] = true;
                z[i] = treat;
            }
            let pr = prob * arm_prob * if treat { p } else { 1.0 - p };
            walk(k + 1, pr, (&mut *w_tilde, &mut *z), ctx, visit);
        }
        if cluster_only {
            return;
        }
        for bits in 0u64..1 << members.len() {
            let mut pr = prob * arm_prob;
            for (b, &i) in members.iter().enumerate() {
                w_tilde[i] = false;
                z[i] = bits >> b & 1 == 1;
                pr *= if z[i] { p } else { 1.0 - p };
            }
            walk(k + 1, pr, (&mut *w_tilde, &mut *z), ctx, visit);
        }
    }

    walk(
        0,
        1.0,
        (&mut w_tilde, &mut z),
        (clustering, p, cluster_only, arm_prob),
        visit,
    );
    Ok(())
}

fn exhaustive_moments(
    graph: &InterferenceGraph,
    model: &OutcomeModel,
    clustering: &Clustering,
    p: f64,
    cluster_only: bool,
    estimate: &dyn Fn(&[f64], &Assignment) -> Result<f64>,
) -> Result<Moments> {
    check_probability(p)?;
    clustering.check_matches(graph)?;
    model.check_matches(graph)?;
    let mut error = None;
    let mut eval = |w_tilde: &[bool], z: &[bool]| -> f64 {
        let a = Assignment {
            w: Vec::new(),
            w_tilde: w_tilde.to_vec(),
            z: z.to_vec(),
            p,
            seed: 0,
        };
        let y = evaluate_outcomes(graph, model, z).expect("lengths checked");
        match estimate(&y, &a) {
            Ok(t) => t,
            Err(e) => {
                error.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut mean = 0.0;
    enumerate_law(clustering, p, cluster_only, &mut |pr, w, z| mean += pr * eval(w, z))?;
    let mut variance = 0.0;
    enumerate_law(clustering, p, cluster_only, &mut |pr, w, z| {
        let d = eval(w, z) - mean;
        variance += pr * d * d;
    })?;
    match error {
        Some(e) => Err(e),
        None => Ok(Moments { mean, variance }),
    }
}

/// Exact moments of the mixed estimator with multiplier `rho`.
pub fn exhaustive_moments_mixed(
    graph: &InterferenceGraph,
    model: &OutcomeModel,
    clustering: &Clustering,
    rho: f64,
    p: f64,
) -> Result<Moments> {
    exhaustive_moments(graph, model, clustering, p, false, &|y, a| {
        mixed_estimate(y, a, rho).map(|b| b.tau)
    })
}

/// Exact moments of the cluster-based HT estimator.
pub fn exhaustive_moments_cluster_based(
    graph: &InterferenceGraph,
    model: &OutcomeModel,
    clustering: &Clustering,
    p: f64,
) -> Result<Moments> {
    exhaustive_moments(graph, model, clustering, p, true, &ht_cluster_based)
}

/// Exact expectation of the mixed estimator.
pub fn exhaustive_expectation(
    graph: &InterferenceGraph,
    model: &OutcomeModel,
    clustering: &Clustering,
    rho: f64,
    p: f64,
) -> Result<f64> {
    exhaustive_moments_mixed(graph, model, clustering, rho, p).map(|m| m.mean)
}
