//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS or FAIL line; exits non-zero on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use netmix::bounds::bound_cluster_based;
use netmix::clustering::{
    greedy_clustering, sample_clustering, weight_invariant_law_default, Clustering, PartitionStats,
};
use netmix::estimation::{exhaustive_expectation, exhaustive_moments_cluster_based, rho_fixed};
use netmix::graph::InterferenceGraph;
use netmix::matching::{decompose_into_matchings, max_weight_matching};
use netmix::rng::derive_seed;
use netmix::simulation::{run_simulation, DesignSpec, GraphSpec, SimulationConfig, TABLE1_Y_M};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const EXACT_TOL: f64 = 1e-10;
const UNBIASED_BUDGET_S: f64 = 5.0;
const SANDWICH_BUDGET_S: f64 = 30.0;
const TABLE_BUDGET_S: f64 = 600.0;
const BINOMIAL_SES: f64 = 3.0;
const CO_CLUSTER_DRAWS: usize = 200_000;
const TABLE_N: usize = 1000;
const TABLE_REPS: usize = 2000;
const TABLE_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const MEAN_BAND: (f64, f64) = (0.9, 1.1);
const VAR_BAND: (f64, f64) = (0.6, 2.4);
const RATIO_BAND: (f64, f64) = (0.3, 0.8);
const NORMALITY_REPS: usize = 10_000;
const KS_MAX: f64 = 0.05;
const SKEW_MAX: f64 = 0.3;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Instances with `n <= 6` units and at most three clusters, spanning
/// negative and asymmetric weights, with non-zero within-cluster weight.
fn small_instances(seed: u64, count: usize) -> Vec<(InterferenceGraph, netmix::outcome::OutcomeModel, Clustering)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(2..=6);
        let g = random_graph(&mut rng, n, 0.6, -0.4, 0.8, false);
        let m_clusters = rng.random_range(1..=3);
        let c = random_clustering(&mut rng, n, m_clusters);
        if within_weight(&g, c.clusters()).abs() < 1e-3 {
            continue;
        }
        let m = random_model(&mut rng, n);
        out.push((g, m, c));
    }
    out
}

fn unbiasedness() -> Outcome {
    let start = Instant::now();
    let p = 0.5;
    let mut worst: f64 = 0.0;
    let mut rho_not_one = 0;
    for (k, (g, m, c)) in small_instances(11, 50).into_iter().enumerate() {
        let p = if k % 2 == 0 { p } else { 0.3 };
        let rho = total_weight(&g) / within_weight(&g, c.clusters());
        if (rho - 1.0).abs() > 1e-9 {
            rho_not_one += 1;
        }
        let ate = mean_beta(&m) + m.gamma / g.n() as f64 * total_weight(&g);
        let lib = exhaustive_expectation(&g, &m, &c, rho_fixed(&g, &c).unwrap(), p).unwrap();
        let law = design_law(c.clusters(), g.n(), p, false);
        let (oracle, _) = exact_moments(&law, |w, z| mixed_tau(&outcomes(&g, &m, z), w, z, p, rho));
        worst = worst.max((lib - ate).abs()).max((oracle - ate).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= EXACT_TOL && secs < UNBIASED_BUDGET_S && rho_not_one > 0,
        format!("50 instances ({rho_not_one} with rho != 1), max |E[tau] - ATE| = {worst:.2e} (tol {EXACT_TOL:.0e}), {secs:.2} s (budget {UNBIASED_BUDGET_S} s)"),
    )
}

fn cluster_based_bias() -> Outcome {
    let p = 0.5;
    let mut worst: f64 = 0.0;
    for (g, m, c) in small_instances(11, 50) {
        let target = mean_beta(&m) + m.gamma / g.n() as f64 * within_weight(&g, c.clusters());
        let lib = exhaustive_moments_cluster_based(&g, &m, &c, p).unwrap().mean;
        let law = design_law(c.clusters(), g.n(), p, true);
        let (oracle, _) = exact_moments(&law, |_, z| ht_tau(&outcomes(&g, &m, z), z, p));
        worst = worst.max((lib - target).abs()).max((oracle - target).abs());
    }
    ensure(
        worst <= EXACT_TOL,
        format!("50 instances, max |E[tau_cb] - target| = {worst:.2e} (tol {EXACT_TOL:.0e})"),
    )
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked = 0;
    let mut min_slack = f64::INFINITY;
    let mut failures = Vec::new();
    while checked < 20 {
        let n = rng.random_range(3..=8);
        let g = random_graph(&mut rng, n, 0.5, -0.5, 1.0, true);
        let m_clusters = rng.random_range(1..=n.min(4));
        let c = random_clustering(&mut rng, n, m_clusters);
        let m = random_model(&mut rng, n);
        let (y_l, y_m) = outcome_range(&g, &m);
        if y_l <= 0.0 {
            continue;
        }
        let p = [0.5, 0.3, 0.7][checked % 3];
        let q = p * (1.0 - p);
        let (eta, delta) = eta_delta(&g, c.clusters());
        let spill = m.gamma * m.gamma * delta;
        let lower = (y_l * y_l / q - y_m * y_m / 2.0) * eta + spill;
        let upper = ((1.0 / q + 2.0) * y_m * y_m - y_m * y_l) * eta + spill;
        let lib = bound_cluster_based(
            &PartitionStats::compute(&g, &c).unwrap(),
            p,
            y_l,
            y_m,
            m.gamma * m.gamma,
        )
        .unwrap();
        assert!((lib.lower - lower).abs() <= 1e-9 * lower.abs().max(1.0));
        assert!((lib.upper - upper).abs() <= 1e-9 * upper.abs().max(1.0));
        let law = design_law(c.clusters(), n, p, true);
        let (_, var) = exact_moments(&law, |_, z| ht_tau(&outcomes(&g, &m, z), z, p));
        let lib_var = exhaustive_moments_cluster_based(&g, &m, &c, p).unwrap().variance;
        assert!((lib_var - var).abs() <= 1e-9 * var.max(1.0));
        if !(lower <= var && var <= upper) {
            failures.push(format!("n={n} p={p}: {lower:.4} <= {var:.4} <= {upper:.4}"));
        }
        min_slack = min_slack.min((var - lower).min(upper - var));
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        failures.is_empty() && secs < SANDWICH_BUDGET_S,
        format!(
            "20 instances, min slack {min_slack:.3e}, {} outside, {secs:.2} s (budget {SANDWICH_BUDGET_S} s){}",
            failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(": {}", failures.join("; "))
            }
        ),
    )
}

fn with_weights(rng: &mut ChaCha8Rng, topology: &[(usize, usize)], n: usize) -> InterferenceGraph {
    let edges: Vec<(usize, usize, f64)> = topology
        .iter()
        .flat_map(|&(i, j)| [(i, j), (j, i)])
        .map(|(i, j)| (i, j, rng.random_range(-0.5..1.0)))
        .collect();
    InterferenceGraph::new(n, edges).unwrap()
}

fn weight_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut random20 = Vec::new();
    for i in 0..19 {
        random20.push((i, i + 1));
    }
    for i in 0..20 {
        for j in i + 2..20 {
            if rng.random_bool(0.12) {
                random20.push((i, j));
            }
        }
    }
    let cases: Vec<(&str, usize, Vec<(usize, usize)>)> = vec![
        ("triangle", 3, vec![(0, 1), (1, 2), (0, 2)]),
        ("2-path", 3, vec![(0, 1), (1, 2)]),
        ("random-20", 20, random20),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, n, topo) in cases {
        let g1 = with_weights(&mut rng, &topo, n);
        let g2 = with_weights(&mut rng, &topo, n);
        let law1 = weight_invariant_law_default(&g1).unwrap();
        let law2 = weight_invariant_law_default(&g2).unwrap();
        let gap = (law1.lambda_star() - law2.lambda_star()).abs();
        ok &= gap <= 1e-12;
        let target = 1.0 / law1.lambda_star();
        let mut hits = vec![0usize; topo.len()];
        for r in 0..CO_CLUSTER_DRAWS {
            let c = sample_clustering(&law1, derive_seed(404, r as u64));
            for (e, &(i, j)) in topo.iter().enumerate() {
                if c.cluster_of(i) == c.cluster_of(j) {
                    hits[e] += 1;
                }
            }
        }
        let se = (target * (1.0 - target) / CO_CLUSTER_DRAWS as f64).sqrt();
        let worst = hits
            .iter()
            .map(|&h| (h as f64 / CO_CLUSTER_DRAWS as f64 - target).abs() / se)
            .fold(0.0, f64::max);
        ok &= worst <= BINOMIAL_SES;
        notes.push(format!("{name}: |dlambda| {gap:.1e}, worst edge {worst:.2} SE"));
    }
    ensure(
        ok,
        format!(
            "{} (tol 1e-12, {BINOMIAL_SES} SE, {CO_CLUSTER_DRAWS} draws)",
            notes.join(", ")
        ),
    )
}

fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut worst_ratio = f64::INFINITY;
    let mut max_layers_over_2d: f64 = 0.0;
    for t in 0..100 {
        let n = rng.random_range(2..=40);
        let nonneg = t % 2 == 0;
        let density = rng.random_range(0.02..0.3);
        let g = random_graph(&mut rng, n, density, if nonneg { 0.0 } else { -0.5 }, 1.0, true);
        let d = g.max_degree();
        let dec = decompose_into_matchings(&g);
        let mut seen = std::collections::BTreeMap::new();
        for layer in &dec.layers {
            let mut used = vec![false; n];
            for &(i, j) in layer {
                assert!(!used[i] && !used[j], "layer is not a matching");
                used[i] = true;
                used[j] = true;
                *seen.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        let mut skeleton: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|e| (e.unit.min(e.neighbor), e.unit.max(e.neighbor)))
            .collect();
        skeleton.sort_unstable();
        skeleton.dedup();
        if seen.len() != skeleton.len() || skeleton.iter().any(|e| seen.get(e) != Some(&1)) {
            return Err(format!("graph {t}: edges not covered exactly once"));
        }
        if d > 0 {
            max_layers_over_2d = max_layers_over_2d.max(dec.layers.len() as f64 / (2 * d) as f64);
            if dec.layers.len() > 2 * d {
                return Err(format!("graph {t}: {} layers > 2d = {}", dec.layers.len(), 2 * d));
            }
            if nonneg {
                let bound = total_weight(&g) / (2 * d) as f64;
                let mw = max_weight_matching(&g).weight;
                if mw < bound - 1e-12 {
                    return Err(format!("graph {t}: matching {mw} < {bound}"));
                }
                if bound > 0.0 {
                    worst_ratio = worst_ratio.min(mw / bound);
                }
            }
        }
    }
    Ok(format!(
        "100 graphs, exact cover, max layers/2d {max_layers_over_2d:.2}, min matching/(sum v / 2d) {worst_ratio:.2}"
    ))
}

fn table_config(n: usize, graph_seed: u64, design: DesignSpec, reps: usize) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(GraphSpec::rgg(n, 4.0, 0, graph_seed), design, reps, 2024);
    cfg.bounds.y_m = Some(TABLE1_Y_M);
    cfg
}

fn table_row() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut cells = Vec::new();
    for &s in &TABLE_SEEDS {
        let r = run_simulation(&table_config(TABLE_N, s, DesignSpec::FixedGreedy, TABLE_REPS)).unwrap();
        let hat = r.var_hat_upper().unwrap();
        ok &= (MEAN_BAND.0..=MEAN_BAND.1).contains(&r.mean);
        ok &= (VAR_BAND.0..=VAR_BAND.1).contains(&r.variance);
        ok &= hat >= r.variance;
        cells.push(format!("{:.3}/{:.3}/{:.3}", r.mean, r.variance, hat));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs <= TABLE_BUDGET_S;
    ensure(
        ok,
        format!(
            "n={TABLE_N} (4,0) R={TABLE_REPS}, mean/var/var-hat per seed: {} (mean in {MEAN_BAND:?}, var in {VAR_BAND:?}, var-hat >= var), {secs:.1} s",
            cells.join(" ")
        ),
    )
}

fn scaling_trend() -> Outcome {
    let avg = |n: usize| {
        TABLE_SEEDS
            .iter()
            .map(|&s| {
                run_simulation(&table_config(n, s, DesignSpec::FixedGreedy, TABLE_REPS))
                    .unwrap()
                    .variance
            })
            .sum::<f64>()
            / TABLE_SEEDS.len() as f64
    };
    let (v1, v2) = (avg(TABLE_N), avg(2 * TABLE_N));
    let ratio = v2 / v1;
    ensure(
        (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio),
        format!("mean var n=1000 {v1:.3}, n=2000 {v2:.3}, ratio {ratio:.3} (band {RATIO_BAND:?})"),
    )
}

fn normality() -> Outcome {
    let r = run_simulation(&table_config(TABLE_N, 0, DesignSpec::FixedGreedy, NORMALITY_REPS)).unwrap();
    let d = r.normality.unwrap();
    ensure(
        d.ks_distance < KS_MAX && d.skewness.abs() < SKEW_MAX,
        format!(
            "R={NORMALITY_REPS}: KS {:.4} (< {KS_MAX}), skew {:.4} (|.| < {SKEW_MAX}), excess kurtosis {:.4}",
            d.ks_distance, d.skewness, d.excess_kurtosis
        ),
    )
}

/// Surrogate bound from first principles.
fn surrogate(g: &InterferenceGraph, clusters: &[Vec<usize>], p: f64, y_l: f64, y_m: f64) -> f64 {
    let within = within_weight(g, clusters);
    if within == 0.0 {
        return f64::INFINITY;
    }
    let rho = total_weight(g) / within;
    let mut pos = vec![0.0; g.n()];
    for e in g.edges() {
        pos[e.unit] += e.weight.max(0.0);
    }
    let a = pos.into_iter().fold(0.0, f64::max);
    let (eta, delta) = eta_delta(g, clusters);
    let k = (2.0 / (p * (1.0 - p)) + 1.0) * y_m * y_m - y_m * y_l - y_l * y_l;
    rho * rho * (k * eta + ((y_m - y_l) / a).powi(2) * delta.abs())
}

fn local_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let mut min_gain = f64::INFINITY;
    let mut graphs = 0;
    while graphs < 20 {
        let n = rng.random_range(3..=10);
        let g = random_graph(&mut rng, n, 0.4, -0.5, 1.0, true);
        if !g.edges().iter().any(|e| e.weight > 0.0) {
            continue;
        }
        let (p, y_l, y_m) = (
            rng.random_range(0.2..0.8),
            rng.random_range(0.5..3.0),
            rng.random_range(3.0..8.0),
        );
        let c = greedy_clustering(&g, p, y_l, y_m).unwrap();
        let base = surrogate(&g, c.clusters(), p, y_l, y_m);
        for k in 0..c.len() {
            for l in k + 1..c.len() {
                let mut merged: Vec<Vec<usize>> = c.clusters().to_vec();
                let moved = merged.remove(l);
                merged[k].extend(moved);
                let gain = surrogate(&g, &merged, p, y_l, y_m) - base;
                if gain < -1e-12 * base.abs().max(1.0) {
                    return Err(format!(
                        "graph {graphs}: merging {k} and {l} lowers the surrogate by {}",
                        -gain
                    ));
                }
                min_gain = min_gain.min(gain);
            }
        }
        graphs += 1;
    }
    Ok(format!("20 graphs, min pairwise Delta A = {min_gain:.3e} (>= 0)"))
}

fn delta_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut max_ratio: f64 = 0.0;
    for t in 0..200 {
        let n = rng.random_range(2..=30);
        let density = rng.random_range(0.05..0.9);
        let g = random_graph(&mut rng, n, density, -1.0, 1.0, true);
        let m_clusters = rng.random_range(1..=n);
        let c = random_clustering(&mut rng, n, m_clusters);
        let (_, delta) = eta_delta(&g, c.clusters());
        let stats = PartitionStats::compute(&g, &c).unwrap();
        assert!((stats.delta - delta).abs() <= 1e-12);
        let bound = c.max_cluster_size() as f64 / n as f64;
        if delta > bound + 1e-15 {
            return Err(format!("pair {t}: delta {delta} > {bound}"));
        }
        max_ratio = max_ratio.max(delta / bound);
    }
    Ok(format!("200 pairs, max delta / (max|C|/n) = {max_ratio:.3}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unbiasedness oracle", unbiasedness),
        ("cluster-based bias", cluster_based_bias),
        ("cluster-based variance sandwich", sandwich),
        ("weight invariance", weight_invariance),
        ("matching decomposition", decomposition),
        ("desk-scale simulation row", table_row),
        ("variance scaling trend", scaling_trend),
        ("normality", normality),
        ("greedy local optimality", local_optimality),
        ("delta size bound", delta_bound),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(msg) => println!("PASS [{}] {name}: {msg}", idx + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg}", idx + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
