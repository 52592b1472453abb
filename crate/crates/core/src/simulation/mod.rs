//! Monte Carlo harness: repeated design, assignment, observation and
//! estimation on a fixed instance.
//!
//! Replicate `r` draws all of its randomness from `derive_seed(seed, r)`
//! and results are combined in replicate order, so a report depends only on
//! its configuration, never on the thread count.

mod normality;
mod output;

pub use normality::{normality_diagnostics, NormalityDiagnostics, MIN_NORMALITY_SAMPLES};
pub use output::{reports_to_csv, scaling_to_csv, CSV_HEADER};

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_cluster_based, bound_mixed, BoundReport};
use crate::clustering::{
    greedy_clustering, sample_clustering, two_hop_clustering, weight_invariant_law_default, Clustering, PartitionStats,
};
use crate::design::{assign_bernoulli, assign_cluster_based, assign_mixed};
use crate::error::{Error, Result};
use crate::estimation::{ht_cluster_based, mixed_estimate, rho_fixed};
use crate::graph::{generate_cycle, generate_rgg, InterferenceGraph, RggParams, WeightRule};
use crate::outcome::{evaluate_outcomes, generate_outcome_model, outcome_bounds, GammaRule, OutcomeModel};
use crate::rng::derive_seed;

/// Where the interference graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Rgg {
        n: usize,
        r0: f64,
        r1: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        weights: WeightRule,
        #[serde(default)]
        rescale: bool,
    },
    Cycle {
        n: usize,
        d: usize,
        kappa: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "inverse_degree")]
        weights: WeightRule,
    },
    File {
        path: PathBuf,
        /// Outcome model file; generated when absent.
        #[serde(default)]
        model: Option<PathBuf>,
    },
}

fn inverse_degree() -> WeightRule {
    WeightRule::InverseDegree
}

impl GraphSpec {
    pub fn rgg(n: usize, r0: f64, r1: usize, seed: u64) -> Self {
        GraphSpec::Rgg {
            n,
            r0,
            r1,
            seed,
            weights: WeightRule::default(),
            rescale: false,
        }
    }

    pub fn with_n(&self, new_n: usize) -> Result<Self> {
        let mut spec = self.clone();
        match &mut spec {
            GraphSpec::Rgg { n, .. } | GraphSpec::Cycle { n, .. } => *n = new_n,
            GraphSpec::File { .. } => return Err(Error::invalid("cannot resize a graph read from a file")),
        }
        Ok(spec)
    }

    pub fn with_seed(&self, new_seed: u64) -> Result<Self> {
        let mut spec = self.clone();
        match &mut spec {
            GraphSpec::Rgg { seed, .. } | GraphSpec::Cycle { seed, .. } => *seed = new_seed,
            GraphSpec::File { .. } => return Err(Error::invalid("cannot reseed a graph read from a file")),
        }
        Ok(spec)
    }

    fn seed(&self) -> u64 {
        match self {
            GraphSpec::Rgg { seed, .. } | GraphSpec::Cycle { seed, .. } => *seed,
            GraphSpec::File { .. } => 0,
        }
    }
}

/// Which clustering a cluster-based design randomizes over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum ClusteringChoice {
    #[default]
    Greedy,
    TwoHop {
        #[serde(default)]
        kappa: Option<f64>,
    },
    Singleton,
    Whole,
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DesignSpec {
    /// Mixed design on the greedy clustering.
    FixedGreedy,
    /// Mixed design on the two-hop clustering.
    TwoHop {
        #[serde(default)]
        kappa: Option<f64>,
    },
    /// Mixed design on a clustering read from a file.
    FixedFile {
        path: PathBuf,
    },
    /// Mixed design on a fresh weight-invariant clustering per replicate.
    WeightInvariant,
    /// Cluster-based design with the HT estimator.
    ClusterBased {
        #[serde(default)]
        clustering: ClusteringChoice,
    },
    Bernoulli,
}

impl DesignSpec {
    pub fn label(&self) -> &'static str {
        match self {
            DesignSpec::FixedGreedy => "fixed-greedy",
            DesignSpec::TwoHop { .. } => "two-hop",
            DesignSpec::FixedFile { .. } => "fixed-file",
            DesignSpec::WeightInvariant => "weight-invariant",
            DesignSpec::ClusterBased { .. } => "cluster-based",
            DesignSpec::Bernoulli => "bernoulli",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BoundOptions {
    /// Overrides the instance's largest achievable outcome.
    #[serde(default)]
    pub y_m: Option<f64>,
    /// Overrides the instance's smallest achievable outcome.
    #[serde(default)]
    pub y_l: Option<f64>,
    #[serde(default)]
    pub remainder_coefficient: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub gamma_rule: GammaRule,
    /// Seed of the generated outcome model; defaults to the graph seed.
    #[serde(default)]
    pub model_seed: Option<u64>,
    pub design: DesignSpec,
    #[serde(default = "half")]
    pub p: f64,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bounds: BoundOptions,
    #[serde(default)]
    pub emit_samples: bool,
    /// Record wall-clock time in the report; breaks byte reproducibility.
    #[serde(default)]
    pub timing: bool,
}

impl SimulationConfig {
    pub fn new(graph: GraphSpec, design: DesignSpec, replicates: usize, seed: u64) -> Self {
        Self {
            graph,
            gamma_rule: GammaRule::default(),
            model_seed: None,
            design,
            p: 0.5,
            replicates,
            seed,
            bounds: BoundOptions::default(),
            emit_samples: false,
            timing: false,
        }
    }

    /// Every file the configuration refers to must exist.
    pub fn check_references(&self) -> Result<()> {
        let mut paths: Vec<&PathBuf> = Vec::new();
        if let GraphSpec::File { path, model } = &self.graph {
            paths.push(path);
            paths.extend(model.iter());
        }
        match &self.design {
            DesignSpec::FixedFile { path }
            | DesignSpec::ClusterBased {
                clustering: ClusteringChoice::File { path },
            } => paths.push(path),
            _ => {}
        }
        for path in paths {
            if !path.is_file() {
                return Err(Error::invalid(format!(
                    "referenced file {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::invalid(format!("p must lie in (0, 1), got {}", self.p)));
        }
        if !self.bounds.remainder_coefficient.is_finite() {
            return Err(Error::invalid("remainder coefficient must be finite"));
        }
        Ok(())
    }
}

/// Identifies an instance in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceLabel {
    pub n: usize,
    pub r0: Option<f64>,
    pub r1: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: InterferenceGraph,
    pub model: OutcomeModel,
    pub label: InstanceLabel,
}

impl Instance {
    pub fn new(graph: InterferenceGraph, model: OutcomeModel) -> Result<Self> {
        model.check_matches(&graph)?;
        let label = InstanceLabel {
            n: graph.n(),
            r0: None,
            r1: None,
        };
        Ok(Self { graph, model, label })
    }
}

pub fn build_instance(spec: &GraphSpec, gamma_rule: GammaRule, model_seed: Option<u64>) -> Result<Instance> {
    let model_seed = model_seed.unwrap_or(spec.seed());
    let (graph, label, model_file) = match spec {
        GraphSpec::Rgg {
            n,
            r0,
            r1,
            seed,
            weights,
            rescale,
        } => {
            let params = RggParams {
                n: *n,
                r0: *r0,
                r1: *r1,
                weights: *weights,
                rescale: *rescale,
            };
            let label = InstanceLabel {
                n: *n,
                r0: Some(*r0),
                r1: Some(*r1),
            };
            (generate_rgg(&params, *seed)?, label, None)
        }
        GraphSpec::Cycle {
            n,
            d,
            kappa,
            seed,
            weights,
        } => {
            let label = InstanceLabel {
                n: *n,
                r0: None,
                r1: None,
            };
            (generate_cycle(*n, *d, *kappa, *weights, *seed)?, label, None)
        }
        GraphSpec::File { path, model } => {
            let g = crate::io::read_graph(path)?;
            let label = InstanceLabel {
                n: g.n(),
                r0: None,
                r1: None,
            };
            (g, label, model.as_ref())
        }
    };
    let model = match model_file {
        Some(path) => crate::io::read_model(path)?,
        None => generate_outcome_model(&graph, model_seed, gamma_rule)?,
    };
    model.check_matches(&graph)?;
    Ok(Instance { graph, model, label })
}

/// Replicate-level knobs, separated from how the instance is obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub p: f64,
    pub replicates: usize,
    pub seed: u64,
    pub bounds: BoundOptions,
    pub emit_samples: bool,
    pub timing: bool,
}

impl From<&SimulationConfig> for SimulationOptions {
    fn from(c: &SimulationConfig) -> Self {
        Self {
            p: c.p,
            replicates: c.replicates,
            seed: c.seed,
            bounds: c.bounds.clone(),
            emit_samples: c.emit_samples,
            timing: c.timing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub instance: InstanceLabel,
    pub design: String,
    pub replicates: usize,
    pub p: f64,
    pub seed: u64,
    pub mean: f64,
    /// Sample variance with divisor `R - 1`; NaN for a single replicate.
    pub variance: f64,
    pub std_error: f64,
    pub true_ate: f64,
    pub bias: f64,
    /// Variance bounds; for the weight-invariant design these average the
    /// per-draw bounds and add the spread of the conditional mean.
    pub bounds: Option<BoundReport>,
    /// Number of clusters (mean over draws for randomized clusterings).
    pub clusters: f64,
    pub normality: Option<NormalityDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
    #[serde(default)]
    pub wall_time_s: Option<f64>,
}

impl SimulationReport {
    pub fn var_hat_upper(&self) -> Option<f64> {
        self.bounds.map(|b| b.upper)
    }
}

pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let instance = build_instance(&config.graph, config.gamma_rule, config.model_seed)?;
    simulate(&instance, &config.design, &SimulationOptions::from(config))
}

/// Compensated sum in slice order.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and variance with divisor `R - 1`.
pub(crate) fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let mean = neumaier_sum(xs.iter().copied()) / r;
    let var = if xs.len() > 1 {
        neumaier_sum(xs.iter().map(|x| (x - mean).powi(2))) / (r - 1.0)
    } else {
        f64::NAN
    };
    (mean, var)
}

pub(crate) fn fixed_clustering(
    choice: &ClusteringChoice,
    graph: &InterferenceGraph,
    p: f64,
    y_range: impl FnOnce() -> Result<(f64, f64)>,
) -> Result<Clustering> {
    match choice {
        ClusteringChoice::Greedy => {
            let (y_l, y_m) = y_range()?;
            greedy_clustering(graph, p, y_l, y_m)
        }
        ClusteringChoice::TwoHop { kappa } => {
            two_hop_clustering(graph, kappa.unwrap_or_else(|| graph.growth_constant(None)))
        }
        ClusteringChoice::Singleton => Ok(Clustering::singletons(graph.n())),
        ClusteringChoice::Whole => Ok(Clustering::whole(graph.n())),
        ClusteringChoice::File { path } => {
            let c = crate::io::read_clustering(path)?;
            c.check_matches(graph)?;
            Ok(c)
        }
    }
}

/// Outcome range used for clustering and bounds, after overrides.
pub fn resolve_outcome_range(instance: &Instance, options: &BoundOptions) -> Result<(f64, f64)> {
    let (y_l, y_m) = outcome_bounds(&instance.graph, &instance.model)?;
    let y_l = options.y_l.unwrap_or(y_l);
    let y_m = options.y_m.unwrap_or(y_m);
    crate::bounds::check_outcome_range(y_l, y_m)?;
    Ok((y_l, y_m))
}

/// The fixed clustering a design randomizes over; `None` for designs
/// without one.
pub fn design_clustering(
    instance: &Instance,
    design: &DesignSpec,
    p: f64,
    bounds: &BoundOptions,
) -> Result<Option<Clustering>> {
    let choice = match design {
        DesignSpec::FixedGreedy => ClusteringChoice::Greedy,
        DesignSpec::TwoHop { kappa } => ClusteringChoice::TwoHop { kappa: *kappa },
        DesignSpec::FixedFile { path } => ClusteringChoice::File { path: path.clone() },
        DesignSpec::ClusterBased { clustering } => clustering.clone(),
        DesignSpec::WeightInvariant | DesignSpec::Bernoulli => return Ok(None),
    };
    fixed_clustering(&choice, &instance.graph, p, || resolve_outcome_range(instance, bounds)).map(Some)
}

pub fn simulate(instance: &Instance, design: &DesignSpec, options: &SimulationOptions) -> Result<SimulationReport> {
    let started = std::time::Instant::now();
    if options.replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    crate::bounds::check_probability(options.p)?;
    let graph = &instance.graph;
    let model = &instance.model;
    let n = graph.n();
    let p = options.p;
    let gamma_sq = model.gamma * model.gamma;
    let y_range = resolve_outcome_range(instance, &options.bounds);
    let fixed = || -> Result<Clustering> {
        design_clustering(instance, design, p, &options.bounds)?
            .ok_or_else(|| Error::invalid("design has no fixed clustering"))
    };
    let bound_or_none = |r: Result<BoundReport>| r.ok();

    let observe = |z: &[bool]| evaluate_outcomes(graph, model, z);
    let seed_of = |r: usize| derive_seed(options.seed, r as u64);

    let (taus, bounds, clusters): (Vec<f64>, Option<BoundReport>, f64) = match design {
        DesignSpec::FixedGreedy | DesignSpec::TwoHop { .. } | DesignSpec::FixedFile { .. } => {
            let clustering = fixed()?;
            let rho = rho_fixed(graph, &clustering)?;
            let taus = (0..options.replicates)
                .into_par_iter()
                .map(|r| {
                    let a = assign_mixed(&clustering, p, seed_of(r))?;
                    Ok(mixed_estimate(&observe(&a.z)?, &a, rho)?.tau)
                })
                .collect::<Result<Vec<f64>>>()?;
            let stats = PartitionStats::compute(graph, &clustering)?;
            let bounds = y_range.as_ref().ok().and_then(|&(y_l, y_m)| {
                bound_or_none(bound_mixed(
                    &stats,
                    p,
                    y_l,
                    y_m,
                    gamma_sq,
                    options.bounds.remainder_coefficient,
                    n,
                ))
            });
            (taus, bounds, clustering.len() as f64)
        }
        DesignSpec::WeightInvariant => {
            let law = weight_invariant_law_default(graph)?;
            let rho = law.rho();
            let draws = (0..options.replicates)
                .into_par_iter()
                .map(|r| {
                    let seed = seed_of(r);
                    let clustering = sample_clustering(&law, seed);
                    let a = assign_mixed(&clustering, p, seed)?;
                    let tau = mixed_estimate(&observe(&a.z)?, &a, rho)?.tau;
                    let stats = PartitionStats::compute(graph, &clustering)?.with_rho(rho);
                    Ok((tau, stats, clustering.len()))
                })
                .collect::<Result<Vec<_>>>()?;
            let taus: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let bounds = y_range.as_ref().ok().and_then(|&(y_l, y_m)| {
                let per_draw: Option<Vec<BoundReport>> = draws
                    .iter()
                    .map(|(_, s, _)| {
                        bound_or_none(bound_mixed(
                            s,
                            p,
                            y_l,
                            y_m,
                            gamma_sq,
                            options.bounds.remainder_coefficient,
                            n,
                        ))
                    })
                    .collect();
                let per_draw = per_draw?;
                let r = per_draw.len() as f64;
                let avg = |f: fn(&BoundReport) -> f64| neumaier_sum(per_draw.iter().map(f)) / r;
                // Spread of E[tau | C] = beta_bar + rho gamma W_C / n across draws.
                let within: Vec<f64> = draws.iter().map(|d| d.1.within_weight).collect();
                let (_, within_var) = mean_and_variance(&within);
                let spread = if within_var.is_finite() {
                    (rho * model.gamma / n as f64).powi(2) * within_var
                } else {
                    0.0
                };
                Some(BoundReport {
                    lower: avg(|b| b.lower) + spread,
                    upper: avg(|b| b.upper) + spread,
                    eta: avg(|b| b.eta),
                    delta: avg(|b| b.delta),
                    rho,
                    remainder_coefficient: options.bounds.remainder_coefficient,
                })
            });
            let clusters = neumaier_sum(draws.iter().map(|d| d.2 as f64)) / draws.len() as f64;
            (taus, bounds, clusters)
        }
        DesignSpec::ClusterBased { .. } => {
            let clustering = fixed()?;
            let taus = (0..options.replicates)
                .into_par_iter()
                .map(|r| {
                    let a = assign_cluster_based(&clustering, p, seed_of(r))?;
                    ht_cluster_based(&observe(&a.z)?, &a)
                })
                .collect::<Result<Vec<f64>>>()?;
            let stats = PartitionStats::compute(graph, &clustering)?;
            let bounds = y_range
                .as_ref()
                .ok()
                .and_then(|&(y_l, y_m)| bound_or_none(bound_cluster_based(&stats, p, y_l, y_m, gamma_sq)));
            (taus, bounds, clustering.len() as f64)
        }
        DesignSpec::Bernoulli => {
            let taus = (0..options.replicates)
                .into_par_iter()
                .map(|r| {
                    let a = assign_bernoulli(n, p, seed_of(r))?;
                    ht_cluster_based(&observe(&a.z)?, &a)
                })
                .collect::<Result<Vec<f64>>>()?;
            let stats = PartitionStats::compute(graph, &Clustering::singletons(n))?;
            let bounds = y_range
                .as_ref()
                .ok()
                .and_then(|&(y_l, y_m)| bound_or_none(bound_cluster_based(&stats, p, y_l, y_m, gamma_sq)));
            (taus, bounds, n as f64)
        }
    };

    let (mean, variance) = mean_and_variance(&taus);
    let true_ate = model.true_ate(graph);
    let normality = if taus.len() >= MIN_NORMALITY_SAMPLES {
        normality_diagnostics(&taus).ok()
    } else {
        None
    };
    Ok(SimulationReport {
        instance: instance.label,
        design: design.label().to_string(),
        replicates: options.replicates,
        p,
        seed: options.seed,
        mean,
        variance,
        std_error: (variance / taus.len() as f64).sqrt(),
        true_ate,
        bias: mean - true_ate,
        bounds,
        clusters,
        normality,
        samples: options.emit_samples.then_some(taus),
        wall_time_s: options.timing.then(|| started.elapsed().as_secs_f64()),
    })
}

/// One row of a scaling study, averaged over graph seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub var_hat_upper: Option<f64>,
    /// Per-seed sample variances.
    pub variances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of log variance on log n.
    pub slope: Option<f64>,
}

impl ScalingTable {
    /// Variance ratios between consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].variance / w[0].variance).collect()
    }
}

/// Variance versus `n` on the configuration's graph seed.
pub fn scaling_study(base: &SimulationConfig, n_list: &[usize]) -> Result<ScalingTable> {
    scaling_study_seeds(base, n_list, &[base.graph.seed()])
}

/// Variance versus `n`, averaged over several graph seeds.
pub fn scaling_study_seeds(base: &SimulationConfig, n_list: &[usize], graph_seeds: &[u64]) -> Result<ScalingTable> {
    if n_list.is_empty() || graph_seeds.is_empty() {
        return Err(Error::invalid(
            "scaling study needs at least one size and one graph seed",
        ));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let mut reports = Vec::new();
        for &gs in graph_seeds {
            let mut cfg = base.clone();
            cfg.graph = base.graph.with_n(n)?.with_seed(gs)?;
            reports.push(run_simulation(&cfg)?);
        }
        let k = reports.len() as f64;
        let hats: Option<Vec<f64>> = reports.iter().map(SimulationReport::var_hat_upper).collect();
        rows.push(ScalingRow {
            n,
            mean: neumaier_sum(reports.iter().map(|r| r.mean)) / k,
            variance: neumaier_sum(reports.iter().map(|r| r.variance)) / k,
            var_hat_upper: hats.map(|h| neumaier_sum(h) / k),
            variances: reports.iter().map(|r| r.variance).collect(),
        });
    }
    let slope = (rows.len() >= 2).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.variance.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(ScalingTable { rows, slope })
}

/// Degree settings `(r0, r1)` of the simulation grid.
pub const TABLE1_DEGREES: [(f64, usize); 6] = [(4.0, 0), (2.0, 2), (0.0, 4), (16.0, 0), (8.0, 8), (0.0, 16)];
pub const TABLE1_SIZES: [usize; 3] = [1000, 2000, 4000];

/// The outcome ceiling used for the grid's variance bounds.
pub const TABLE1_Y_M: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub r0: f64,
    pub r1: usize,
}

pub fn table1_grid() -> Vec<Table1Row> {
    TABLE1_SIZES
        .iter()
        .flat_map(|&n| TABLE1_DEGREES.iter().map(move |&(r0, r1)| Table1Row { n, r0, r1 }))
        .collect()
}

/// Runs the fixed-greedy and weight-invariant mixed designs on each row.
pub fn table1(rows: &[Table1Row], replicates: usize, seed: u64, graph_seed: u64) -> Result<Vec<SimulationReport>> {
    table1_with_timing(rows, replicates, seed, graph_seed, false)
}

pub fn table1_with_timing(
    rows: &[Table1Row],
    replicates: usize,
    seed: u64,
    graph_seed: u64,
    timing: bool,
) -> Result<Vec<SimulationReport>> {
    let mut out = Vec::new();
    for row in rows {
        for design in [DesignSpec::FixedGreedy, DesignSpec::WeightInvariant] {
            let mut cfg = SimulationConfig::new(
                GraphSpec::rgg(row.n, row.r0, row.r1, graph_seed),
                design,
                replicates,
                seed,
            );
            cfg.bounds.y_m = Some(TABLE1_Y_M);
            cfg.timing = timing;
            out.push(run_simulation(&cfg)?);
        }
    }
    Ok(out)
}
