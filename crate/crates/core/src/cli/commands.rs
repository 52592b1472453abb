use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use super::*;
use crate::bounds::{bound_cluster_based, bound_mixed, check_outcome_range};
use crate::clustering::{
    greedy_clustering, sample_clustering, two_hop_clustering, weight_invariant_law_default, Clustering, PartitionStats,
};
use crate::design::{assign_bernoulli, assign_cluster_based, assign_mixed};
use crate::estimation::{ht_cluster_based, mixed_estimate, rho_fixed, EstimateBreakdown};
use crate::graph::{GraphStats, InterferenceGraph};
use crate::io::{read_clustering, read_graph, read_json, read_model, to_json_string};
use crate::outcome::{evaluate_outcomes, outcome_bounds, OutcomeModel};
use crate::simulation::{
    build_instance, design_clustering, reports_to_csv, run_simulation, scaling_study, scaling_study_seeds,
    scaling_to_csv, simulate, table1_grid, table1_with_timing, ClusteringChoice, DesignSpec, GraphSpec, Instance,
    SimulationConfig, SimulationOptions, Table1Row,
};

fn echo<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

pub(super) fn dispatch(command: &Command, ctx: &mut Context) -> Result<()> {
    let started = Instant::now();
    let (name, config) = match command {
        Command::GenGraph(a) => ("gen-graph", gen_graph(a, ctx)?),
        Command::Cluster(a) => ("cluster", cluster(a, ctx)?),
        Command::Assign(a) => ("assign", assign(a, ctx)?),
        Command::Estimate(a) => ("estimate", estimate(a, ctx)?),
        Command::Bounds(a) => ("bounds", bounds(a, ctx)?),
        Command::Simulate(a) => ("simulate", simulate_cmd(a, ctx)?),
        Command::Scaling(a) => ("scaling", scaling(a, ctx)?),
        Command::Table1(a) => ("table1", table1_cmd(a, ctx)?),
        Command::Pipeline(a) => ("pipeline", pipeline(a, ctx, started)?),
    };
    if let Some(path) = ctx.global.manifest.clone() {
        let manifest = build_manifest(ctx, name, config, &path, started)?;
        ctx.write(&path, &to_json_string(&manifest)?)?;
    }
    Ok(())
}

/// Manifest at `target`; output paths are relative to its directory.
fn build_manifest(ctx: &Context, name: &str, config: Value, target: &Path, started: Instant) -> Result<RunManifest> {
    let base = target.parent().unwrap_or(Path::new(""));
    let mut m = RunManifest::new(name, config, ctx.seed(), ctx.global.threads);
    if ctx.global.timing {
        m.wall_clock_s = Some(started.elapsed().as_secs_f64());
    }
    if !ctx.global.dry_run {
        let outputs: Vec<PathBuf> = ctx.written.iter().filter(|p| p.as_path() != target).cloned().collect();
        m.record_outputs(base, &outputs)?;
    }
    Ok(m)
}

fn triple_usize(v: &[f64], what: &str) -> Result<(usize, f64, usize)> {
    let int = |x: f64, name: &str| {
        if x >= 0.0 && x.fract() == 0.0 && x.is_finite() {
            Ok(x as usize)
        } else {
            Err(Error::invalid(format!(
                "{what}: {name} must be a non-negative integer, got {x}"
            )))
        }
    };
    match v {
        [n, r0, r1] => Ok((int(*n, "N")?, *r0, int(*r1, "R1")?)),
        _ => Err(Error::invalid(format!("{what} takes three values"))),
    }
}

fn cycle_spec(v: &[usize], seed: u64, weights: Option<WeightArg>) -> Result<GraphSpec> {
    match v {
        [n, d, kappa] => Ok(GraphSpec::Cycle {
            n: *n,
            d: *d,
            kappa: *kappa,
            seed,
            weights: weights.map(|w| w.0).unwrap_or(WeightRule::InverseDegree),
        }),
        _ => Err(Error::invalid("--cycle takes three values")),
    }
}

fn rgg_spec(v: &[f64], seed: u64, weights: Option<WeightArg>, rescale: bool) -> Result<GraphSpec> {
    let (n, r0, r1) = triple_usize(v, "--rgg")?;
    Ok(GraphSpec::Rgg {
        n,
        r0,
        r1,
        seed,
        weights: weights.map(|w| w.0).unwrap_or_default(),
        rescale,
    })
}

#[derive(Serialize)]
struct GraphSidecar {
    n: usize,
    directed_edges: usize,
    total_weight: f64,
    max_positive_row_sum: f64,
    max_abs_row_sum: f64,
    #[serde(flatten)]
    stats: GraphStats,
    violations: Vec<String>,
}

fn sidecar(graph: &InterferenceGraph, model: &OutcomeModel) -> Result<GraphSidecar> {
    let mut abs_rows = vec![0.0f64; graph.n()];
    for e in graph.edges() {
        abs_rows[e.unit] += e.weight.abs();
    }
    Ok(GraphSidecar {
        n: graph.n(),
        directed_edges: graph.edge_count(),
        total_weight: graph.total_weight(),
        max_positive_row_sum: graph.max_positive_row_sum(),
        max_abs_row_sum: abs_rows.into_iter().fold(0.0, f64::max),
        stats: GraphStats::compute(graph, Some(model), None)?,
        violations: graph.validate().violations.iter().map(|v| v.to_string()).collect(),
    })
}

fn write_instance(ctx: &mut Context, inst: &Instance, graph: &Path, model: Option<&Path>, stats: &Path) -> Result<()> {
    ctx.write(
        graph,
        &to_json_string(&crate::io::GraphRecord::from_graph(&inst.graph))?,
    )?;
    if let Some(m) = model {
        ctx.write(m, &to_json_string(&inst.model)?)?;
    }
    ctx.write(stats, &to_json_string(&sidecar(&inst.graph, &inst.model)?)?)
}

fn gen_graph(a: &GenGraphArgs, ctx: &mut Context) -> Result<Value> {
    let seed = ctx.seed();
    let spec = match (&a.rgg, &a.cycle) {
        (Some(v), _) => rgg_spec(v, seed, a.weights, a.rescale)?,
        (None, Some(v)) => cycle_spec(v, seed, a.weights)?,
        (None, None) => return Err(Error::invalid("pass --rgg or --cycle")),
    };
    let mut inst = build_instance(&spec, a.gamma_rule.into(), None)?;
    if a.rescale && a.cycle.is_some() {
        inst.graph = inst.graph.rescaled_rows();
        inst.model = crate::outcome::generate_outcome_model(&inst.graph, seed, a.gamma_rule.into())?;
    }
    let stats = a.stats.clone().unwrap_or_else(|| a.out.with_extension("stats.json"));
    write_instance(ctx, &inst, &a.out, a.model.as_deref(), &stats)?;
    Ok(echo(&(a, &spec)))
}

fn outcome_range(
    graph: &InterferenceGraph,
    model: Option<&OutcomeModel>,
    y_l: Option<f64>,
    y_m: Option<f64>,
) -> Result<(f64, f64)> {
    let base = model.map(|m| outcome_bounds(graph, m)).transpose()?;
    match (y_l.or(base.map(|b| b.0)), y_m.or(base.map(|b| b.1))) {
        (Some(l), Some(m)) => {
            check_outcome_range(l, m)?;
            Ok((l, m))
        }
        _ => Err(Error::invalid(
            "the outcome range needs --model or both --y-l and --y-m",
        )),
    }
}

fn read_optional_model(path: Option<&Path>, graph: &InterferenceGraph) -> Result<Option<OutcomeModel>> {
    path.map(|p| {
        let m = read_model(p)?;
        m.check_matches(graph)?;
        Ok(m)
    })
    .transpose()
}

fn cluster(a: &ClusterArgs, ctx: &mut Context) -> Result<Value> {
    let graph = read_graph(&a.graph)?;
    let model = read_optional_model(a.model.as_deref(), &graph)?;
    let clustering = match a.algo {
        ClusterAlgo::Greedy => {
            let (y_l, y_m) = outcome_range(&graph, model.as_ref(), a.y_l, a.y_m)?;
            greedy_clustering(&graph, a.p, y_l, y_m)?
        }
        ClusterAlgo::TwoHop => two_hop_clustering(&graph, a.kappa.unwrap_or_else(|| graph.growth_constant(None)))?,
        ClusterAlgo::WeightInvariant => sample_clustering(&weight_invariant_law_default(&graph)?, ctx.seed()),
        ClusterAlgo::Singleton => Clustering::singletons(graph.n()),
        ClusterAlgo::Whole => Clustering::whole(graph.n()),
    };
    let stats = PartitionStats::compute(&graph, &clustering)?;
    eprintln!(
        "clusters {} eta {:.6} delta {:.6} rho {:.6}",
        clustering.len(),
        stats.eta,
        stats.delta,
        stats.rho
    );
    ctx.emit(a.out.as_deref(), &to_json_string(&clustering)?)?;
    Ok(echo(a))
}

fn assign(a: &AssignArgs, ctx: &mut Context) -> Result<Value> {
    let clustering = a.clustering.as_deref().map(read_clustering).transpose()?;
    let need = || {
        clustering
            .as_ref()
            .ok_or_else(|| Error::invalid("this design needs --clustering"))
    };
    let seed = ctx.seed();
    let assignment = match a.design {
        AssignDesign::Mixed => assign_mixed(need()?, a.p, seed)?,
        AssignDesign::ClusterBased => assign_cluster_based(need()?, a.p, seed)?,
        AssignDesign::Bernoulli => {
            let n =
                a.n.or(clustering.as_ref().map(Clustering::n))
                    .ok_or_else(|| Error::invalid("a Bernoulli design needs --n or --clustering"))?;
            assign_bernoulli(n, a.p, seed)?
        }
    };
    ctx.emit(a.out.as_deref(), &to_json_string(&assignment.to_record())?)?;
    Ok(echo(a))
}

#[derive(Serialize)]
struct EstimateOutput {
    estimator: EstimatorKind,
    tau: f64,
    true_ate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<EstimateBreakdown>,
}

fn estimate(a: &EstimateArgs, ctx: &mut Context) -> Result<Value> {
    let clustering = a.clustering.as_deref().map(read_clustering).transpose()?;
    let assignment = crate::io::read_assignment(&a.assignment, clustering.as_ref())?;
    let graph = a.graph.as_deref().map(read_graph).transpose()?;
    let model = match &graph {
        Some(g) => read_optional_model(a.model.as_deref(), g)?,
        None if a.model.is_some() => return Err(Error::invalid("--model needs --graph")),
        None => None,
    };
    if let (Some(g), Some(c)) = (&graph, &clustering) {
        c.check_matches(g)?;
    }
    let outcomes: Vec<f64> = match (&a.outcomes, &graph, &model) {
        (Some(path), _, _) => read_json(path)?,
        (None, Some(g), Some(m)) => evaluate_outcomes(g, m, &assignment.z)?,
        _ => {
            return Err(Error::invalid(
                "observed outcomes need --outcomes or --graph with --model",
            ))
        }
    };
    let true_ate = graph.as_ref().zip(model.as_ref()).map(|(g, m)| m.true_ate(g));
    let out = match a.estimator {
        EstimatorKind::Ht => EstimateOutput {
            estimator: a.estimator,
            tau: ht_cluster_based(&outcomes, &assignment)?,
            true_ate,
            breakdown: None,
        },
        EstimatorKind::Mixed => {
            let rho = match (a.rho, &graph, &clustering) {
                (Some(r), _, _) => r,
                (None, Some(g), Some(c)) => rho_fixed(g, c)?,
                _ => {
                    return Err(Error::invalid(
                        "the mixed estimator needs --rho or --graph with --clustering",
                    ))
                }
            };
            let b = mixed_estimate(&outcomes, &assignment, rho)?;
            EstimateOutput {
                estimator: a.estimator,
                tau: b.tau,
                true_ate,
                breakdown: Some(b),
            }
        }
    };
    ctx.emit(a.out.as_deref(), &to_json_string(&out)?)?;
    Ok(echo(a))
}

fn bounds(a: &BoundsArgs, ctx: &mut Context) -> Result<Value> {
    let graph = read_graph(&a.graph)?;
    let clustering = read_clustering(&a.clustering)?;
    let model = read_optional_model(a.model.as_deref(), &graph)?;
    let stats = PartitionStats::compute(&graph, &clustering)?;
    let (y_l, y_m) = outcome_range(&graph, model.as_ref(), a.y_l, a.y_m)?;
    let gamma = a
        .gamma
        .or(model.as_ref().map(|m| m.gamma))
        .ok_or_else(|| Error::invalid("bounds need --gamma or --model"))?;
    let report = match a.design {
        BoundDesign::Mixed => bound_mixed(&stats, a.p, y_l, y_m, gamma * gamma, a.remainder, graph.n())?,
        BoundDesign::ClusterBased => bound_cluster_based(&stats, a.p, y_l, y_m, gamma * gamma)?,
    };
    ctx.emit(a.out.as_deref(), &to_json_string(&report)?)?;
    Ok(echo(a))
}

/// Configuration file values overridden by flags.
fn simulation_config(a: &SimulationArgs, ctx: &Context) -> Result<SimulationConfig> {
    let file: Option<SimulationConfig> = a.config.as_deref().map(read_json).transpose()?;
    let src = &a.source;
    let graph_seed = a.graph_seed.unwrap_or(0);
    let graph = if let Some(v) = &src.rgg {
        rgg_spec(v, graph_seed, src.weights, src.rescale)?
    } else if let Some(v) = &src.cycle {
        cycle_spec(v, graph_seed, src.weights)?
    } else if let Some(path) = &src.graph {
        GraphSpec::File {
            path: path.clone(),
            model: src.model.clone(),
        }
    } else if let Some(f) = &file {
        let mut g = f.graph.clone();
        if let Some(s) = a.graph_seed {
            g = g.with_seed(s)?;
        }
        match &mut g {
            GraphSpec::Rgg { weights, rescale, .. } => {
                if let Some(w) = src.weights {
                    *weights = w.0;
                }
                *rescale |= src.rescale;
            }
            GraphSpec::Cycle { weights, .. } => {
                if let Some(w) = src.weights {
                    *weights = w.0;
                }
            }
            GraphSpec::File { model, .. } => {
                if src.model.is_some() {
                    model.clone_from(&src.model);
                }
            }
        }
        g
    } else {
        return Err(Error::invalid("no graph: pass --config, --rgg, --cycle or --graph"));
    };
    if src.model.is_some() && !matches!(graph, GraphSpec::File { .. }) {
        return Err(Error::invalid("--model needs a graph file"));
    }

    let mut design = if let Some(path) = &a.clustering {
        DesignSpec::FixedFile { path: path.clone() }
    } else if let Some(kind) = a.design {
        match kind {
            DesignKind::FixedGreedy => DesignSpec::FixedGreedy,
            DesignKind::TwoHop => DesignSpec::TwoHop { kappa: None },
            DesignKind::WeightInvariant => DesignSpec::WeightInvariant,
            DesignKind::ClusterBased => DesignSpec::ClusterBased {
                clustering: ClusteringChoice::Greedy,
            },
            DesignKind::Bernoulli => DesignSpec::Bernoulli,
        }
    } else {
        file.as_ref()
            .map(|f| f.design.clone())
            .unwrap_or(DesignSpec::FixedGreedy)
    };
    if let Some(k) = a.kappa {
        match &mut design {
            DesignSpec::TwoHop { kappa }
            | DesignSpec::ClusterBased {
                clustering: ClusteringChoice::TwoHop { kappa },
            } => *kappa = Some(k),
            _ => return Err(Error::invalid("--kappa only applies to two-hop clusterings")),
        }
    }

    let mut cfg = file.unwrap_or_else(|| SimulationConfig::new(graph.clone(), design.clone(), 1000, 0));
    cfg.graph = graph;
    cfg.design = design;
    if let Some(g) = src.gamma_rule {
        cfg.gamma_rule = g.into();
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = ctx.global.seed {
        cfg.seed = s;
    }
    if a.y_l.is_some() {
        cfg.bounds.y_l = a.y_l;
    }
    if a.y_m.is_some() {
        cfg.bounds.y_m = a.y_m;
    }
    if let Some(c) = a.remainder {
        cfg.bounds.remainder_coefficient = c;
    }
    cfg.timing |= ctx.global.timing;
    cfg.validate()?;
    cfg.check_references()?;
    Ok(cfg)
}

fn simulate_cmd(a: &SimulateArgs, ctx: &mut Context) -> Result<Value> {
    let mut cfg = simulation_config(&a.sim, ctx)?;
    cfg.emit_samples |= a.emit_samples;
    if ctx.global.dry_run {
        eprintln!("dry run: configuration is valid");
        return Ok(echo(&cfg));
    }
    let report = run_simulation(&cfg)?;
    ctx.emit(a.out.as_deref(), &to_json_string(&report)?)?;
    if let Some(csv) = &a.csv {
        ctx.write(csv, &reports_to_csv(std::slice::from_ref(&report)))?;
    }
    Ok(echo(&cfg))
}

fn scaling(a: &ScalingArgs, ctx: &mut Context) -> Result<Value> {
    let cfg = simulation_config(&a.sim, ctx)?;
    for &n in &a.n_list {
        cfg.graph.with_n(n)?;
    }
    let config = echo(&(&cfg, &a.n_list, &a.graph_seeds));
    if ctx.global.dry_run {
        eprintln!("dry run: configuration is valid");
        return Ok(config);
    }
    let table = if a.graph_seeds.is_empty() {
        scaling_study(&cfg, &a.n_list)?
    } else {
        scaling_study_seeds(&cfg, &a.n_list, &a.graph_seeds)?
    };
    if let Some(slope) = table.slope {
        eprintln!("log-log slope {slope:.4}");
    }
    ctx.emit(a.out.as_deref(), &scaling_to_csv(&table))?;
    if let Some(json) = &a.json {
        ctx.write(json, &to_json_string(&table)?)?;
    }
    Ok(config)
}

fn parse_rows(specs: &[String], scale: f64) -> Result<Vec<Table1Row>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("--scale must be positive, got {scale}")));
    }
    let mut rows = Vec::new();
    for s in specs {
        if s == "all" {
            rows.extend(table1_grid());
            continue;
        }
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("--rows {s:?}: {e}")))?;
        let (n, r0, r1) = triple_usize(&v, "--rows")?;
        rows.push(Table1Row { n, r0, r1 });
    }
    for row in &mut rows {
        row.n = ((row.n as f64 * scale).round() as usize).max(2);
    }
    Ok(rows)
}

fn table1_cmd(a: &Table1Args, ctx: &mut Context) -> Result<Value> {
    let rows = parse_rows(&a.rows, a.scale)?;
    if a.reps == 0 {
        return Err(Error::invalid("--reps must be at least 1"));
    }
    let config = echo(&(a, &rows));
    if ctx.global.dry_run {
        eprintln!("dry run: {} rows", rows.len());
        return Ok(config);
    }
    let reports = table1_with_timing(&rows, a.reps, ctx.seed(), a.graph_seed, ctx.global.timing)?;
    ctx.emit(a.out.as_deref(), &reports_to_csv(&reports))?;
    if let Some(json) = &a.json {
        ctx.write(json, &to_json_string(&reports)?)?;
    }
    Ok(config)
}

fn pipeline(a: &PipelineArgs, ctx: &mut Context, started: Instant) -> Result<Value> {
    let mut cfg: SimulationConfig = read_json(&a.config)?;
    if let Some(s) = ctx.global.seed {
        cfg.seed = s;
    }
    cfg.timing |= ctx.global.timing;
    cfg.validate()?;
    cfg.check_references()?;
    let dir = &a.out_dir;
    if ctx.global.dry_run {
        eprintln!("dry run: configuration is valid; outputs would go to {}", dir.display());
        return Ok(echo(&cfg));
    }
    let inst = build_instance(&cfg.graph, cfg.gamma_rule, cfg.model_seed)?;
    write_instance(
        ctx,
        &inst,
        &dir.join("graph.json"),
        Some(&dir.join("model.json")),
        &dir.join("graph.stats.json"),
    )?;
    if let Some(c) = design_clustering(&inst, &cfg.design, cfg.p, &cfg.bounds)? {
        ctx.write(&dir.join("clustering.json"), &to_json_string(&c)?)?;
    }
    let report = simulate(&inst, &cfg.design, &SimulationOptions::from(&cfg))?;
    ctx.write(&dir.join("report.json"), &to_json_string(&report)?)?;
    ctx.write(&dir.join("report.csv"), &reports_to_csv(std::slice::from_ref(&report)))?;
    let config = echo(&cfg);
    let target = dir.join("manifest.json");
    if ctx.global.manifest.is_none() {
        let manifest = build_manifest(ctx, "pipeline", config.clone(), &target, started)?;
        ctx.write(&target, &to_json_string(&manifest)?)?;
    }
    Ok(config)
}
