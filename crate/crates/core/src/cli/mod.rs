//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O failure,
//! 4 numerical failure. Configuration precedence: built-in defaults, then
//! the `--config` JSON document, then individual flags.

mod commands;
mod manifest;

pub use manifest::{sha256_file, OutputDigest, RunManifest};

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightRule;
use crate::outcome::GammaRule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "netmix",
    version,
    about = "Mixed randomization experiments under network interference"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Master seed; overrides a configuration file's seed and defaults to 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for simulations; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Validate inputs and report planned outputs without writing files.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Record wall-clock times in reports and manifests.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Write a run manifest with output digests to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an interference graph, its outcome model and a stats sidecar.
    GenGraph(GenGraphArgs),
    /// Partition the units of a graph into clusters.
    Cluster(ClusterArgs),
    /// Draw a treatment assignment.
    Assign(AssignArgs),
    /// Estimate the treatment effect from one assignment.
    Estimate(EstimateArgs),
    /// Evaluate the variance bounds of a clustering.
    Bounds(BoundsArgs),
    /// Monte Carlo study of one design on one instance.
    Simulate(SimulateArgs),
    /// Variance versus network size.
    Scaling(ScalingArgs),
    /// The simulation grid over sizes and degree settings.
    Table1(Table1Args),
    /// Generate, cluster and simulate from one configuration file.
    Pipeline(PipelineArgs),
}

/// `scaled-uniform`, `inverse-degree`, `uniform:LO:HI` or `constant:V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightArg(pub WeightRule);

impl FromStr for WeightArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let rule = match parts.as_slice() {
            ["scaled-uniform"] => WeightRule::ScaledUniform,
            ["inverse-degree"] => WeightRule::InverseDegree,
            ["uniform", lo, hi] => WeightRule::Uniform {
                low: num(lo)?,
                high: num(hi)?,
            },
            ["constant", v] => WeightRule::Constant { value: num(v)? },
            _ => return Err(format!("unknown weight rule {s:?}")),
        };
        Ok(WeightArg(rule))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRuleArg {
    #[default]
    UnitAte,
    Literal,
}

impl From<GammaRuleArg> for GammaRule {
    fn from(g: GammaRuleArg) -> Self {
        match g {
            GammaRuleArg::UnitAte => GammaRule::UnitAte,
            GammaRuleArg::Literal => GammaRule::Literal,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphSource {
    /// Random geometric graph with N units.
    #[arg(long, num_args = 3, value_names = ["N", "R0", "R1"], conflicts_with_all = ["cycle", "graph"])]
    pub rgg: Option<Vec<f64>>,
    /// (d, kappa)-cycle with N units.
    #[arg(long, num_args = 3, value_names = ["N", "D", "KAPPA"], conflicts_with = "graph")]
    pub cycle: Option<Vec<usize>>,
    /// Graph file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Outcome model file; generated from the graph seed when absent.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<WeightArg>,
    /// Scale rows so that absolute weight sums are at most one.
    #[arg(long)]
    pub rescale: bool,
    #[arg(long, value_enum)]
    pub gamma_rule: Option<GammaRuleArg>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenGraphArgs {
    #[arg(long, num_args = 3, value_names = ["N", "R0", "R1"], conflicts_with = "cycle", required_unless_present = "cycle")]
    pub rgg: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["N", "D", "KAPPA"])]
    pub cycle: Option<Vec<usize>>,
    #[arg(long)]
    pub weights: Option<WeightArg>,
    #[arg(long)]
    pub rescale: bool,
    #[arg(long, value_enum, default_value_t = GammaRuleArg::UnitAte)]
    pub gamma_rule: GammaRuleArg,
    /// Graph output file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the outcome model here.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Stats sidecar; defaults to `<out>.stats.json`.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterAlgo {
    Greedy,
    TwoHop,
    WeightInvariant,
    Singleton,
    Whole,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Supplies the outcome range for the greedy algorithm.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ClusterAlgo::Greedy)]
    pub algo: ClusterAlgo,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Growth constant for the two-hop algorithm; estimated when absent.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub y_l: Option<f64>,
    #[arg(long)]
    pub y_m: Option<f64>,
    /// Clustering output; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignDesign {
    Mixed,
    ClusterBased,
    Bernoulli,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AssignArgs {
    #[arg(long, value_enum, default_value_t = AssignDesign::Mixed)]
    pub design: AssignDesign,
    #[arg(long)]
    pub clustering: Option<PathBuf>,
    /// Number of units for a Bernoulli design without a clustering.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Mixed,
    Ht,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long)]
    pub clustering: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Observed outcomes are computed from this model when given.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// JSON array of observed outcomes.
    #[arg(long, conflicts_with = "model")]
    pub outcomes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EstimatorKind::Mixed)]
    pub estimator: EstimatorKind,
    /// Overrides the weight ratio computed from the graph.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundDesign {
    Mixed,
    ClusterBased,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub clustering: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundDesign::Mixed)]
    pub design: BoundDesign,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub y_l: Option<f64>,
    #[arg(long)]
    pub y_m: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub remainder: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    FixedGreedy,
    TwoHop,
    WeightInvariant,
    ClusterBased,
    Bernoulli,
}

/// Simulation settings shared by `simulate` and `scaling`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulationArgs {
    /// JSON simulation configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub source: GraphSource,
    /// Seed of generated graphs.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long, value_enum)]
    pub design: Option<DesignKind>,
    /// Clustering file for a fixed mixed design.
    #[arg(long, conflicts_with = "design")]
    pub clustering: Option<PathBuf>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, short = 'R')]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub y_l: Option<f64>,
    #[arg(long)]
    pub y_m: Option<f64>,
    #[arg(long)]
    pub remainder: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimulationArgs,
    /// Keep per-replicate estimates in the JSON report.
    #[arg(long)]
    pub emit_samples: bool,
    /// JSON report; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub sim: SimulationArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// Graph seeds to average over; the configured graph seed when absent.
    #[arg(long, value_delimiter = ',')]
    pub graph_seeds: Vec<u64>,
    /// CSV table; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Table1Args {
    /// `all` or `N,R0,R1`; repeatable.
    #[arg(long, default_value = "1000,4,0")]
    pub rows: Vec<String>,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    /// Multiplies every network size.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// CSV table; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    /// JSON simulation configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Tracks written files so that a run can be summarized or undone.
pub(crate) struct Context {
    pub global: GlobalArgs,
    pub written: Vec<PathBuf>,
}

impl Context {
    fn new(global: GlobalArgs) -> Self {
        Self {
            global,
            written: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.global.seed.unwrap_or(0)
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        if self.global.dry_run {
            eprintln!("dry run: would write {}", path.display());
            return Ok(());
        }
        crate::io::write_text(path, text)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<()> {
        match path {
            Some(p) => self.write(p, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
            }
        }
    }

    pub fn cleanup(&mut self) {
        for p in self.written.drain(..) {
            let _ = std::fs::remove_file(p);
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut ctx = Context::new(cli.global.clone());
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.global.threads {
            if t == 0 {
                return Err(Error::invalid("--threads must be at least 1"));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::invalid(format!("thread pool: {e}")))?
    };
    let result = pool.install(|| commands::dispatch(&cli.command, &mut ctx));
    if result.is_err() {
        ctx.cleanup();
    }
    result
}
