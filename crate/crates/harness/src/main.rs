use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rootfind_core::centrality::{central_path_and_phi, log_phi_profile, select_roots, RankMethod};
use rootfind_core::flows::{certified_nx_bound_with, GammaFlow};
use rootfind_core::growth::Model;
use rootfind_core::rng::rng_from_seed;
use rootfind_core::PlaneTree;
use serde::Serialize;

use rootfind_harness::experiments::{
    calibrate_nx_constant, fit_scaling, run_dist_suite, run_error_curve, run_nx_tail, run_phi_tail,
    run_weight_tail, CALIBRATION_SEED,
};
use rootfind_harness::{ExperimentConfig, Format, HarnessError, Result, TrialRow, TrialTable, WorkerPool};

/// Root finding in randomly grown trees: simulation, ranking and bound checks.
#[derive(Parser)]
#[command(name = "rootfind", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of trials (trees or flow samples).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// TOML file with experiment settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Ua,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Phi,
    MaxSubtree,
}

impl From<MethodArg> for RankMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Phi => RankMethod::Phi,
            MethodArg::MaxSubtree => RankMethod::MaxSubtree,
        }
    }
}

#[derive(Args, Default)]
struct ModelArgs {
    /// Growth model; `--d` alone selects the regular model.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Degree of the regular model.
    #[arg(long)]
    d: Option<u32>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<Option<Model>> {
        match (self.model, self.d) {
            (None, None) => Ok(None),
            (Some(ModelKind::Ua), None) => Ok(Some(Model::Ua)),
            (Some(ModelKind::Ua), Some(_)) => Err(usage("--d applies only to the regular model")),
            (Some(ModelKind::Regular), None) => Err(usage("the regular model needs --d")),
            (_, Some(d)) => Ok(Some(Model::UaRegular { d })),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grow one tree and print it as `id parent_id birth_rank` lines.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Growth steps.
        #[arg(long)]
        n: usize,
    },
    /// Rank the nodes of a tree read from a file (`-` for stdin).
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 'k', long = "k", default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "phi")]
        method: MethodArg,
    },
    /// Probability that the root is missed by the K most central nodes.
    ErrorCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(short = 'k', long = "k", value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Tail of the competitive ratio.
    PhiTail {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// Probability of a large subtree at a deep or heavy node.
    WeightTail {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        m: Vec<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Exceedance probabilities of the word count of random limit flows.
    NxTail {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        y: Vec<f64>,
        /// Scale constant used instead of the frozen one.
        #[arg(long)]
        constant: Option<f64>,
        /// Fit the constant on the UA and degree-3 flows and report it.
        #[arg(long)]
        calibrate: bool,
    },
    /// Exact word count of a geometric flow with its certified bound.
    FlowCount {
        /// Sibling decay factor in (1, 2].
        #[arg(long, conflicts_with = "d", required_unless_present = "d")]
        alpha: Option<f64>,
        /// Arity; uses the decay factor associated with it.
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        x: f64,
    },
    /// Distributional and rearrangement checks of the limit objects.
    DistCheck,
    /// Fit ln K against sqrt(ln(1/ε)) on an error-curve table.
    FitScaling {
        #[arg(long)]
        input: PathBuf,
    },
}

fn usage(msg: &str) -> HarnessError {
    HarnessError::Config(msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn base_config(g: &GlobalArgs, experiment: &str) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = experiment.to_string();
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if g.workers.is_some() {
        cfg.workers = g.workers;
    }
    if g.out.is_some() {
        cfg.out = g.out.clone();
    }
    if let Some(f) = g.format {
        cfg.format = f.into();
    }
    Ok(cfg)
}

fn override_vec<T: Clone>(target: &mut Vec<T>, values: &[T]) {
    if !values.is_empty() {
        *target = values.to_vec();
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_table(cfg: &ExperimentConfig, table: &TrialTable) -> Result<bool> {
    let mut out = output(cfg.out.as_deref())?;
    table.write(cfg.format, &mut out)?;
    out.flush()?;
    Ok(!table.any_failed())
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RankedNode {
    id: usize,
    word: String,
    log_ratio: f64,
}

#[derive(Serialize)]
struct RankOutput {
    nodes: usize,
    k: usize,
    method: RankMethod,
    selected: Vec<RankedNode>,
    log_phi: f64,
}

#[derive(Serialize)]
struct FitOutput {
    #[serde(flatten)]
    fit: rootfind_harness::experiments::ScalingFit,
    pass: bool,
}

fn read_tree(input: &Path) -> Result<PlaneTree> {
    let tree = if input == Path::new("-") {
        PlaneTree::read_from(io::stdin().lock())?
    } else {
        PlaneTree::read_from(BufReader::new(File::open(input)?))?
    };
    Ok(tree)
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate { model, n } => {
            let cfg = base_config(g, "simulate")?;
            let model = model.resolve()?.unwrap_or(cfg.model);
            let tree = model.grow(*n, &mut rng_from_seed(cfg.seed))?;
            let mut out = output(cfg.out.as_deref())?;
            tree.write_to(&mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Rank { input, k, method } => {
            let tree = read_tree(input)?;
            let method = RankMethod::from(*method);
            let chosen = select_roots(&tree, *k, method)?;
            let log_ratio = log_phi_profile(&tree);
            let (_, log_phi) = central_path_and_phi(&tree);
            let selected = chosen
                .into_iter()
                .map(|id| RankedNode { id, word: tree.word(id).to_string(), log_ratio: log_ratio[id] })
                .collect();
            emit_json(g.out.as_deref(), &RankOutput { nodes: tree.len(), k: *k, method, selected, log_phi })?;
            Ok(true)
        }
        Command::ErrorCurve { model, n, k, method } => {
            let mut cfg = base_config(g, "error-curve")?;
            cfg.model = model.resolve()?.unwrap_or(cfg.model);
            override_vec(&mut cfg.n, n);
            override_vec(&mut cfg.k, k);
            if let Some(m) = method {
                cfg.method = (*m).into();
            }
            let pool = WorkerPool::new(cfg.workers)?;
            emit_table(&cfg, &run_error_curve(&cfg, &pool)?)
        }
        Command::PhiTail { model, n, x } => {
            let mut cfg = base_config(g, "phi-tail")?;
            cfg.model = model.resolve()?.unwrap_or(cfg.model);
            override_vec(&mut cfg.n, n);
            override_vec(&mut cfg.x, x);
            let pool = WorkerPool::new(cfg.workers)?;
            emit_table(&cfg, &run_phi_tail(&cfg, &pool)?)
        }
        Command::WeightTail { model, n, m, epsilon } => {
            let mut cfg = base_config(g, "weight-tail")?;
            cfg.model = model.resolve()?.unwrap_or(cfg.model);
            override_vec(&mut cfg.n, n);
            override_vec(&mut cfg.m, m);
            if let Some(e) = epsilon {
                cfg.epsilon = *e;
            }
            let pool = WorkerPool::new(cfg.workers)?;
            emit_table(&cfg, &run_weight_tail(&cfg, &pool)?)
        }
        Command::NxTail { model, x, y, constant, calibrate } => {
            let mut cfg = base_config(g, "nx-tail")?;
            cfg.model = model.resolve()?.unwrap_or(cfg.model);
            override_vec(&mut cfg.x, x);
            override_vec(&mut cfg.y, y);
            if constant.is_some() {
                cfg.nx_constant = *constant;
            }
            cfg.validate()?;
            let pool = WorkerPool::new(cfg.workers)?;
            if *calibrate {
                let seed = g.seed.unwrap_or(CALIBRATION_SEED);
                let models = [Model::Ua, Model::UaRegular { d: 3 }];
                let c = calibrate_nx_constant(&models, &cfg.x, &cfg.y, cfg.trials, seed, cfg.budget, &pool)?;
                let mut table = TrialTable::new();
                table.push(TrialRow::new("nx-tail", "nx_constant_calibrated", c).trials(cfg.trials).seed(seed));
                return emit_table(&cfg, &table);
            }
            emit_table(&cfg, &run_nx_tail(&cfg, &pool)?)
        }
        Command::FlowCount { alpha, d, x } => {
            let cfg = base_config(g, "flow-count")?;
            let alpha = match (alpha, d) {
                (Some(a), _) => *a,
                (None, Some(d)) => GammaFlow::for_arity(*d)?.alpha(),
                (None, None) => return Err(usage("flow-count needs --alpha or --d")),
            };
            let cert = certified_nx_bound_with(alpha, *x, cfg.budget)?;
            emit_json(cfg.out.as_deref(), &cert)?;
            Ok(cert.pass)
        }
        Command::DistCheck => {
            let mut cfg = base_config(g, "dist-check")?;
            if g.format.is_none() {
                cfg.format = Format::Json;
            }
            let pool = WorkerPool::new(cfg.workers)?;
            emit_table(&cfg, &run_dist_suite(&cfg, &pool)?)
        }
        Command::FitScaling { input } => {
            let table = TrialTable::read_path(input)?;
            let fit = fit_scaling(&table)?;
            let pass = fit.slope > 0.0 && fit.r_squared >= 0.8 && fit.subpolynomial;
            emit_json(g.out.as_deref(), &FitOutput { fit, pass })?;
            Ok(pass)
        }
    }
}
