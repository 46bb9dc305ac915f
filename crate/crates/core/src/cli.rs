//! Command-line front end. The `sef` binary is a thin wrapper around
//! [`main_from_args`]; every command is also callable in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::SefError;
use crate::gradcheck::{self, GradCheckReport};
use crate::io::{read_dataset, read_matrix_csv, read_target, write_embedding_csv, write_target, Dataset, ModelFile, TargetMeta};
use crate::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use crate::projections::KernelSpec;
use crate::reference::{accuracy, svm_ovo_fit, NearestCentroid, SvmParams};
use crate::similarity::{pairwise_sq_distances, Bandwidth};
use crate::targets::{self, SameClassRule, TargetPair};
use crate::trainer::{self, FitReport, Initialization, KernelChoice, TrainConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<SefError> for CliError {
    fn from(e: SefError) -> Self {
        let msg = e.to_string();
        match e {
            SefError::InvalidParameter(_) => CliError::Usage(msg),
            SefError::Numerical(_) | SefError::DegenerateKernel { .. } | SefError::DisconnectedGraph { .. } => {
                CliError::Numeric(msg)
            }
            _ => CliError::Data(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sef", version, about = "Learn projections whose pairwise similarities match a target")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a target similarity / mask pair from a dataset.
    MakeTarget(MakeTargetArgs),
    /// Learn a projection for a dataset and target.
    Fit(FitArgs),
    /// Project a dataset with a fitted model and write the embedding as CSV.
    Transform(TransformArgs),
    /// Nearest-centroid accuracy in the learned space.
    Eval(EvalArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    Pca,
    Lda,
    Le,
    LapPca,
    Clone,
    Svm,
}

impl TargetKind {
    fn name(self) -> &'static str {
        match self {
            TargetKind::Pca => "pca",
            TargetKind::Lda => "lda",
            TargetKind::Le => "le",
            TargetKind::LapPca => "lap-pca",
            TargetKind::Clone => "clone",
            TargetKind::Svm => "svm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SameClass {
    Min,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct MakeTargetArgs {
    /// Input dataset (CSV with header).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub kind: TargetKind,
    /// Output target file.
    #[arg(long)]
    pub out: PathBuf,
    /// Neighbour count for `le` and `lap-pca`.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Bandwidth for `le`, `clone` and `svm` targets: a number or `auto`.
    #[arg(long, default_value = "auto")]
    pub sigma: String,
    /// Embedding CSV to imitate (`clone`).
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Mask weight of non-neighbour pairs (`lap-pca`).
    #[arg(long, default_value_t = 1.0)]
    pub non_neighbor_weight: f64,
    #[arg(long, default_value_t = 1.0)]
    pub svm_c: f64,
    #[arg(long, default_value_t = 200)]
    pub svm_epochs: usize,
    /// Distance rule for same-class pairs (`svm`).
    #[arg(long, value_enum, default_value_t = SameClass::Min)]
    pub same_class: SameClass,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Linear,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Rbf,
    Linear,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Pca,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Linear)]
    pub mode: Mode,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Defaults: 500 (linear), 1000 (kernel).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Defaults: 1e-3 (linear), 1e-5 (kernel).
    #[arg(long)]
    pub lr: Option<f64>,
    /// Defaults: 1 (linear), 0.001 (kernel).
    #[arg(long)]
    pub alpha_p: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelKind::Rbf)]
    pub kernel: KernelKind,
    /// RBF width: a number or `auto`.
    #[arg(long, default_value = "auto")]
    pub gamma: String,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 1.0)]
    pub coef: f64,
    #[arg(long, value_enum, default_value_t = InitKind::Pca)]
    pub init: InitKind,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output embedding CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Classifier {
    Ncc,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_enum, default_value_t = Classifier::Ncc)]
    pub classifier: Classifier,
}

#[derive(Debug, Clone, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Fixed sizes `N,d,m` for every instance (random when omitted).
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long, default_value_t = gradcheck::DEFAULT_INSTANCES)]
    pub instances: usize,
    #[arg(long, default_value_t = gradcheck::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

fn parse_bandwidth(s: &str) -> CliResult<Bandwidth> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::auto());
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Bandwidth::Fixed(v)),
        _ => Err(CliError::Usage(format!("expected a positive number or 'auto', got '{s}'"))),
    }
}

fn load_dataset(path: &Path) -> CliResult<Dataset> {
    let ds = read_dataset(path)?;
    if ds.is_empty() {
        return Err(CliError::Usage(format!("{} contains no samples", path.display())));
    }
    Ok(ds)
}

fn require_labels(ds: &Dataset, path: &Path) -> CliResult<(crate::labels::Labels, Vec<String>)> {
    ds.labels()?
        .ok_or_else(|| CliError::Usage(format!("{} has no '{}' column", path.display(), crate::io::LABEL_COLUMN)))
}

/// Builds the requested target and writes it; returns the stored metadata.
pub fn cmd_make_target(args: &MakeTargetArgs) -> CliResult<TargetMeta> {
    let ds = load_dataset(&args.data)?;
    let x = ds.features.view();
    let n = ds.len();
    let mut params = serde_json::Map::new();
    let pair: TargetPair = match args.kind {
        TargetKind::Pca => targets::target_pca(n)?,
        TargetKind::Lda => {
            let (labels, _) = require_labels(&ds, &args.data)?;
            targets::target_lda(&labels)?
        }
        TargetKind::Le => {
            params.insert("k".into(), json!(args.k));
            let sigma = parse_bandwidth(&args.sigma)?.resolve(pairwise_sq_distances(x)?.view())?;
            targets::target_le(x, args.k, sigma)?
        }
        TargetKind::LapPca => {
            params.insert("k".into(), json!(args.k));
            params.insert("non_neighbor_weight".into(), json!(args.non_neighbor_weight));
            targets::target_lap_pca_weighted(x, args.k, args.non_neighbor_weight)?
        }
        TargetKind::Clone => {
            let path = args
                .embedding
                .as_ref()
                .ok_or_else(|| CliError::Usage("--kind clone needs --embedding".into()))?;
            let g = read_matrix_csv(path)?;
            if g.nrows() != n {
                return Err(CliError::Data(format!(
                    "embedding has {} rows but the dataset has {n}",
                    g.nrows()
                )));
            }
            params.insert("embedding".into(), json!(path.display().to_string()));
            params.insert("embedding_dims".into(), json!(g.ncols()));
            targets::target_clone(g.view(), &parse_bandwidth(&args.sigma)?)?
        }
        TargetKind::Svm => {
            let (labels, _) = require_labels(&ds, &args.data)?;
            let svm = SvmParams { c: args.svm_c, epochs: args.svm_epochs, seed: args.seed };
            let stats = preprocess_fit(x, ScalingMode::ZNormalize)?;
            let xs = preprocess_apply(x, &stats)?;
            let models = svm_ovo_fit(xs.view(), &labels, &svm)?;
            let table = models.decision_table(xs.view())?;
            let rule = match args.same_class {
                SameClass::Min => SameClassRule::MinOverModels,
                SameClass::Zero => SameClassRule::Zero,
            };
            params.insert("svm_c".into(), json!(args.svm_c));
            params.insert("svm_epochs".into(), json!(args.svm_epochs));
            params.insert("same_class".into(), json!(rule));
            params.insert("seed".into(), json!(args.seed));
            targets::target_svm_with_rule(&table, &labels, &parse_bandwidth(&args.sigma)?, rule)?
        }
    };
    let meta = TargetMeta { kind: args.kind.name().to_string(), n, sigma: pair.sigma, params };
    write_target(&args.out, &meta, &pair)?;
    Ok(meta)
}

/// Builds a training configuration from the command-line flags.
pub fn train_config(args: &FitArgs) -> CliResult<TrainConfig> {
    let mut cfg = match args.mode {
        Mode::Linear => TrainConfig::linear(args.dims),
        Mode::Kernel => {
            let kernel = match args.kernel {
                KernelKind::Rbf => match parse_bandwidth(&args.gamma)? {
                    Bandwidth::Fixed(gamma) => KernelChoice::Fixed { spec: KernelSpec::Rbf { gamma } },
                    Bandwidth::Auto(_) => KernelChoice::RbfAuto,
                },
                KernelKind::Linear => KernelChoice::Fixed { spec: KernelSpec::Linear },
                KernelKind::Poly => KernelChoice::Fixed {
                    spec: KernelSpec::Polynomial { degree: args.degree, coef: args.coef },
                },
            };
            TrainConfig::kernel(args.dims, kernel)
        }
    };
    if let Some(v) = args.iters {
        cfg.n_iters = v;
    }
    if let Some(v) = args.lr {
        cfg.lr = v;
    }
    if let Some(v) = args.alpha_p {
        cfg.alpha_p = v;
    }
    cfg.seed = args.seed;
    cfg.init = match args.init {
        InitKind::Pca => Initialization::Pca,
        InitKind::Random => Initialization::Random,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub struct FitOutcome {
    pub report: FitReport,
    pub seconds: f64,
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<FitOutcome> {
    let cfg = train_config(args)?;
    let ds = load_dataset(&args.data)?;
    let (_, pair) = read_target(&args.target)?;
    if pair.len() != ds.len() {
        return Err(CliError::Data(format!(
            "target is {0}x{0} but the dataset has {1} rows",
            pair.len(),
            ds.len()
        )));
    }
    let start = Instant::now();
    let (model, report) = trainer::fit(ds.features.view(), &pair, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    ModelFile::new(model, cfg, report.clone()).save(&args.out)?;
    Ok(FitOutcome { report, seconds })
}

/// Writes the embedding and returns its shape.
pub fn cmd_transform(args: &TransformArgs) -> CliResult<(usize, usize)> {
    let model = ModelFile::load(&args.model)?;
    let ds = load_dataset(&args.data)?;
    let y = trainer::transform(&model.model, ds.features.view())?;
    write_embedding_csv(&args.out, y.view(), ds.label_names.as_deref())?;
    Ok(y.dim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub test_samples: usize,
    /// Mean projection + classification time per test sample.
    pub seconds_per_sample: f64,
}

pub fn cmd_eval(args: &EvalArgs) -> CliResult<EvalReport> {
    let model = ModelFile::load(&args.model)?;
    let train = load_dataset(&args.train)?;
    let test = load_dataset(&args.test)?;
    let (train_labels, classes) = require_labels(&train, &args.train)?;
    let test_ids = test
        .labels_against(&classes)
        .ok_or_else(|| CliError::Usage(format!("{} has no 'label' column", args.test.display())))?;
    let y_train = trainer::transform(&model.model, train.features.view())?;
    let ncc = NearestCentroid::fit(y_train.view(), &train_labels)?;
    let start = Instant::now();
    let y_test = trainer::transform(&model.model, test.features.view())?;
    let predicted = ncc.predict_all(y_test.view())?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok(EvalReport {
        accuracy: accuracy(&predicted, &test_ids),
        test_samples: test.len(),
        seconds_per_sample: elapsed / test.len() as f64,
    })
}

fn parse_sizes(s: &str) -> CliResult<gradcheck::Shape> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--sizes expects N,d,m, got '{s}'")))?;
    match parts.as_slice() {
        &[n, d, m] if n >= 2 && d >= 1 && m >= 1 => Ok((n, d, m)),
        _ => Err(CliError::Usage(format!("--sizes expects N,d,m with N >= 2, got '{s}'"))),
    }
}

pub fn cmd_gradcheck(args: &GradcheckArgs) -> CliResult<GradCheckReport> {
    let shape = args.sizes.as_deref().map(parse_sizes).transpose()?;
    if args.instances == 0 {
        return Err(CliError::Usage("--instances must be at least 1".into()));
    }
    Ok(gradcheck::run(args.seed, shape, args.instances, args.tolerance)?)
}

/// Runs one parsed command, printing its report to `out`.
pub fn run(cli: &Cli, out: &mut impl Write) -> CliResult<()> {
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| CliError::Data(e.to_string()));
    match &cli.command {
        Command::MakeTarget(args) => {
            let meta = cmd_make_target(args)?;
            w(out, format!("kind: {}", meta.kind))?;
            w(out, format!("samples: {}", meta.n))?;
            if let Some(s) = meta.sigma {
                w(out, format!("sigma: {s:e}"))?;
            }
            w(out, format!("wrote {}", args.out.display()))?;
        }
        Command::Fit(args) => {
            let FitOutcome { report, seconds } = cmd_fit(args)?;
            w(out, format!("initial loss: {:.6e}", report.initial_loss))?;
            w(out, format!("final loss:   {:.6e}", report.final_loss))?;
            w(out, format!("sigma_p:      {:e}", report.sigma_p))?;
            w(out, format!("wall time:    {seconds:.3} s"))?;
            if report.diverged {
                w(out, "warning: final loss is higher than the initial loss".to_string())?;
            }
            w(out, format!("wrote {}", args.out.display()))?;
        }
        Command::Transform(args) => {
            let (n, m) = cmd_transform(args)?;
            w(out, format!("wrote {n}x{m} embedding to {}", args.out.display()))?;
        }
        Command::Eval(args) => {
            let r = cmd_eval(args)?;
            w(out, format!("classifier: ncc"))?;
            w(out, format!("test samples: {}", r.test_samples))?;
            w(out, format!("accuracy: {:.4}", r.accuracy))?;
            w(out, format!("mean time per sample: {:.3e} s", r.seconds_per_sample))?;
        }
        Command::Gradcheck(args) => {
            let report = cmd_gradcheck(args)?;
            let mut shapes = report.shapes.clone();
            shapes.sort_unstable();
            shapes.dedup();
            let listed: Vec<String> = shapes.iter().map(|(n, d, m)| format!("{n}x{d}x{m}")).collect();
            w(out, format!("seed: {}", report.seed))?;
            w(out, format!("instances: {}", report.shapes.len()))?;
            w(out, format!("shapes (N x d x m): {}", listed.join(", ")))?;
            for g in &report.gradients {
                let status = if g.passed { "PASS" } else { "FAIL" };
                w(out, format!("{status} {:<24} max rel error {:.3e}", g.name, g.max_relative_error))?;
            }
            if !report.passed() {
                return Err(CliError::Numeric(format!(
                    "gradient check failed at tolerance {:e}",
                    report.tolerance
                )));
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
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
    let mut report = Vec::new();
    let result = run(&cli, &mut report);
    print!("{}", String::from_utf8_lossy(&report));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
