use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpf_core::{CloudFormat, DefenseMode, FilterSpec};

mod batch;
mod commands;

use batch::{Failure, Status};

/// Spherical-harmonic low-pass filtering for 3D point clouds.
#[derive(Parser, Debug)]
#[command(name = "lpf", version, about)]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, env = "LPF_SEED", default_value_t = 0)]
    seed: u64,

    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "LPF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Low-pass filter one cloud or every cloud under a directory.
    Filter(FilterCmd),
    /// Build an LPF1 or LPF2 defense dataset.
    Dataset(DatasetCmd),
    /// Dis_Coef statistics between an original and a perturbed tree.
    Analyze(AnalyzeCmd),
    /// Apply SOR, SRS and/or a low-pass filter, in that order.
    Preprocess(PreprocessCmd),
    /// Apply a seeded synthetic perturbation.
    Perturb(PerturbCmd),
    /// Summarize a cloud file or a dataset tree.
    Info(InfoCmd),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(multiple = false)]
struct FilterArgs {
    /// Gaussian degree weights with this S.
    #[arg(long)]
    gaussian_s: Option<f64>,

    /// Keep degrees up to this cutoff, drop the rest.
    #[arg(long)]
    box_cutoff: Option<usize>,
}

impl FilterArgs {
    fn spec(&self) -> Result<Option<FilterSpec>, Failure> {
        match (self.gaussian_s, self.box_cutoff) {
            (Some(s), _) => Ok(Some(FilterSpec::gaussian(s)?)),
            (None, Some(c)) => Ok(Some(FilterSpec::boxcar(c))),
            (None, None) => Ok(None),
        }
    }

    fn required(&self) -> Result<FilterSpec, Failure> {
        self.spec()?
            .ok_or_else(|| Failure::usage("one of --gaussian-s or --box-cutoff is required"))
    }
}

#[derive(Args, Debug)]
struct InOut {
    /// Input cloud file or directory.
    #[arg(long = "in")]
    input: PathBuf,

    /// Output cloud file or directory.
    #[arg(long = "out")]
    output: PathBuf,

    /// Output format (default: from the output extension, or pclb for directories).
    #[arg(long)]
    format: Option<CloudFormat>,
}

#[derive(Args, Debug)]
struct FilterCmd {
    #[command(flatten)]
    io: InOut,

    #[command(flatten)]
    filter: FilterArgs,

    /// Harmonic bandlimit.
    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_BANDLIMIT)]
    lmax: usize,

    /// Points per output cloud.
    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_TARGET_POINTS)]
    n: usize,
}

#[derive(Args, Debug)]
struct DatasetCmd {
    /// Dataset root, one subdirectory per class.
    #[arg(long = "in")]
    input: PathBuf,

    #[arg(long = "out")]
    output: PathBuf,

    #[arg(long, default_value = "lpf1")]
    mode: DefenseMode,

    #[command(flatten)]
    filter: FilterArgs,

    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_BANDLIMIT)]
    lmax: usize,

    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_TARGET_POINTS)]
    n: usize,

    #[arg(long, default_value = "pclb")]
    format: CloudFormat,
}

#[derive(Args, Debug)]
struct AnalyzeCmd {
    /// Tree of original clouds.
    #[arg(long)]
    org: PathBuf,

    /// Tree of perturbed clouds with the same relative paths.
    #[arg(long)]
    adv: PathBuf,

    /// Directory for dis_coef.csv, marginal.csv and manifest.json.
    #[arg(long = "out")]
    output: PathBuf,

    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_BANDLIMIT)]
    lmax: usize,

    /// Denominator guard, relative to each original's coefficient RMS.
    #[arg(long, default_value_t = lpf_core::analysis::DEFAULT_EPS_REL)]
    eps_rel: f64,
}

#[derive(Args, Debug)]
struct PreprocessCmd {
    #[command(flatten)]
    io: InOut,

    /// Run statistical outlier removal (implied by --sor-k / --sor-alpha).
    #[arg(long)]
    sor: bool,

    #[arg(long)]
    sor_k: Option<usize>,

    #[arg(long)]
    sor_alpha: Option<f64>,

    /// Drop this many random points.
    #[arg(long)]
    srs_drop: Option<usize>,

    #[command(flatten)]
    filter: FilterArgs,

    #[arg(long, default_value_t = lpf_core::pipeline::DEFAULT_BANDLIMIT)]
    lmax: usize,

    /// Points after filtering (default: as many as enter the filter).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PerturbKindArg {
    ShiftGaussian,
    AddOutliers,
    DropRandom,
}

#[derive(Args, Debug)]
struct PerturbCmd {
    #[command(flatten)]
    io: InOut,

    #[arg(long, value_enum)]
    kind: PerturbKindArg,

    /// Displacement std-dev (shift-gaussian).
    #[arg(long)]
    sigma: Option<f64>,

    /// Points to add or drop.
    #[arg(long)]
    count: Option<usize>,

    /// Outlier radius range (add-outliers).
    #[arg(long)]
    r_min: Option<f64>,

    #[arg(long)]
    r_max: Option<f64>,
}

#[derive(Args, Debug)]
struct InfoCmd {
    /// Cloud file or dataset directory.
    #[arg(long = "in")]
    input: PathBuf,

    /// Also print the power spectrum up to this degree (files only).
    #[arg(long)]
    lmax: Option<usize>,
}

fn run(cli: Cli) -> Result<Status, Failure> {
    let threads = match cli.threads {
        Some(0) => return Err(Failure::usage("--threads must be at least 1")),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(e.into()))?;
    let seed = cli.seed;
    pool.install(|| match cli.command {
        Command::Filter(c) => commands::filter(c, seed),
        Command::Dataset(c) => commands::dataset(c, seed),
        Command::Analyze(c) => commands::analyze(c),
        Command::Preprocess(c) => commands::preprocess(c, seed),
        Command::Perturb(c) => commands::perturb(c, seed),
        Command::Info(c) => commands::info(c),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(batch::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(batch::EXIT_PARTIAL),
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
