//! `ldp`: dataset statistics, featurization and cross-validated evaluation
//! of local-degree-profile graph classifiers.

mod experiment;
mod settings;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ldp::eval::{report_table, EvalError, Variant};
use ldp::features::FeatureError;
use ldp::svm::SvmError;
use ldp::tu::load_dataset;

use experiment::{
    available_benchmarks, config_slug, evaluate, features_csv, stats_table, write_evaluation, write_file,
    ExperimentSpec, DEFAULT_DATA_DIR,
};
use settings::Settings;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Data(m) | Self::Numeric(m) => m,
        }
    }

    pub fn io(path: &Path, e: io::Error) -> Self {
        Self::Data(format!("{}: {e}", path.display()))
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        let m = e.to_string();
        match e {
            FeatureError::TooFewBins(_) | FeatureError::Config(_) => Self::Usage(m),
            FeatureError::ValueOutOfRange(_) => Self::Numeric(m),
            FeatureError::MissingNodeLabels(_) | FeatureError::Graph(_) => Self::Data(m),
        }
    }
}

impl From<SvmError> for CliError {
    fn from(e: SvmError) -> Self {
        match e {
            SvmError::InvalidParameter(_) => Self::Usage(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let m = e.to_string();
        match e {
            EvalError::EmptyGrid | EvalError::InvalidConfig(_) => Self::Usage(m),
            EvalError::TooFewExamples { .. } | EvalError::DegenerateFold(_) | EvalError::LengthMismatch { .. } => {
                Self::Data(m)
            }
            EvalError::Feature(f) => f.into(),
            EvalError::Svm(s) => s.into(),
        }
    }
}

impl From<ldp::tu::ParseError> for CliError {
    fn from(e: ldp::tu::ParseError) -> Self {
        Self::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "ldp", version, about = "Local degree profile graph classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph/class/node/edge/label statistics of datasets.
    Stats(StatsArgs),
    /// Write per-graph feature vectors as CSV.
    Featurize(Settings),
    /// Repeated nested cross-validation of one variant.
    Evaluate(Settings),
    /// Evaluate every applicable variant and print the comparison table.
    Grid(Settings),
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset names; repeat the flag for several. Defaults to every
    /// known benchmark found under the data directory.
    #[arg(long)]
    dataset: Vec<String>,
    #[arg(long, env = "LDP_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn print(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn stats(args: StatsArgs) -> Result<(), CliError> {
    let data_dir = args.data_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));
    let names = if args.dataset.is_empty() {
        let found = available_benchmarks(&data_dir);
        if found.is_empty() {
            return Err(CliError::Data(format!("no known datasets under {}", data_dir.display())));
        }
        found
    } else {
        args.dataset
    };
    let datasets = names
        .iter()
        .map(|n| load_dataset(&data_dir, n))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<(String, &ldp::Dataset)> = names.into_iter().zip(&datasets).collect();
    let (text, csv) = stats_table(&rows);
    if let Some(out) = args.out {
        write_file(&out.join("stats.csv"), &csv)?;
    }
    print(&text);
    Ok(())
}

fn featurize(settings: Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = ExperimentSpec::from_settings(&settings, false)?;
    let dataset = spec.load()?;
    let labels = dataset.class_labels();
    if spec.out.is_none() && spec.feature_grid.len() > 1 {
        return Err(CliError::Usage("several configurations need --out".into()));
    }
    let mut featurization = std::time::Duration::ZERO;
    for config in &spec.feature_grid {
        let t = Instant::now();
        let vectors = ldp::features::featurize_dataset(&dataset, config)?;
        featurization += t.elapsed();
        let csv = features_csv(&vectors, &labels);
        match &spec.out {
            Some(dir) => write_file(&dir.join(format!("features_{}.csv", config_slug(config))), &csv)?,
            None => print(&csv),
        }
    }
    eprintln!("featurization time: {:.3} s", featurization.as_secs_f64());
    eprintln!("total wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn evaluate_cmd(settings: Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = ExperimentSpec::from_settings(&settings, true)?;
    let dataset = spec.load()?;
    let eval = evaluate(&spec, &dataset)?;
    let table = write_evaluation(&spec.out_dir(), &spec, &eval)?;
    print(&format!("{}\n\n{}", eval.best().summary_line(), table.to_text()));
    eprintln!("featurization time: {:.3} s", eval.featurization.as_secs_f64());
    eprintln!("total wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn grid_cmd(settings: Settings) -> Result<(), CliError> {
    let start = Instant::now();
    if let Some(v) = settings.variant {
        log::warn!("grid evaluates every variant; ignoring --variant {v}");
    }
    let base = ExperimentSpec::from_settings(&settings, true)?;
    let dataset = load_dataset(&base.data_dir, &base.dataset)?;
    let out = base.out_dir();
    let mut entries = Vec::new();
    let mut featurization = std::time::Duration::ZERO;
    for variant in Variant::ALL {
        if variant == Variant::PlusLabel && !dataset.has_node_labels() {
            log::info!("skipping {variant}: {} has no node labels", base.dataset);
            continue;
        }
        let spec = ExperimentSpec::from_settings(
            &Settings {
                variant: Some(variant),
                ..settings.clone()
            },
            true,
        )?;
        let eval = evaluate(&spec, &dataset)?;
        featurization += eval.featurization;
        write_evaluation(&out.join(variant.to_string()), &spec, &eval)?;
        print(&format!("{variant}: {}\n", eval.best().summary_line()));
        entries.push((spec.dataset.clone(), variant, eval.best().mean_accuracy));
    }
    let table = report_table(&entries);
    write_file(&out.join("table.txt"), &table.to_text())?;
    write_file(&out.join("table.csv"), &table.to_csv())?;
    print(&format!("\n{}", table.to_text()));
    eprintln!("featurization time: {:.3} s", featurization.as_secs_f64());
    eprintln!("total wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(args) => stats(args),
        Command::Featurize(s) => featurize(s),
        Command::Evaluate(s) => evaluate_cmd(s),
        Command::Grid(s) => grid_cmd(s),
    }
}

fn resolve(cli: Cli) -> Result<Cli, CliError> {
    let resolve_settings = |s: Settings| -> Result<Settings, CliError> {
        let s = s.resolve()?;
        init_threads(s.threads)?;
        Ok(Settings {
            config: None,
            threads: None,
            ..s
        })
    };
    let command = match cli.command {
        Command::Stats(a) => Command::Stats(a),
        Command::Featurize(s) => Command::Featurize(resolve_settings(s)?),
        Command::Evaluate(s) => Command::Evaluate(resolve_settings(s)?),
        Command::Grid(s) => Command::Grid(resolve_settings(s)?),
    };
    Ok(Cli { command })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match resolve(cli).and_then(run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
