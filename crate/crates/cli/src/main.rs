use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use seed_core::dataset::DEFAULT_BINARY_CAP;
use seed_core::{
    convergence_curve, emit_convergence, emit_report, fit_pairs, load_embedded_dataset, load_model,
    make_binary_fever, run_nshot_experiment, sample_shots, save_embedded_dataset, save_model,
    EmbeddedDataset, ExperimentConfig,
};

/// Few-shot claim veracity classification from embedding differences.
#[derive(Debug, Parser)]
#[command(name = "seed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit class representatives and write a model JSON file.
    Fit(FitArgs),
    /// Classify every pair in a dataset with a saved model.
    Predict(PredictArgs),
    /// Run the n-shot sweep over shot counts and seeds.
    Experiment(ExperimentArgs),
    /// Build the two-class Support / Not_Support dataset.
    Binarize(BinarizeArgs),
    /// Track how far class representatives move with each added shot.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Embedding dataset (seed-embeddings JSON Lines).
    #[arg(long)]
    data: PathBuf,
    /// Output model path.
    #[arg(long)]
    out: PathBuf,
    /// Fit on a sampled subset of this many pairs per class.
    #[arg(long)]
    shots: Option<usize>,
    /// Sampling seed used with --shots.
    #[arg(long, default_value_t = 123, requires = "shots")]
    seed: u64,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Output CSV: id,gold,pred, then one distance column per class.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated shot counts per class.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,4,6,8,10,20,30,40,50,100"
    )]
    shots: Vec<usize>,
    /// Comma-separated sampling seeds.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "123,124,125,126,127,128,129,130,131,132"
    )]
    seeds: Vec<u64>,
    /// Results CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Binarize the dataset with this seed before running.
    #[arg(long)]
    binary_seed: Option<u64>,
    /// Per-class size cap when binarizing.
    #[arg(long, default_value_t = DEFAULT_BINARY_CAP, requires = "binary_seed")]
    binary_cap: usize,
    /// Value of the `dataset` column; defaults to the data file stem.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Args)]
struct BinarizeArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Per-class size cap.
    #[arg(long, default_value_t = DEFAULT_BINARY_CAP)]
    cap: usize,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[arg(long)]
    data: PathBuf,
    /// Largest shot count; distances are reported for n = 2..=max-n.
    #[arg(long, default_value_t = 100)]
    max_n: usize,
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Output CSV: n,class,distance.
    #[arg(long)]
    out: PathBuf,
}

fn load(path: &Path) -> Result<EmbeddedDataset> {
    load_embedded_dataset(path).with_context(|| format!("loading {}", path.display()))
}

fn fit(args: FitArgs) -> Result<()> {
    let data = load(&args.data)?;
    let train = match args.shots {
        Some(n) => sample_shots(&data, n, args.seed)?.0,
        None => data,
    };
    let model = fit_pairs(train.pairs())?;
    save_model(&model, &args.out)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for rep in model.representatives() {
        writeln!(out, "{}\t{}", rep.label(), rep.count())?;
    }
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let data = load(&args.data)?;
    if data.dim() != model.dim() {
        bail!(
            "model dimension {} does not match dataset dimension {}",
            model.dim(),
            data.dim()
        );
    }
    let predictions = model.predict_batch(data.pairs())?;
    let mut w = csv_writer(&args.out)?;
    let mut header = vec!["id", "gold", "pred"];
    header.extend(model.labels());
    w.write_record(&header)?;
    for (pair, p) in data.pairs().iter().zip(&predictions) {
        let mut row = vec![pair.id.clone(), pair.label.clone(), p.label.clone()];
        row.extend(p.distances.values().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut data = load(&args.data)?;
    let setting = match args.binary_seed {
        Some(seed) => {
            data = make_binary_fever(&data, seed, args.binary_cap)?;
            "binary".to_owned()
        }
        None => format!("{}-way", data.labels().len()),
    };
    let name = args.name.unwrap_or_else(|| {
        args.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let config = ExperimentConfig {
        shot_counts: args.shots,
        seeds: args.seeds,
    };
    let results = run_nshot_experiment(&config, &data)?;
    emit_report(&name, &setting, &results, &args.out)?;
    Ok(())
}

fn binarize(args: BinarizeArgs) -> Result<()> {
    let data = load(&args.data)?;
    let binary = make_binary_fever(&data, args.seed, args.cap)?;
    save_embedded_dataset(&binary, &args.out)?;
    Ok(())
}

fn convergence(args: ConvergenceArgs) -> Result<()> {
    let data = load(&args.data)?;
    let curve = convergence_curve(&data, args.max_n, args.seed)?;
    emit_convergence(&curve, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Experiment(a) => experiment(a),
        Command::Binarize(a) => binarize(a),
        Command::Convergence(a) => convergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
