//! Command-line front end: compress clips, extract features, train and
//! evaluate the classifier, and run the 90-setting sweep.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use drcsweep::audio::{default_genres, generate_dataset, read_wav, write_wav};
use drcsweep::compressor::{compress, CompressorSettings};
use drcsweep::experiment::{build_grid, load_dataset, rank_report, run_sweep, SweepConfig};
use drcsweep::features::{extract_feature_vector, FeatureConfig, FeatureVector, FEATURE_DIM};
use drcsweep::svm::{predict_ovo, train_ovo, Gamma, SvmConfig, TrainedOvoModel};

#[derive(Parser)]
#[command(
    name = "drcsweep",
    version,
    about = "Dynamic range compression sweeps for music genre classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a WAV file with explicit settings.
    Compress(CompressArgs),
    /// Extract the 21-dimensional feature vector of a clip into a CSV row.
    Features(FeaturesArgs),
    /// Generate the synthetic desk-scale dataset as <out>/<genre>/<clip>.wav.
    Synth(SynthArgs),
    /// Train the one-vs-one SVM from a directory of feature CSVs.
    Train(TrainArgs),
    /// Evaluate a trained model on a directory of feature CSVs.
    Evaluate(EvaluateArgs),
    /// Run the 90-setting compression sweep and rank the results.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    /// Threshold, dBFS.
    #[arg(long, allow_hyphen_values = true)]
    threshold: f64,
    /// Compression ratio (>= 1).
    #[arg(long)]
    ratio: f64,
    /// Knee width, dB.
    #[arg(long, default_value_t = 0.0)]
    knee: f64,
    /// Attack time, seconds.
    #[arg(long, default_value_t = 0.0)]
    attack: f64,
    /// Release time, seconds.
    #[arg(long, default_value_t = 0.0)]
    release: f64,
    /// Makeup gain, dB.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    makeup: f64,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long = "out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    clips_per_genre: usize,
    /// Clip duration, seconds.
    #[arg(long, default_value_t = 3.0)]
    duration: f64,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    /// Directory of per-genre feature CSVs: <dir>/<genre>/<clip>.csv.
    #[arg(long)]
    features: PathBuf,
    /// Output model file.
    #[arg(long)]
    model: PathBuf,
    /// Kernel width: "auto" or a positive number.
    #[arg(long, default_value = "auto")]
    gamma: String,
    /// Soft-margin box bound.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Directory of per-genre feature CSVs: <dir>/<genre>/<clip>.csv.
    #[arg(long)]
    features: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Dataset root: <root>/<genre>/<clip>.wav. Omit with --synthetic.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Generate the desk-scale synthetic dataset in a temp directory.
    #[arg(long, default_value_t = false)]
    synthetic: bool,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// CSV report destination.
    #[arg(long = "out")]
    out: PathBuf,
    /// Optional JSON report with per-iteration detail.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Rows to print in the ranked table.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    #[arg(long, default_value = "auto")]
    gamma: String,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
}

fn parse_gamma(text: &str) -> Result<Gamma> {
    if text == "auto" {
        return Ok(Gamma::Auto);
    }
    let value: f64 = text
        .parse()
        .with_context(|| format!("--gamma must be 'auto' or a number, got {text:?}"))?;
    Ok(Gamma::Fixed(value))
}

/// Reads a `<dir>/<genre>/<clip>.csv` tree of single-row feature files.
fn read_feature_dir(dir: &Path) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let mut genres: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {dir:?}"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    genres.sort();
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for genre_dir in genres {
        let label = genre_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = fs::read_dir(&genre_dir)
            .with_context(|| format!("reading {genre_dir:?}"))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .map(|ext| ext.eq_ignore_ascii_case("csv"))
                        .unwrap_or(false)
            })
            .collect();
        files.sort();
        for file in files {
            samples.push(read_feature_csv(&file)?);
            labels.push(label.clone());
        }
    }
    if samples.is_empty() {
        bail!("no <genre>/<clip>.csv files under {dir:?}");
    }
    Ok((samples, labels))
}

fn read_feature_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().with_context(|| format!("{path:?} is empty"))?;
    if header != FeatureVector::csv_header() {
        bail!("{path:?} has an unexpected header");
    }
    let row = lines.next().with_context(|| format!("{path:?} has no data row"))?;
    let values: Vec<f64> = row
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("parsing {path:?}"))?;
    if values.len() != FEATURE_DIM {
        bail!("{path:?} row has {} values, expected {FEATURE_DIM}", values.len());
    }
    Ok(values)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Compress(args) => {
            let settings = CompressorSettings::new(
                args.threshold,
                args.ratio,
                args.knee,
                args.attack,
                args.release,
                args.makeup,
            )?;
            let input = read_wav(&args.input)?;
            let output = compress(&input, &settings);
            let outcome = write_wav(&output, &args.output)?;
            println!(
                "compressed {} -> {} ({} samples @ {} Hz)",
                args.input.display(),
                args.output.display(),
                output.len(),
                output.sample_rate()
            );
            if outcome.clipped > 0 {
                eprintln!(
                    "warning: {} samples exceeded full scale and were clipped",
                    outcome.clipped
                );
            }
        }
        Command::Features(args) => {
            let clip = read_wav(&args.input)?;
            let vector = extract_feature_vector(&clip, &FeatureConfig::default())?;
            let csv = format!("{}\n{}\n", FeatureVector::csv_header(), vector.to_csv_row());
            fs::write(&args.output, csv).with_context(|| format!("writing {:?}", args.output))?;
            println!("wrote {}", args.output.display());
        }
        Command::Synth(args) => {
            let written = generate_dataset(
                &args.out_dir,
                &default_genres(),
                args.clips_per_genre,
                args.duration,
                args.sample_rate,
                args.seed,
            )?;
            println!("wrote {} clips under {}", written, args.out_dir.display());
        }
        Command::Train(args) => {
            let (samples, labels) = read_feature_dir(&args.features)?;
            let config = SvmConfig {
                gamma: parse_gamma(&args.gamma)?,
                c: args.c,
            };
            let model = train_ovo(&samples, &labels, &config)?;
            model.save(&args.model)?;
            println!(
                "trained {} pairwise models over {} classes ({} samples, gamma {:.6}, C {}) -> {}",
                model.n_pairwise(),
                model.class_labels().len(),
                samples.len(),
                model.gamma(),
                model.c(),
                args.model.display()
            );
        }
        Command::Evaluate(args) => {
            let model = TrainedOvoModel::load(&args.model)?;
            let (samples, labels) = read_feature_dir(&args.features)?;
            let mut correct = 0usize;
            for (x, label) in samples.iter().zip(&labels) {
                let predicted = predict_ovo(&model, x)?;
                if predicted == label {
                    correct += 1;
                }
                println!("{label}\t{predicted}");
            }
            println!(
                "accuracy: {:.4} ({correct}/{})",
                correct as f64 / samples.len() as f64,
                samples.len()
            );
        }
        Command::Sweep(args) => {
            let synth_dir;
            let data_root = if args.synthetic {
                synth_dir = tempfile::tempdir().context("creating temp dataset dir")?;
                generate_dataset(synth_dir.path(), &default_genres(), 20, 3.0, 16_000, args.seed)?;
                synth_dir.path().to_path_buf()
            } else {
                match args.data {
                    Some(ref root) => root.clone(),
                    None => bail!("pass --data <root> or --synthetic"),
                }
            };
            let clips = load_dataset(&data_root)?;
            let config = SweepConfig {
                iterations: args.iterations,
                seed: args.seed,
                test_fraction: args.test_fraction,
                svm: SvmConfig {
                    gamma: parse_gamma(&args.gamma)?,
                    c: args.c,
                },
                features: FeatureConfig::default(),
            };
            let grid = build_grid();
            let report = run_sweep(&clips, &grid, &config)?;
            fs::write(&args.out, report.to_csv())
                .with_context(|| format!("writing {:?}", args.out))?;
            if let Some(json_path) = &args.json {
                fs::write(json_path, report.to_json()?)
                    .with_context(|| format!("writing {json_path:?}"))?;
            }
            println!(
                "swept {} entries x {} iterations over {} clips (baseline accuracy {:.4})",
                report.entries.len(),
                report.metadata.iterations,
                report.metadata.clips,
                report.baseline.mean_accuracy
            );
            if report.metadata.dropped_clips > 0 || report.metadata.skipped_extractions > 0 {
                eprintln!(
                    "warning: dropped {} clips, skipped {} extractions",
                    report.metadata.dropped_clips, report.metadata.skipped_extractions
                );
            }
            print!("{}", rank_report(&report, args.top_k));
            println!("report written to {}", args.out.display());
        }
    }
    Ok(())
}
