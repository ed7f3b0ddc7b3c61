//! Command-line front end: dataset synthesis, feature extraction, bootstrap
//! evaluation, the tracking walkthrough, and self-verification.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or configuration error,
//! 3 verification failure.

mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use geotop::dataset::{read_dataset, write_synth_dataset};
use geotop::error::{Error, Result};
use geotop::eval::{
    bootstrap_evaluate, extract_feature_matrices, misclassification_report, BootstrapConfig,
    EvalReport, MethodTag,
};
use geotop::export;
use geotop::synth::gaussian_square_field;
use geotop::tracking::{component_report, track_components};
use geotop::verify::run_verification;
use geotop::{AmplitudeConfig, LkcConfig};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "geotop",
    version,
    about = "Topological and geometric image features with a built-in classifier"
)]
struct Cli {
    /// TOML file supplying defaults for the flags (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Tda,
    Lkc,
    Geotop,
    All,
}

impl MethodArg {
    fn tags(self) -> Vec<MethodTag> {
        match self {
            MethodArg::Tda => vec![MethodTag::Tda],
            MethodArg::Lkc => vec![MethodTag::Lkc],
            MethodArg::Geotop => vec![MethodTag::GeoTop],
            MethodArg::All => MethodTag::ALL.to_vec(),
        }
    }

    fn parse_name(name: &str) -> Result<Self> {
        match name {
            "tda" => Ok(MethodArg::Tda),
            "lkc" => Ok(MethodArg::Lkc),
            "geotop" => Ok(MethodArg::Geotop),
            "all" => Ok(MethodArg::All),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected tda, lkc, geotop, or all)"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic two-class blob dataset as 8-bit PGM files.
    Synth {
        /// Output directory; class_0/ and class_1/ are created inside.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of images (labels alternate).
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Extract feature tables from a two-class image directory.
    Extract {
        /// Dataset root holding exactly two class directories.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Feature family to extract.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Output directory for <method>.csv tables.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Curve grid resolution.
        #[arg(long)]
        thresholds: Option<usize>,
    },
    /// Extract features and run the bootstrap evaluation.
    Evaluate {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Bootstrap rounds.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trees per forest.
        #[arg(long)]
        trees: Option<usize>,
        /// Curve grid resolution.
        #[arg(long)]
        thresholds: Option<usize>,
        /// Output directory for report.json, round_scores.csv, and
        /// misclassification.json; omit to print the summary only.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Track components of the Gaussian-plus-square example field.
    Toy {
        /// Curve grid resolution.
        #[arg(long)]
        thresholds: Option<usize>,
        /// Output directory for tracks.csv and track_bars.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the sweeps against reference implementations.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let defaults = match &cli.config {
        Some(path) => config::load(path)?,
        None => RunConfig::default(),
    };

    match cli.command {
        Command::Synth { out, count, seed } => {
            let out = require_path(out, defaults.out.clone(), "--out")?;
            let count = count.or(defaults.count).unwrap_or(200);
            let seed = seed.or(defaults.seed).unwrap_or(0);
            write_synth_dataset(&out, count, seed)?;
            println!("wrote {count} images under {}", out.display());
            Ok(0)
        }
        Command::Extract {
            dataset,
            method,
            out,
            thresholds,
        } => {
            let dataset = require_path(dataset, defaults.dataset.clone(), "--dataset")?;
            let out = require_path(out, defaults.out.clone(), "--out")?;
            let method = resolve_method(method, &defaults)?;
            let lkc_config = lkc_config_from(thresholds.or(defaults.thresholds))?;
            let matrices = load_and_extract(&dataset, &lkc_config)?;
            for tag in method.tags() {
                let matrix = matrices
                    .iter()
                    .find(|m| m.method == tag)
                    .expect("all three methods extracted");
                let path = out.join(format!("{}.csv", tag.name()));
                export::write_text(&path, &export::feature_csv(matrix)?)?;
                println!(
                    "wrote {} ({} rows x {} features)",
                    path.display(),
                    matrix.rows.len(),
                    tag.schema_len()
                );
            }
            Ok(0)
        }
        Command::Evaluate {
            dataset,
            method,
            rounds,
            seed,
            trees,
            thresholds,
            out,
        } => {
            let dataset = require_path(dataset, defaults.dataset.clone(), "--dataset")?;
            let method = resolve_method(method, &defaults)?;
            let lkc_config = lkc_config_from(thresholds.or(defaults.thresholds))?;
            let bootstrap = BootstrapConfig {
                n_rounds: rounds.or(defaults.rounds).unwrap_or(500),
                seed: seed.or(defaults.seed).unwrap_or(0),
                n_trees: trees.or(defaults.trees).unwrap_or(100),
                ..BootstrapConfig::default()
            };

            let started = Instant::now();
            let matrices = load_and_extract(&dataset, &lkc_config)?;
            let selected: Vec<_> = method
                .tags()
                .into_iter()
                .map(|tag| {
                    matrices
                        .iter()
                        .find(|m| m.method == tag)
                        .expect("all three methods extracted")
                        .clone()
                })
                .collect();
            let report = bootstrap_evaluate(&selected, &bootstrap)?;
            print_report(&report, started.elapsed().as_secs_f64());

            if let Some(out) = out.or(defaults.out) {
                export::write_text(out.join("report.json"), &export::to_json_pretty(&report)?)?;
                export::write_text(
                    out.join("round_scores.csv"),
                    &export::round_scores_csv(&report)?,
                )?;
                let mis = misclassification_report(&report);
                export::write_text(
                    out.join("misclassification.json"),
                    &export::to_json_pretty(&mis)?,
                )?;
                println!(
                    "wrote report.json, round_scores.csv, misclassification.json under {}",
                    out.display()
                );
            }
            Ok(0)
        }
        Command::Toy { thresholds, out } => {
            let n_thresholds = thresholds.or(defaults.thresholds).unwrap_or(200);
            let field = gaussian_square_field::<f64>(200, 10, 0, 0.0)?;
            let tracking = track_components(&field, n_thresholds)?;
            println!("tracks: {}", tracking.tracks.len());
            for row in component_report(&tracking) {
                println!(
                    "track {}: birth {:.6} death {:.6} persistence {:.6} max_area {} max_perimeter {}{}",
                    row.id,
                    row.birth,
                    row.death,
                    row.persistence,
                    row.max_area,
                    row.max_perimeter,
                    if row.essential { " (essential)" } else { "" }
                );
            }
            if let Some(out) = out.or(defaults.out) {
                export::write_text(out.join("tracks.csv"), &export::tracks_csv(&tracking)?)?;
                export::write_text(
                    out.join("track_bars.csv"),
                    &export::track_bars_csv(&tracking)?,
                )?;
                println!(
                    "wrote tracks.csv and track_bars.csv under {}",
                    out.display()
                );
            }
            Ok(0)
        }
        Command::Verify { seed } => {
            let seed = seed.or(defaults.seed).unwrap_or(0);
            let summary = run_verification(seed)?;
            for group in &summary.groups {
                println!(
                    "{}: {} comparisons, {} failures",
                    group.name, group.comparisons, group.failed
                );
                for example in &group.examples {
                    println!("  {example}");
                }
            }
            println!(
                "total: {} comparisons, {} failures",
                summary.comparisons(),
                summary.failures()
            );
            if summary.passed() {
                println!("verification passed");
                Ok(0)
            } else {
                println!("verification FAILED");
                Ok(3)
            }
        }
    }
}

fn require_path(flag: Option<PathBuf>, fallback: Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or(fallback)
        .ok_or_else(|| Error::Config(format!("{name} is required (flag or config file)")))
}

fn resolve_method(flag: Option<MethodArg>, defaults: &RunConfig) -> Result<MethodArg> {
    match flag {
        Some(m) => Ok(m),
        None => match &defaults.method {
            Some(name) => MethodArg::parse_name(name),
            None => Ok(MethodArg::All),
        },
    }
}

fn lkc_config_from(thresholds: Option<usize>) -> Result<LkcConfig> {
    let mut config = LkcConfig::default();
    if let Some(n) = thresholds {
        config.n_thresholds = n;
    }
    config.validate()?;
    Ok(config)
}

fn load_and_extract(dataset: &Path, lkc_config: &LkcConfig) -> Result<[geotop::Features; 3]> {
    let (data, skipped) = read_dataset::<f64>(dataset)?;
    for skip in &skipped {
        eprintln!("skipping {}: {}", skip.path.display(), skip.reason);
    }
    println!(
        "loaded {} images ({} / {})",
        data.images.len(),
        data.class_names[0],
        data.class_names[1]
    );
    extract_feature_matrices(&data.images, &AmplitudeConfig::default(), lkc_config)
}

fn print_report(report: &EvalReport, elapsed: f64) {
    println!(
        "{} images, {} rounds, train {} / test {}, {} trees, seed {}",
        report.n_images,
        report.n_rounds,
        report.train_size,
        report.test_size,
        report.n_trees,
        report.seed
    );
    for m in &report.methods {
        println!(
            "{}: accuracy {:.4} +/- {:.4}, f1 {:.4} +/- {:.4}, precision {:.4} +/- {:.4}",
            m.method,
            m.mean_score,
            m.std_score,
            m.mean_f1,
            m.std_f1,
            m.mean_precision,
            m.std_precision
        );
    }
    for pair in &report.ari {
        println!(
            "ari {} vs {}: {:.4} +/- {:.4}",
            pair.method_a, pair.method_b, pair.mean, pair.std
        );
    }
    println!("elapsed: {elapsed:.1}s");
}
