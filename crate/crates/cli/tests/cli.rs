//! End-to-end runs of the installed binary: exit codes, printed summaries,
//! and the files each subcommand leaves behind.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_geotop");

fn geotop(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        stdout(out),
        stderr(out)
    );
}

/// A 12-image synthetic dataset, written once and shared by every test.
fn dataset() -> &'static Path {
    static CELL: OnceLock<(TempDir, PathBuf)> = OnceLock::new();
    let (_, path) = CELL.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let data = dir.path().join("data");
        let out = geotop(&[
            "synth",
            "--out",
            data.to_str().unwrap(),
            "--count",
            "12",
            "--seed",
            "4",
        ]);
        assert_exit(&out, 0);
        assert!(stdout(&out).contains("wrote 12 images"));
        (dir, data)
    });
    path
}

#[test]
fn synth_writes_balanced_pgm_classes() {
    let data = dataset();
    for class in ["class_0", "class_1"] {
        let files: Vec<_> = std::fs::read_dir(data.join(class))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        assert_eq!(files.len(), 6, "{class} holds half the images");
        assert!(files.iter().all(|p| p.extension().unwrap() == "pgm"));
    }
}

#[test]
fn extract_is_deterministic_and_csv_parses() {
    let data = dataset();
    let dir = TempDir::new().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let run = geotop(&[
            "extract",
            "--dataset",
            data.to_str().unwrap(),
            "--method",
            "tda",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_exit(&run, 0);
        assert!(stdout(&run).contains("loaded 12 images (class_0 / class_1)"));
        assert!(stdout(&run).contains("12 rows x 64 features"));
    }
    let a = std::fs::read(out_a.join("tda.csv")).unwrap();
    let b = std::fs::read(out_b.join("tda.csv")).unwrap();
    assert_eq!(a, b, "repeated extraction must be byte-identical");

    let mut reader = csv::Reader::from_reader(a.as_slice());
    assert_eq!(reader.headers().unwrap().len(), 66);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.len() == 66));
    // Every feature cell parses back to a finite float.
    for row in &rows {
        for cell in row.iter().skip(2) {
            assert!(cell.parse::<f64>().unwrap().is_finite());
        }
    }
}

#[test]
fn extract_all_writes_three_tables() {
    let data = dataset();
    let dir = TempDir::new().unwrap();
    let run = geotop(&[
        "extract",
        "--dataset",
        data.to_str().unwrap(),
        "--method",
        "all",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&run, 0);
    for name in ["tda.csv", "lkc.csv", "geotop.csv"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
}

#[test]
fn evaluate_prints_summary_and_writes_reports() {
    let data = dataset();
    let dir = TempDir::new().unwrap();
    let run = geotop(&[
        "evaluate",
        "--dataset",
        data.to_str().unwrap(),
        "--method",
        "all",
        "--rounds",
        "3",
        "--trees",
        "10",
        "--seed",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&run, 0);
    let text = stdout(&run);
    assert!(text.contains("12 images, 3 rounds, train 9 / test 3, 10 trees, seed 1"));
    for line in [
        "tda: accuracy",
        "lkc: accuracy",
        "geotop: accuracy",
        "ari tda vs lkc:",
    ] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }

    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"n_rounds\": 3"));
    assert!(report.contains("\"methods\""));

    let scores = std::fs::read_to_string(dir.path().join("round_scores.csv")).unwrap();
    assert_eq!(
        scores.lines().count(),
        1 + 3,
        "header plus one line per round"
    );

    let mis = std::fs::read_to_string(dir.path().join("misclassification.json")).unwrap();
    assert!(mis.contains("\"groups\""));
}

#[test]
fn toy_reports_the_two_expected_tracks() {
    let run = geotop(&["toy"]);
    assert_exit(&run, 0);
    let text = stdout(&run);
    assert!(text.contains("tracks: 2"), "{text}");
    assert!(text.contains("max_area 100 max_perimeter 40"), "{text}");
}

#[test]
fn verify_passes_quickly() {
    let run = geotop(&["verify", "--seed", "123"]);
    assert_exit(&run, 0);
    let text = stdout(&run);
    assert!(text.contains("verification passed"), "{text}");
    assert!(
        text.contains("total: 21907 comparisons, 0 failures"),
        "{text}"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_exit(&geotop(&["--frobnicate"]), 1);
    assert_exit(&geotop(&[]), 1);
    assert_exit(&geotop(&["extract", "--method", "nope"]), 1);
}

#[test]
fn data_errors_exit_two() {
    let run = geotop(&[
        "extract",
        "--dataset",
        "/nonexistent",
        "--method",
        "tda",
        "--out",
        "/tmp/unused",
    ]);
    assert_exit(&run, 2);
    assert!(stderr(&run).starts_with("error:"));

    // A required flag missing even after config merge is a data error, not a
    // clap usage error: the parse itself succeeded.
    let run = geotop(&["extract", "--method", "tda", "--out", "/tmp/unused"]);
    assert_exit(&run, 2);
    assert!(stderr(&run).contains("--dataset"));
}

#[test]
fn help_and_version_exit_zero() {
    let help = geotop(&["--help"]);
    assert_exit(&help, 0);
    assert!(stdout(&help).contains("geotop"));
    assert_exit(&geotop(&["--version"]), 0);
    assert_exit(&geotop(&["evaluate", "--help"]), 0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let data = dataset();
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            "dataset = {:?}\nmethod = \"lkc\"\nrounds = 2\ntrees = 5\n",
            data.to_str().unwrap()
        ),
    )
    .unwrap();

    let from_config = geotop(&["evaluate", "--config", config.to_str().unwrap()]);
    assert_exit(&from_config, 0);
    assert!(
        stdout(&from_config).contains("2 rounds"),
        "{}",
        stdout(&from_config)
    );

    let overridden = geotop(&[
        "evaluate",
        "--config",
        config.to_str().unwrap(),
        "--rounds",
        "3",
    ]);
    assert_exit(&overridden, 0);
    assert!(
        stdout(&overridden).contains("3 rounds"),
        "{}",
        stdout(&overridden)
    );
}

#[test]
fn unknown_config_keys_exit_two() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "round = 2\n").unwrap();
    let run = geotop(&["verify", "--config", config.to_str().unwrap()]);
    assert_exit(&run, 2);
    assert!(stderr(&run).starts_with("error:"));
}
