//! Bootstrap evaluation of the three feature families.
//!
//! Each round draws one train/test split shared by every method, trains one
//! forest per method with a shared seed, and records accuracy, F1,
//! precision, the confusion table, and the pairwise adjusted Rand index of
//! the methods' test predictions. Split randomness and forest seeds come
//! from separate counter-mode streams of a master generator, so reports are
//! reproducible for a fixed seed regardless of thread count, and two
//! methods fed identical feature matrices produce identical predictions.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledImage;
use crate::error::{Error, Result};
use crate::field::preprocess;
use crate::forest::{self, ForestParams};
use crate::lkc::{lkc_feature_vector, LkcConfig};
use crate::metrics;
use crate::scalar::Real;
use crate::tda::{tda_feature_vector, AmplitudeConfig};

/// Feature family identifier, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodTag {
    Tda,
    Lkc,
    GeoTop,
}

impl MethodTag {
    pub const ALL: [MethodTag; 3] = [MethodTag::Tda, MethodTag::Lkc, MethodTag::GeoTop];

    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Tda => "tda",
            MethodTag::Lkc => "lkc",
            MethodTag::GeoTop => "geotop",
        }
    }

    pub fn schema_len(self) -> usize {
        match self {
            MethodTag::Tda => 64,
            MethodTag::Lkc => 120,
            MethodTag::GeoTop => 184,
        }
    }

    pub fn schema(self) -> Vec<String> {
        match self {
            MethodTag::Tda => crate::tda::tda_schema(),
            MethodTag::Lkc => crate::lkc::lkc_schema(),
            MethodTag::GeoTop => crate::lkc::geotop_schema(),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "tda" => Ok(MethodTag::Tda),
            "lkc" => Ok(MethodTag::Lkc),
            "geotop" => Ok(MethodTag::GeoTop),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected tda, lkc, or geotop)"
            ))),
        }
    }
}

/// One feature row per image under a method tag.
///
/// Rows must be uniform in width but the width is not tied to the tag, so
/// external feature tables can ride through the same evaluator. Extraction
/// and the CSV codecs do enforce the tag's schema.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<F> {
    pub method: MethodTag,
    pub ids: Vec<String>,
    pub labels: Vec<u8>,
    pub rows: Vec<Vec<F>>,
}

impl<F: Real> FeatureMatrix<F> {
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if self.labels.len() != self.rows.len() {
            return Err(Error::LabelLength {
                labels: self.labels.len(),
                rows: self.rows.len(),
            });
        }
        if self.ids.len() != self.rows.len() {
            return Err(Error::MatrixMismatch(format!(
                "{} ids for {} rows",
                self.ids.len(),
                self.rows.len()
            )));
        }
        let width = self.rows[0].len();
        for row in &self.rows {
            if row.len() != width {
                return Err(Error::FeatureLength {
                    expected: width,
                    got: row.len(),
                });
            }
        }
        if let Some(&l) = self.labels.iter().find(|&&l| l > 1) {
            return Err(Error::MatrixMismatch(format!(
                "label {l} is outside {{0, 1}}"
            )));
        }
        Ok(())
    }
}

/// Extracts all three feature matrices from labeled images in one pass.
///
/// Images are preprocessed once; the combined rows are the concatenation of
/// the other two, so the three matrices are mutually consistent.
pub fn extract_feature_matrices<F: Real>(
    images: &[LabeledImage<F>],
    amplitude_config: &AmplitudeConfig<F>,
    lkc_config: &LkcConfig<F>,
) -> Result<[FeatureMatrix<F>; 3]> {
    if images.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    amplitude_config.validate()?;
    lkc_config.validate()?;
    let per_image: Vec<(Vec<F>, Vec<F>)> = images
        .par_iter()
        .map(|item| {
            let clean = preprocess(&item.image);
            let tda = tda_feature_vector(&clean, amplitude_config)?.values;
            let lkc = lkc_feature_vector(&clean, lkc_config)?.values;
            Ok((tda, lkc))
        })
        .collect::<Result<_>>()?;

    let ids: Vec<String> = images.iter().map(|i| i.image.source_id.clone()).collect();
    let labels: Vec<u8> = images.iter().map(|i| i.label).collect();

    let mut tda_rows = Vec::with_capacity(images.len());
    let mut lkc_rows = Vec::with_capacity(images.len());
    let mut geotop_rows = Vec::with_capacity(images.len());
    for (tda, lkc) in per_image {
        let mut combined = tda.clone();
        combined.extend_from_slice(&lkc);
        tda_rows.push(tda);
        lkc_rows.push(lkc);
        geotop_rows.push(combined);
    }

    let matrices = [
        FeatureMatrix {
            method: MethodTag::Tda,
            ids: ids.clone(),
            labels: labels.clone(),
            rows: tda_rows,
        },
        FeatureMatrix {
            method: MethodTag::Lkc,
            ids: ids.clone(),
            labels: labels.clone(),
            rows: lkc_rows,
        },
        FeatureMatrix {
            method: MethodTag::GeoTop,
            ids,
            labels,
            rows: geotop_rows,
        },
    ];
    for m in &matrices {
        m.validate()?;
    }
    Ok(matrices)
}

/// Bootstrap protocol knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_rounds: usize,
    /// Fraction of images drawn into each round's training split.
    pub train_fraction: f64,
    pub seed: u64,
    /// Trees per forest.
    pub n_trees: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_rounds: 500,
            train_fraction: 0.8,
            seed: 0,
            n_trees: 100,
        }
    }
}

/// Per-method aggregates over all rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub mean_score: f64,
    pub std_score: f64,
    pub mean_f1: f64,
    pub std_f1: f64,
    pub mean_precision: f64,
    pub std_precision: f64,
    /// Mean confusion table over rounds; rows true label, columns predicted.
    pub confusion_mean: [[f64; 2]; 2],
    pub scores: Vec<f64>,
    pub f1: Vec<f64>,
    pub precision: Vec<f64>,
}

/// Agreement between two methods' test predictions, per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAri {
    pub method_a: String,
    pub method_b: String,
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
}

/// Test predictions of one method in the retained round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPredictions {
    pub method: String,
    pub y_pred: Vec<u8>,
}

/// The final round, kept in full for error analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetainedRound {
    pub round: usize,
    pub test_ids: Vec<String>,
    pub y_true: Vec<u8>,
    pub predictions: Vec<MethodPredictions>,
}

/// Everything the bootstrap produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_images: usize,
    pub n_rounds: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub n_trees: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub methods: Vec<MethodReport>,
    pub ari: Vec<PairAri>,
    pub last_round: RetainedRound,
}

struct RoundOutcome {
    scores: Vec<f64>,
    f1: Vec<f64>,
    precision: Vec<f64>,
    confusion: Vec<[[u64; 2]; 2]>,
    ari: Vec<f64>,
    test_indices: Vec<usize>,
    predictions: Vec<Vec<u8>>,
}

fn check_matrices<F: Real>(matrices: &[FeatureMatrix<F>]) -> Result<usize> {
    if matrices.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    for m in matrices {
        m.validate()?;
    }
    let first = &matrices[0];
    for m in &matrices[1..] {
        if m.ids != first.ids {
            return Err(Error::MatrixMismatch(format!(
                "{} and {} list different images",
                m.method.name(),
                first.method.name()
            )));
        }
        if m.labels != first.labels {
            return Err(Error::MatrixMismatch(format!(
                "{} and {} disagree on labels",
                m.method.name(),
                first.method.name()
            )));
        }
    }
    let mut seen = Vec::new();
    for m in matrices {
        if seen.contains(&m.method) {
            return Err(Error::MatrixMismatch(format!(
                "method {} appears twice",
                m.method.name()
            )));
        }
        seen.push(m.method);
    }
    Ok(first.rows.len())
}

fn run_round<F: Real>(
    matrices: &[FeatureMatrix<F>],
    cfg: &BootstrapConfig,
    round: usize,
    n_train: usize,
) -> Result<RoundOutcome> {
    let n = matrices[0].rows.len();
    let labels = &matrices[0].labels;

    let mut split_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    split_rng.set_stream(2 * round as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut split_rng);
    let (train_idx, test_idx) = order.split_at(n_train);

    let first = labels[train_idx[0]];
    if train_idx.iter().all(|&i| labels[i] == first) {
        return Err(Error::DegenerateSplit { round });
    }

    let mut seed_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    seed_rng.set_stream(2 * round as u64 + 1);
    let forest_seed = seed_rng.next_u64();

    let y_train: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
    let y_test: Vec<u8> = test_idx.iter().map(|&i| labels[i]).collect();

    let mut outcome = RoundOutcome {
        scores: Vec::new(),
        f1: Vec::new(),
        precision: Vec::new(),
        confusion: Vec::new(),
        ari: Vec::new(),
        test_indices: test_idx.to_vec(),
        predictions: Vec::new(),
    };

    for m in matrices {
        let x_train: Vec<Vec<F>> = train_idx.iter().map(|&i| m.rows[i].clone()).collect();
        let x_test: Vec<Vec<F>> = test_idx.iter().map(|&i| m.rows[i].clone()).collect();
        let params = ForestParams {
            n_trees: cfg.n_trees,
            seed: forest_seed,
            ..ForestParams::default()
        };
        let model = forest::train(&x_train, &y_train, &params)?;
        let y_pred = model.predict(&x_test)?;
        outcome.scores.push(metrics::accuracy(&y_test, &y_pred)?);
        outcome.f1.push(metrics::f1_score(&y_test, &y_pred)?);
        outcome
            .precision
            .push(metrics::precision(&y_test, &y_pred)?);
        outcome
            .confusion
            .push(metrics::confusion_counts(&y_test, &y_pred)?);
        outcome.predictions.push(y_pred);
    }

    for a in 0..matrices.len() {
        for b in a + 1..matrices.len() {
            outcome.ari.push(metrics::adjusted_rand_index(
                &outcome.predictions[a],
                &outcome.predictions[b],
            )?);
        }
    }
    Ok(outcome)
}

/// Runs the full bootstrap over one or more feature matrices.
///
/// All matrices must describe the same images in the same order. Rounds run
/// in parallel; the result is identical for any thread count.
pub fn bootstrap_evaluate<F: Real>(
    matrices: &[FeatureMatrix<F>],
    cfg: &BootstrapConfig,
) -> Result<EvalReport> {
    let n = check_matrices(matrices)?;
    if cfg.n_rounds == 0 {
        return Err(Error::NoRounds);
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::BadTrainFraction(cfg.train_fraction));
    }
    let n_train = (n as f64 * cfg.train_fraction).floor() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::BadTrainFraction(cfg.train_fraction));
    }

    let rounds: Vec<RoundOutcome> = (0..cfg.n_rounds)
        .into_par_iter()
        .map(|round| run_round(matrices, cfg, round, n_train))
        .collect::<Result<_>>()?;

    let methods = matrices
        .iter()
        .enumerate()
        .map(|(m, matrix)| {
            let scores: Vec<f64> = rounds.iter().map(|r| r.scores[m]).collect();
            let f1: Vec<f64> = rounds.iter().map(|r| r.f1[m]).collect();
            let precision: Vec<f64> = rounds.iter().map(|r| r.precision[m]).collect();
            let mut confusion_mean = [[0.0f64; 2]; 2];
            for r in &rounds {
                for (i, row) in r.confusion[m].iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        confusion_mean[i][j] += v as f64;
                    }
                }
            }
            for row in &mut confusion_mean {
                for v in row.iter_mut() {
                    *v /= rounds.len() as f64;
                }
            }
            let (mean_score, std_score) = metrics::mean_std(&scores);
            let (mean_f1, std_f1) = metrics::mean_std(&f1);
            let (mean_precision, std_precision) = metrics::mean_std(&precision);
            MethodReport {
                method: matrix.method.name().to_string(),
                mean_score,
                std_score,
                mean_f1,
                std_f1,
                mean_precision,
                std_precision,
                confusion_mean,
                scores,
                f1,
                precision,
            }
        })
        .collect();

    let mut ari = Vec::new();
    let mut pair = 0;
    for a in 0..matrices.len() {
        for b in a + 1..matrices.len() {
            let values: Vec<f64> = rounds.iter().map(|r| r.ari[pair]).collect();
            let (mean, std) = metrics::mean_std(&values);
            ari.push(PairAri {
                method_a: matrices[a].method.name().to_string(),
                method_b: matrices[b].method.name().to_string(),
                mean,
                std,
                values,
            });
            pair += 1;
        }
    }

    let last = rounds.last().expect("at least one round");
    let ids = &matrices[0].ids;
    let labels = &matrices[0].labels;
    let last_round = RetainedRound {
        round: cfg.n_rounds - 1,
        test_ids: last.test_indices.iter().map(|&i| ids[i].clone()).collect(),
        y_true: last.test_indices.iter().map(|&i| labels[i]).collect(),
        predictions: matrices
            .iter()
            .zip(&last.predictions)
            .map(|(m, y_pred)| MethodPredictions {
                method: m.method.name().to_string(),
                y_pred: y_pred.clone(),
            })
            .collect(),
    };

    Ok(EvalReport {
        n_images: n,
        n_rounds: cfg.n_rounds,
        train_fraction: cfg.train_fraction,
        seed: cfg.seed,
        n_trees: cfg.n_trees,
        train_size: n_train,
        test_size: n - n_train,
        methods,
        ari,
        last_round,
    })
}

/// One cell of the agreement partition: which methods got these ids wrong.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementGroup {
    /// "all_correct", "all_wrong", or "wrong_<m1>+<m2>..." over method names.
    pub key: String,
    pub ids: Vec<String>,
}

/// Partition of the retained round's test ids by per-method correctness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisclassificationReport {
    pub round: usize,
    /// Exactly 2^k groups for k methods, empty groups included, keyed in
    /// mask order from all-correct to all-wrong.
    pub groups: Vec<AgreementGroup>,
}

/// Groups the retained round's test images by which methods misclassify them.
pub fn misclassification_report(report: &EvalReport) -> MisclassificationReport {
    let last = &report.last_round;
    let k = last.predictions.len();
    let mut groups: Vec<AgreementGroup> = (0..1usize << k)
        .map(|mask| {
            let wrong: Vec<&str> = (0..k)
                .filter(|m| mask >> m & 1 == 1)
                .map(|m| last.predictions[m].method.as_str())
                .collect();
            let key = if wrong.is_empty() {
                "all_correct".to_string()
            } else if wrong.len() == k {
                "all_wrong".to_string()
            } else {
                format!("wrong_{}", wrong.join("+"))
            };
            AgreementGroup {
                key,
                ids: Vec::new(),
            }
        })
        .collect();

    for (pos, id) in last.test_ids.iter().enumerate() {
        let mut mask = 0usize;
        for (m, pred) in last.predictions.iter().enumerate() {
            if pred.y_pred[pos] != last.y_true[pos] {
                mask |= 1 << m;
            }
        }
        groups[mask].ids.push(id.clone());
    }

    MisclassificationReport {
        round: report.n_rounds - 1,
        groups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Separable synthetic matrix: class means differ along every feature.
    fn toy_matrix(method: MethodTag, n: usize, jitter: f64) -> FeatureMatrix<f64> {
        let d = method.schema_len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let label = (i % 2) as f64;
                (0..d)
                    .map(|j| label * 2.0 + ((i * d + j) % 7) as f64 * jitter)
                    .collect()
            })
            .collect();
        FeatureMatrix {
            method,
            ids: (0..n).map(|i| format!("img_{i:03}")).collect(),
            labels: (0..n).map(|i| (i % 2) as u8).collect(),
            rows,
        }
    }

    fn quick_cfg() -> BootstrapConfig {
        BootstrapConfig {
            n_rounds: 4,
            train_fraction: 0.75,
            seed: 11,
            n_trees: 15,
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let a = toy_matrix(MethodTag::Tda, 24, 0.05);
        let r1 = bootstrap_evaluate(std::slice::from_ref(&a), &quick_cfg()).unwrap();
        let r2 = bootstrap_evaluate(&[a], &quick_cfg()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn separable_data_scores_high() {
        let m = toy_matrix(MethodTag::Tda, 40, 0.01);
        let report = bootstrap_evaluate(&[m], &quick_cfg()).unwrap();
        assert!(report.methods[0].mean_score > 0.95);
        assert_eq!(report.methods[0].scores.len(), 4);
        assert_eq!(report.train_size, 30);
        assert_eq!(report.test_size, 10);
        assert_eq!(report.last_round.test_ids.len(), 10);
    }

    #[test]
    fn split_is_shared_across_methods() {
        // With three copies of the same rows under different tags, every
        // method sees the same split and seed, so predictions coincide and
        // every pairwise ARI is exactly 1 in every round.
        let a = toy_matrix(MethodTag::Tda, 24, 0.05);
        let mut b = a.clone();
        b.method = MethodTag::Lkc;
        let mut c = a.clone();
        c.method = MethodTag::GeoTop;
        let report = bootstrap_evaluate(&[a, b, c], &quick_cfg()).unwrap();
        assert_eq!(report.ari.len(), 3);
        for pair in &report.ari {
            assert_eq!(pair.mean, 1.0, "{} vs {}", pair.method_a, pair.method_b);
            assert!(pair.values.iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn misclassification_groups_partition_test_ids() {
        let a = toy_matrix(MethodTag::Tda, 30, 0.4);
        let mut b = toy_matrix(MethodTag::Lkc, 30, 0.7);
        b.ids = a.ids.clone();
        b.labels = a.labels.clone();
        let report = bootstrap_evaluate(&[a, b], &quick_cfg()).unwrap();
        let mis = misclassification_report(&report);
        assert_eq!(mis.groups.len(), 4);
        let total: usize = mis.groups.iter().map(|g| g.ids.len()).sum();
        assert_eq!(total, report.test_size);
        assert_eq!(mis.groups[0].key, "all_correct");
        assert_eq!(mis.groups[3].key, "all_wrong");
        assert_eq!(mis.groups[1].key, "wrong_tda");
        assert_eq!(mis.groups[2].key, "wrong_lkc");
    }

    #[test]
    fn bad_configs_are_rejected() {
        let m = toy_matrix(MethodTag::Tda, 10, 0.1);
        let mut cfg = quick_cfg();
        cfg.n_rounds = 0;
        assert!(matches!(
            bootstrap_evaluate(std::slice::from_ref(&m), &cfg),
            Err(Error::NoRounds)
        ));
        cfg = quick_cfg();
        cfg.train_fraction = 1.0;
        assert!(matches!(
            bootstrap_evaluate(std::slice::from_ref(&m), &cfg),
            Err(Error::BadTrainFraction(_))
        ));
        cfg = quick_cfg();
        cfg.train_fraction = 0.05;
        assert!(matches!(
            bootstrap_evaluate(&[m], &cfg),
            Err(Error::BadTrainFraction(_))
        ));
    }

    #[test]
    fn mismatched_ids_are_rejected() {
        let a = toy_matrix(MethodTag::Tda, 12, 0.1);
        let mut b = a.clone();
        b.method = MethodTag::Lkc;
        b.ids[3] = "other".into();
        assert!(matches!(
            bootstrap_evaluate(&[a, b], &quick_cfg()),
            Err(Error::MatrixMismatch(_))
        ));
    }
}
